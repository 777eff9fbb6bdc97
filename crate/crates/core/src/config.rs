//! Serializable run configuration and flat function specifications.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::{GridSpec, Property, ScanFamily, ToleranceConfig};
use crate::error::{Error, Result};
use crate::hansen::{theorem_counterexample, Criterion, HansenDensity, Method};
use crate::reproduce::Experiment;
use crate::matmean::SearchConfig;
use crate::means::{adjoint, Atom, GeodesicMeasure, MeanFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Power,
    Binomial,
    Uab,
    Stolarsky,
    Section5,
    Hansen,
    Theorem,
    Geodesic,
    Arithmetic,
    Harmonic,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Power,
        Family::Binomial,
        Family::Uab,
        Family::Stolarsky,
        Family::Section5,
        Family::Hansen,
        Family::Theorem,
        Family::Geodesic,
        Family::Arithmetic,
        Family::Harmonic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Power => "power",
            Family::Binomial => "binomial",
            Family::Uab => "uab",
            Family::Stolarsky => "stolarsky",
            Family::Section5 => "section5",
            Family::Hansen => "hansen",
            Family::Theorem => "theorem",
            Family::Geodesic => "geodesic",
            Family::Arithmetic => "arithmetic",
            Family::Harmonic => "harmonic",
        }
    }

    fn parameters(self) -> &'static [&'static str] {
        match self {
            Family::Power | Family::Stolarsky => &["alpha"],
            Family::Binomial => &["p"],
            Family::Uab => &["a", "b"],
            Family::Hansen => &["density"],
            Family::Geodesic => &["weights", "exponents"],
            Family::Section5 | Family::Theorem | Family::Arithmetic | Family::Harmonic => &[],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Family::ALL
            .into_iter()
            .find(|f| f.name() == lower)
            .ok_or_else(|| {
                let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
                Error::Parse(format!("unknown family {s:?} (expected one of {})", names.join(", ")))
            })
    }
}

/// A mean function named by family and flat parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Geodesic atom weights.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// Geodesic atom exponents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<HansenDensity>,
    /// Replace `f` by `1/f(1/t)`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub adjoint: bool,
    /// Replace `f` by the inverse of `t^shift f(t)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_shift: Option<f64>,
}

impl FunctionSpec {
    pub fn new(family: Family) -> Self {
        FunctionSpec {
            family,
            alpha: None,
            p: None,
            a: None,
            b: None,
            weights: None,
            exponents: None,
            density: None,
            adjoint: false,
            inverse_shift: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn supplied(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (name, present) in [
            ("alpha", self.alpha.is_some()),
            ("p", self.p.is_some()),
            ("a", self.a.is_some()),
            ("b", self.b.is_some()),
            ("weights", self.weights.is_some()),
            ("exponents", self.exponents.is_some()),
            ("density", self.density.is_some()),
        ] {
            if present {
                out.push(name);
            }
        }
        out
    }

    /// Builds the function, rejecting missing or foreign parameters.
    pub fn build(&self) -> Result<MeanFunction> {
        let wanted = self.family.parameters();
        let supplied = self.supplied();
        if let Some(extra) = supplied.iter().find(|s| !wanted.contains(s)) {
            return Err(Error::Parameter(format!("parameter {extra} does not apply to family {}", self.family)));
        }
        if let Some(missing) = wanted.iter().find(|w| !supplied.contains(w)) {
            return Err(Error::Parameter(format!("family {} needs parameter {missing}", self.family)));
        }
        let base = match self.family {
            Family::Power => MeanFunction::power(self.alpha.unwrap_or_default())?,
            Family::Stolarsky => MeanFunction::stolarsky(self.alpha.unwrap_or_default())?,
            Family::Binomial => MeanFunction::binomial(self.p.unwrap_or_default())?,
            Family::Uab => MeanFunction::uab(self.a.unwrap_or_default(), self.b.unwrap_or_default())?,
            Family::Section5 => MeanFunction::section5_example(),
            Family::Theorem => MeanFunction::hansen(theorem_counterexample()),
            Family::Arithmetic => MeanFunction::arithmetic(),
            Family::Harmonic => MeanFunction::harmonic(),
            Family::Hansen => MeanFunction::hansen(self.density.clone().unwrap_or_else(|| unreachable!())),
            Family::Geodesic => {
                let weights = self.weights.as_deref().unwrap_or_default();
                let exponents = self.exponents.as_deref().unwrap_or_default();
                if weights.len() != exponents.len() || weights.is_empty() {
                    return Err(Error::Parameter("weights and exponents must be non-empty and of equal length".into()));
                }
                let atoms = weights.iter().zip(exponents).map(|(&weight, &exponent)| Atom { weight, exponent }).collect();
                MeanFunction::geodesic(GeodesicMeasure::new(atoms, None)?)
            }
        };
        let f = if self.adjoint { adjoint(base) } else { base };
        match self.inverse_shift {
            Some(shift) => MeanFunction::inverse_of(f, shift),
            None => Ok(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Table,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "table" => Ok(OutputFormat::Table),
            _ => Err(Error::Parse(format!("unknown output format {s:?}"))),
        }
    }
}

/// Parameters of a Hansen criterion evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HansenParams {
    pub density: HansenDensity,
    pub criterion: Criterion,
    /// Explicit points; the run's grid is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_values: Option<Vec<f64>>,
    /// Exponents for the pmi criterion.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub r_values: Vec<f64>,
    pub method: Method,
}

/// Parameters of a region scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanParams {
    pub family: ScanFamily,
    pub property: Property,
    pub step: f64,
}

/// Effective configuration of a command-line run; embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    #[serde(default)]
    pub properties: Vec<Property>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hansen: Option<HansenParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            function: None,
            properties: Vec::new(),
            grid: GridSpec::default(),
            tolerances: ToleranceConfig::default(),
            search: SearchConfig::default(),
            hansen: None,
            scan: None,
            experiment: None,
            format: OutputFormat::Json,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.tolerances.validate()?;
        self.search.validate()?;
        if let Some(spec) = &self.function {
            spec.build()?;
        }
        if let Some(scan) = &self.scan {
            scan.family.grid(scan.step)?;
        }
        if let Some(h) = &self.hansen {
            if h.criterion == Criterion::Pmi && h.r_values.is_empty() {
                return Err(Error::Parameter("the pmi criterion needs r values".into()));
            }
        }
        Ok(())
    }
}
