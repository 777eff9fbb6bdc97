use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check, GridSpec, Property, ToleranceConfig};
use crate::error::{Error, Result};
use crate::means::{gamma_contains, MeanFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanFamily {
    Uab,
    Stolarsky,
    Binomial,
}

/// Parameters of one scanned family member; `b` is used by `Uab` only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub a: f64,
    pub b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub point: ScanPoint,
    pub predicted: bool,
    pub observed: bool,
    /// On the tie set (`|a| = |b|`, Stolarsky `α = -1`, binomial `p = 0`),
    /// where both convexity and concavity hold.
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionScan {
    pub family: ScanFamily,
    pub property: Property,
    pub rows: Vec<RegionRow>,
}

impl RegionScan {
    pub fn interior_mismatches(&self) -> Vec<&RegionRow> {
        self.rows.iter().filter(|r| !r.boundary && r.predicted != r.observed).collect()
    }

    pub fn boundary_mismatches(&self) -> Vec<&RegionRow> {
        self.rows.iter().filter(|r| r.boundary && r.predicted != r.observed).collect()
    }

    /// CSV with columns `a,b,predicted,observed` (`alpha,...` for Stolarsky,
    /// `p,...` for the binomial family).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(match self.family {
            ScanFamily::Uab => "a,b,predicted,observed\n",
            ScanFamily::Stolarsky => "alpha,predicted,observed\n",
            ScanFamily::Binomial => "p,predicted,observed\n",
        });
        for row in &self.rows {
            match row.point.b {
                Some(b) if self.family == ScanFamily::Uab => {
                    out.push_str(&format!("{},{},{},{}\n", row.point.a, b, row.predicted, row.observed))
                }
                _ => out.push_str(&format!("{},{},{}\n", row.point.a, row.predicted, row.observed)),
            }
        }
        out
    }
}

impl ScanFamily {
    pub fn build(self, point: ScanPoint) -> Result<MeanFunction> {
        match self {
            ScanFamily::Uab => {
                let b = point.b.ok_or_else(|| Error::Parameter("u_{a,b} scan point needs b".into()))?;
                MeanFunction::uab(point.a, b)
            }
            ScanFamily::Stolarsky => MeanFunction::stolarsky(point.a),
            ScanFamily::Binomial => MeanFunction::binomial(point.a),
        }
    }

    pub fn is_boundary(self, point: ScanPoint) -> bool {
        match self {
            ScanFamily::Uab => point.b.is_some_and(|b| point.a.abs() == b.abs()),
            ScanFamily::Stolarsky => point.a == -1.0,
            ScanFamily::Binomial => point.a == 0.0,
        }
    }

    /// Admissible points of a uniform grid with the given step over the
    /// family's parameter domain.
    pub fn grid(self, step: f64) -> Result<Vec<ScanPoint>> {
        if !(step > 0.0 && step.is_finite() && step >= 1e-3) {
            return Err(Error::Parameter(format!("scan step {step} must be >= 1e-3")));
        }
        let (lo, hi) = match self {
            ScanFamily::Uab | ScanFamily::Stolarsky => (-2.0, 2.0),
            ScanFamily::Binomial => (-1.0, 1.0),
        };
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        let axis: Vec<f64> = (0..=n).map(|i| lo + step * i as f64).collect();
        Ok(match self {
            ScanFamily::Uab => axis
                .iter()
                .flat_map(|&a| axis.iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| gamma_contains(a, b))
                .map(|(a, b)| ScanPoint { a, b: Some(b) })
                .collect(),
            _ => axis.into_iter().map(|a| ScanPoint { a, b: None }).collect(),
        })
    }
}

/// Analytic membership for the scanned families; `None` when the property
/// has no closed-form region here.
///
/// * `u_{a,b}` is geometrically convex (equivalently pmi) iff `|a| >= |b|`,
///   geometrically concave (pmd) iff `|a| <= |b|`.
/// * Stolarsky `S_α(1,t)`: convex iff `α ∈ [-1, 2]`, concave iff
///   `α ∈ [-2, -1]`.
/// * Binomial `b_p`: convex iff `p >= 0`, concave iff `p <= 0`, because
///   `b_p* = b_{-p}`.
pub fn predicted(family: ScanFamily, point: ScanPoint, property: Property) -> Option<bool> {
    let convex = match property {
        Property::Gcv | Property::Pmi => true,
        Property::Gcc | Property::Pmd => false,
        _ => return None,
    };
    Some(match family {
        ScanFamily::Uab => {
            let b = point.b?;
            if !gamma_contains(point.a, b) {
                return None;
            }
            if convex {
                point.a.abs() >= b.abs()
            } else {
                point.a.abs() <= b.abs()
            }
        }
        ScanFamily::Stolarsky => {
            if convex {
                (-1.0..=2.0).contains(&point.a)
            } else {
                (-2.0..=-1.0).contains(&point.a)
            }
        }
        ScanFamily::Binomial => {
            if convex {
                point.a >= 0.0
            } else {
                point.a <= 0.0
            }
        }
    })
}

/// Runs the checker for `property` at every point and compares with
/// [`predicted`]. Points are evaluated in parallel; rows keep input order.
pub fn region_scan(
    family: ScanFamily,
    points: &[ScanPoint],
    property: Property,
    grid: &GridSpec,
    tol: &ToleranceConfig,
) -> Result<RegionScan> {
    let rows = points
        .par_iter()
        .map(|&point| {
            let predicted = predicted(family, point, property)
                .ok_or_else(|| Error::Parameter(format!("no analytic region for {property} at {point:?}")))?;
            let f = family.build(point)?;
            let observed = check(property, &f, grid, tol)?.holds();
            Ok(RegionRow { point, predicted, observed, boundary: family.is_boundary(point) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionScan { family, property, rows })
}
