//! Scripted experiments behind `meanscope reproduce`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::classify::{check_gcv, check_pmi, check_pmi_inf, check_pmi_r, region_scan, GridSpec, Property, ScanFamily, ToleranceConfig};
use crate::error::{Error, Result};
use crate::hansen::{gcv_integrand, phi_eval, pmi_integrand, theorem_counterexample};
use crate::means::{MeanFunction, PositiveFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    TheoremGcvPmi,
    Section5Separation,
    RegionUab,
    RegionStolarsky,
}

impl Experiment {
    pub const ALL: [Experiment; 4] =
        [Experiment::TheoremGcvPmi, Experiment::Section5Separation, Experiment::RegionUab, Experiment::RegionStolarsky];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::TheoremGcvPmi => "theorem_gcv_pmi",
            Experiment::Section5Separation => "section5_separation",
            Experiment::RegionUab => "region_uab",
            Experiment::RegionStolarsky => "region_stolarsky",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproduction {
    pub experiment: Experiment,
    pub passed: bool,
    pub checks: Vec<CheckLine>,
    /// Intermediate numbers.
    pub data: serde_json::Value,
}

impl Reproduction {
    fn new(experiment: Experiment, checks: Vec<CheckLine>, data: serde_json::Value) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Reproduction { experiment, passed, checks, data }
    }
}

fn line(name: &str, passed: bool, detail: String) -> CheckLine {
    CheckLine { name: name.to_string(), passed, detail }
}

/// Exponents of the integrand scan for the counterexample density.
pub const THEOREM_R_VALUES: [f64; 6] = [1.1, 1.5, 2.0, 3.0, 5.0, 10.0];

pub fn run(experiment: Experiment, grid: &GridSpec, tol: &ToleranceConfig) -> Result<Reproduction> {
    match experiment {
        Experiment::TheoremGcvPmi => theorem_gcv_pmi(grid, tol),
        Experiment::Section5Separation => section5_separation(grid, tol),
        Experiment::RegionUab => region(ScanFamily::Uab, grid, tol),
        Experiment::RegionStolarsky => region(ScanFamily::Stolarsky, grid, tol),
    }
}

fn theorem_gcv_pmi(grid: &GridSpec, tol: &ToleranceConfig) -> Result<Reproduction> {
    let h = theorem_counterexample();
    let xs = grid.log_points();
    let mut checks = Vec::new();
    let mut minima = Vec::new();
    for r in THEOREM_R_VALUES {
        let mut worst = (f64::NAN, f64::INFINITY);
        for &x in &xs {
            let v = pmi_integrand(&h, x.exp(), r)?;
            if v < worst.1 {
                worst = (x.exp(), v);
            }
        }
        minima.push(json!({"r": r, "t": worst.0, "min": worst.1}));
        checks.push(line(
            &format!("pmi integrand >= -1e-10 (r = {r})"),
            worst.1 >= -1e-10,
            format!("min {:.3e} at t = {:.3e}", worst.1, worst.0),
        ));
    }
    for r in THEOREM_R_VALUES {
        let phi = phi_eval(9.0 / 5.0, r, 1.0)?;
        checks.push(line(&format!("phi(9/5, {r}, 1) = 0"), phi.abs() <= 1e-12, format!("{phi:.3e}")));
    }
    let probes = [1e-1, 1e-2, 1e-3, 1e-4, 1e-6];
    let gcv: Vec<(f64, f64)> = probes.iter().map(|&t| gcv_integrand(&h, t).map(|v| (t, v))).collect::<Result<_>>()?;
    let at_milli = gcv[2].1;
    checks.push(line("gcv integrand at t = 1e-3 <= -0.03", at_milli <= -0.03, format!("{at_milli:.6}")));
    let f = MeanFunction::hansen(h);
    let pmi = check_pmi(&f, grid, tol)?;
    checks.push(line("check_pmi holds", pmi.holds(), format!("extreme {:.3e}", pmi.extreme.value)));
    let gcv_report = check_gcv(&f, grid, tol)?;
    checks.push(line(
        "check_gcv violated",
        !gcv_report.holds(),
        format!("witness t = {:.3e}, gap {:.3e}", gcv_report.extreme.t, gcv_report.extreme.value),
    ));
    let data = json!({
        "pmi_minima": minima,
        "gcv_integrand": gcv.iter().map(|(t, v)| json!({"t": t, "value": v})).collect::<Vec<_>>(),
        "gcv_limit": -1.0 / 28.0,
        "check_pmi": pmi,
        "check_gcv": gcv_report,
    });
    Ok(Reproduction::new(Experiment::TheoremGcvPmi, checks, data))
}

/// `t` values approaching 0 along which `f(t^r)/f(t)^r → 2^{1-r}` is traced.
pub const SEPARATION_T: [f64; 7] = [1e-10, 1e-15, 1e-20, 1e-25, 1e-30, 1e-35, 1e-40];

/// `(t, f(t^r)/f(t)^r, relative deviation from 2^{1-r})` along
/// [`SEPARATION_T`].
pub fn separation_ratios(r: f64) -> Result<Vec<(f64, f64, f64)>> {
    let f = MeanFunction::section5_example();
    let target = (1.0 - r).exp2();
    SEPARATION_T
        .iter()
        .map(|&t| {
            let x = t.ln();
            let ratio = (f.log_eval(r * x)? - r * f.log_eval(x)?).exp();
            Ok((t, ratio, (ratio - target).abs() / target))
        })
        .collect()
}

fn section5_separation(grid: &GridSpec, tol: &ToleranceConfig) -> Result<Reproduction> {
    let f = MeanFunction::section5_example();
    let mut checks = Vec::new();
    let inf = check_pmi_inf(&f, grid, tol)?;
    let d = inf.derivative_at_one.unwrap_or(f64::NAN);
    checks.push(line("check_pmi_inf holds", inf.holds(), format!("extreme {:.3e} at t = {:.3e}", inf.extreme.value, inf.extreme.t)));
    checks.push(line("|f'(1) - 1/3| <= 1e-6", (d - 1.0 / 3.0).abs() <= 1e-6, format!("f'(1) = {d:.12}")));
    let mut traces = Vec::new();
    for r in [2.0, 3.0] {
        let rows = separation_ratios(r)?;
        let decreasing = rows.windows(2).all(|w| w[1].2 < w[0].2);
        let last = rows.last().expect("non-empty").2;
        checks.push(line(
            &format!("f(t^{r})/f(t)^{r} -> 2^(1-{r}) as t -> 0"),
            decreasing && last < 1e-3,
            format!("relative deviation {:.3e} at t = 1e-10, {last:.3e} at t = 1e-40", rows[0].2),
        ));
        traces.push(json!({
            "r": r,
            "target": (1.0 - r).exp2(),
            "rows": rows.iter().map(|(t, v, e)| json!({"t": t, "ratio": v, "rel_dev": e})).collect::<Vec<_>>(),
        }));
    }
    let pmi2 = check_pmi_r(&f, 2.0, grid, tol)?;
    let witness = pmi2.witness;
    checks.push(line(
        "check_pmi_r(2) violated",
        !pmi2.holds(),
        witness.map_or("no witness".into(), |w| format!("witness t = {:.3e}, value {:.3e}", w.t, w.value)),
    ));
    let data = json!({"derivative_at_one": d, "ratios": traces, "check_pmi_inf": inf, "check_pmi_r2": pmi2});
    Ok(Reproduction::new(Experiment::Section5Separation, checks, data))
}

/// Scan step of the region experiments.
pub const REGION_STEP: f64 = 0.25;

fn region(family: ScanFamily, grid: &GridSpec, tol: &ToleranceConfig) -> Result<Reproduction> {
    let points = family.grid(REGION_STEP)?;
    let experiment = match family {
        ScanFamily::Uab => Experiment::RegionUab,
        _ => Experiment::RegionStolarsky,
    };
    let mut checks = Vec::new();
    let mut tables = Vec::new();
    for property in [Property::Gcv, Property::Gcc] {
        let scan = region_scan(family, &points, property, grid, tol)?;
        let interior = scan.interior_mismatches();
        checks.push(line(
            &format!("{property} interior mismatches = 0"),
            interior.is_empty(),
            format!("{} of {} points mismatched, {} boundary", interior.len(), scan.rows.len(), scan.boundary_mismatches().len()),
        ));
        tables.push(scan);
    }
    Ok(Reproduction::new(experiment, checks, json!({"step": REGION_STEP, "scans": tables})))
}
