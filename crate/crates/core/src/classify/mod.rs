//! Grid-based membership tests for the classes of operator means.
//!
//! A passing verdict is always [`Verdict::HoldsOnGrid`]: the universally
//! quantified inequalities are only sampled. A failing verdict carries a
//! witness that reproduces the violation when re-evaluated.

mod loewner;
mod region;

pub use loewner::{loewner_matrix, loewner_test, MAX_LOEWNER_POINTS};
pub use region::{predicted, region_scan, ScanFamily, ScanPoint, RegionRow, RegionScan};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::means::PositiveFunction;
use crate::numeric::{golden_section_min, log_grid};

/// Log-spaced sampling grid in `t` plus the exponents `r` for power tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
    #[serde(default)]
    pub scale: GridScale,
    pub r_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    #[default]
    Log,
}

/// `{1 + 2^{-k} : k = 0..6} ∪ {2, 3, 5, 10}`, ascending.
pub fn default_r_values() -> Vec<f64> {
    let mut r: Vec<f64> = (0..=6).map(|k| 1.0 + 0.5f64.powi(k)).collect();
    r.extend([2.0, 3.0, 5.0, 10.0]);
    r.sort_by(f64::total_cmp);
    r.dedup();
    r
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { t_min: 1e-4, t_max: 1e4, n_points: 241, scale: GridScale::Log, r_values: default_r_values() }
    }
}

impl GridSpec {
    pub fn with_r_values(mut self, r_values: Vec<f64>) -> Self {
        self.r_values = r_values;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min < 1.0 && self.t_max > 1.0 && self.t_max.is_finite()) {
            return Err(Error::Grid(format!("need 0 < t_min < 1 < t_max, got [{}, {}]", self.t_min, self.t_max)));
        }
        if self.n_points < 3 {
            return Err(Error::Grid(format!("n_points = {} must be >= 3", self.n_points)));
        }
        if self.n_points > 1_000_000 {
            return Err(Error::Grid(format!("n_points = {} is unreasonably large", self.n_points)));
        }
        if let Some(r) = self.r_values.iter().find(|r| !(**r >= 1.0 && r.is_finite())) {
            return Err(Error::Grid(format!("r = {r} must be >= 1")));
        }
        Ok(())
    }

    /// Grid points as `x = ln t`.
    pub fn log_points(&self) -> Vec<f64> {
        log_grid(self.t_min, self.t_max, self.n_points)
    }

    pub fn log_spacing(&self) -> f64 {
        (self.t_max.ln() - self.t_min.ln()) / (self.n_points - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub rel_eval: f64,
    pub criterion_slack: f64,
    pub fd_step: f64,
    pub derivative_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { rel_eval: 1e-10, criterion_slack: 1e-10, fd_step: 1e-4, derivative_tol: 1e-6 }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [self.rel_eval, self.criterion_slack, self.fd_step, self.derivative_tol];
        if all.iter().all(|v| *v > 0.0 && v.is_finite()) && self.fd_step < 0.5 {
            Ok(())
        } else {
            Err(Error::Parameter("tolerances must be positive (and fd_step < 0.5)".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Property {
    OmLoewner,
    Gcv,
    Gcc,
    Pmi,
    Pmd,
    PmiR(f64),
    PmiInf,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::OmLoewner => write!(f, "OM_loewner"),
            Property::Gcv => write!(f, "GCV"),
            Property::Gcc => write!(f, "GCC"),
            Property::Pmi => write!(f, "PMI"),
            Property::Pmd => write!(f, "PMD"),
            Property::PmiR(r) => write!(f, "PMI_r({r})"),
            Property::PmiInf => write!(f, "PMI_inf"),
        }
    }
}

impl FromStr for Property {
    type Err = Error;

    /// Case-insensitive; `PMI_r` takes its exponent in parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let p = match lower.as_str() {
            "om" | "om_loewner" | "loewner" => Property::OmLoewner,
            "gcv" => Property::Gcv,
            "gcc" => Property::Gcc,
            "pmi" => Property::Pmi,
            "pmd" => Property::Pmd,
            "pmi_inf" => Property::PmiInf,
            other => {
                let r = other
                    .strip_prefix("pmi_r(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown property {s:?}")))?;
                if !(r > 1.0 && r.is_finite()) {
                    return Err(Error::Parse(format!("PMI_r exponent {r} must be > 1")));
                }
                Property::PmiR(r)
            }
        };
        Ok(p)
    }
}

impl TryFrom<String> for Property {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Property> for String {
    fn from(p: Property) -> String {
        p.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnGrid,
    Violated,
}

/// Location and size of the worst sampled violation.
///
/// `value` is the test statistic of the property at `(t, r)`; see
/// [`witness_statistic`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub t: f64,
    pub r: Option<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub property: Property,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Most adverse statistic over the grid, violated or not.
    pub extreme: Witness,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub derivative_at_one: Option<f64>,
    pub grid: GridSpec,
    pub tolerances: ToleranceConfig,
}

impl ClassificationReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnGrid
    }
}

/// `(F(x+h) + F(x-h))/2 - F(x)`: the log of `√(f(x')f(y')) / f(√(x'y'))`
/// for `x' = te^h`, `y' = te^{-h}`.
pub fn midpoint_gap<F: PositiveFunction + ?Sized>(f: &F, x: f64, h: f64) -> Result<f64> {
    let c = f.log_eval(x)?;
    let l = f.log_eval(x - h)?;
    let r = f.log_eval(x + h)?;
    Ok(0.5 * (l + r) - c)
}

/// `ln f(t^r) - r ln f(t)` at `x = ln t`.
pub fn power_gap<F: PositiveFunction + ?Sized>(f: &F, x: f64, r: f64) -> Result<f64> {
    Ok(f.log_eval(r * x)? - r * f.log_eval(x)?)
}

/// `f'(1)` by a once-Richardson-extrapolated central difference, with the
/// spread between the two last estimates.
pub fn derivative_at_one<F: PositiveFunction + ?Sized>(f: &F, tol: &ToleranceConfig) -> Result<(f64, f64)> {
    derivative_at(f, 1.0, tol)
}

pub(crate) fn derivative_at<F: PositiveFunction + ?Sized>(f: &F, t: f64, tol: &ToleranceConfig) -> Result<(f64, f64)> {
    let central = |h: f64| -> Result<f64> { Ok((f.eval(t + h)? - f.eval(t - h)?) / (2.0 * h)) };
    let h = tol.fd_step * t;
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    let refined = (4.0 * fine - coarse) / 3.0;
    let spread = (refined - fine).abs();
    if spread > tol.derivative_tol || !refined.is_finite() {
        return Err(Error::Derivative { spread, tol: tol.derivative_tol });
    }
    Ok((refined, spread))
}

#[derive(Clone, Copy)]
enum Sense {
    /// violated when the statistic drops below `-slack`
    AtLeastZero,
    /// violated when the statistic exceeds `slack`
    AtMostZero,
}

/// Scans `stat` over `xs`, refines the worst point by golden-section search
/// between its neighbours and reports it.
fn scan<S: Fn(f64) -> Result<f64>>(stat: S, xs: &[f64], sense: Sense) -> Result<(f64, f64)> {
    let signed = |v: f64| match sense {
        Sense::AtLeastZero => v,
        Sense::AtMostZero => -v,
    };
    let mut worst = (0usize, f64::INFINITY);
    for (i, &x) in xs.iter().enumerate() {
        let v = signed(stat(x)?);
        if v < worst.1 {
            worst = (i, v);
        }
    }
    let i = worst.0;
    let lo = xs[i.saturating_sub(1)];
    let hi = xs[(i + 1).min(xs.len() - 1)];
    let (xr, vr) = golden_section_min(|x| stat(x).map(signed).unwrap_or(f64::INFINITY), lo, hi, 200);
    let (x, v) = if vr < worst.1 { (xr, vr) } else { (xs[i], worst.1) };
    Ok((x, signed(v)))
}

fn finish(
    property: Property,
    violated: bool,
    extreme: Witness,
    derivative_at_one: Option<f64>,
    grid: &GridSpec,
    tol: &ToleranceConfig,
) -> ClassificationReport {
    ClassificationReport {
        property,
        verdict: if violated { Verdict::Violated } else { Verdict::HoldsOnGrid },
        witness: violated.then_some(extreme),
        extreme,
        derivative_at_one,
        grid: grid.clone(),
        tolerances: *tol,
    }
}

fn check_convexity<F: PositiveFunction + ?Sized>(
    f: &F,
    grid: &GridSpec,
    tol: &ToleranceConfig,
    property: Property,
    sense: Sense,
) -> Result<ClassificationReport> {
    grid.validate()?;
    tol.validate()?;
    let xs = grid.log_points();
    let h = grid.log_spacing();
    let (x, v) = scan(|x| midpoint_gap(f, x, h), &xs[1..xs.len() - 1], sense)?;
    let violated = match sense {
        Sense::AtLeastZero => v < -tol.criterion_slack,
        Sense::AtMostZero => v > tol.criterion_slack,
    };
    Ok(finish(property, violated, Witness { t: x.exp(), r: None, value: v }, None, grid, tol))
}

/// Geometric convexity: `x ↦ ln f(e^x)` convex, tested through midpoint
/// gaps at the grid spacing.
pub fn check_gcv<F: PositiveFunction + ?Sized>(f: &F, grid: &GridSpec, tol: &ToleranceConfig) -> Result<ClassificationReport> {
    check_convexity(f, grid, tol, Property::Gcv, Sense::AtLeastZero)
}

/// Geometric concavity, the mirror of [`check_gcv`].
pub fn check_gcc<F: PositiveFunction + ?Sized>(f: &F, grid: &GridSpec, tol: &ToleranceConfig) -> Result<ClassificationReport> {
    check_convexity(f, grid, tol, Property::Gcc, Sense::AtMostZero)
}

fn check_power<F: PositiveFunction + ?Sized>(
    f: &F,
    grid: &GridSpec,
    tol: &ToleranceConfig,
    r_values: &[f64],
    property: Property,
    sense: Sense,
) -> Result<ClassificationReport> {
    grid.validate()?;
    tol.validate()?;
    if r_values.is_empty() {
        return Err(Error::Grid("no r values".into()));
    }
    let xs = grid.log_points();
    let mut extreme: Option<Witness> = None;
    for &r in r_values {
        if !(r >= 1.0 && r.is_finite()) {
            return Err(Error::Grid(format!("r = {r} must be >= 1")));
        }
        let (x, v) = scan(|x| power_gap(f, x, r), &xs, sense)?;
        let adverse = |w: &Witness| match sense {
            Sense::AtLeastZero => v < w.value,
            Sense::AtMostZero => v > w.value,
        };
        if extreme.as_ref().is_none_or(adverse) {
            extreme = Some(Witness { t: x.exp(), r: Some(r), value: v });
        }
    }
    let extreme = extreme.expect("at least one r");
    let violated = match sense {
        Sense::AtLeastZero => extreme.value < -tol.criterion_slack,
        Sense::AtMostZero => extreme.value > tol.criterion_slack,
    };
    Ok(finish(property, violated, extreme, None, grid, tol))
}

/// Power monotone increase: `f(t)^r <= f(t^r)` over the grid's `(t, r)`.
pub fn check_pmi<F: PositiveFunction + ?Sized>(f: &F, grid: &GridSpec, tol: &ToleranceConfig) -> Result<ClassificationReport> {
    check_power(f, grid, tol, &grid.r_values, Property::Pmi, Sense::AtLeastZero)
}

/// Power monotone decrease: `f(t)^r >= f(t^r)`.
pub fn check_pmd<F: PositiveFunction + ?Sized>(f: &F, grid: &GridSpec, tol: &ToleranceConfig) -> Result<ClassificationReport> {
    check_power(f, grid, tol, &grid.r_values, Property::Pmd, Sense::AtMostZero)
}

/// `f(t^r) >= f(t)^r` for a single `r > 1`.
pub fn check_pmi_r<F: PositiveFunction + ?Sized>(f: &F, r: f64, grid: &GridSpec, tol: &ToleranceConfig) -> Result<ClassificationReport> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::Parameter(format!("PMI_r needs r > 1, got {r}")));
    }
    check_power(f, grid, tol, &[r], Property::PmiR(r), Sense::AtLeastZero)
}

/// `f(t) >= t^{f'(1)}`, with `f'(1)` estimated numerically. The allowed
/// shortfall at `x = ln t` is `slack + spread·|x|`, where `spread` bounds
/// the error of the derivative estimate.
pub fn check_pmi_inf<F: PositiveFunction + ?Sized>(f: &F, grid: &GridSpec, tol: &ToleranceConfig) -> Result<ClassificationReport> {
    grid.validate()?;
    tol.validate()?;
    let (d, spread) = derivative_at_one(f, tol)?;
    let xs = grid.log_points();
    // normalize by the allowance so the scan finds the worst relative shortfall
    let allowance = |x: f64| tol.criterion_slack + spread * x.abs();
    let (x, _) = scan(|x| Ok((f.log_eval(x)? - d * x) / allowance(x)), &xs, Sense::AtLeastZero)?;
    let value = f.log_eval(x)? - d * x;
    let violated = value < -allowance(x);
    Ok(finish(Property::PmiInf, violated, Witness { t: x.exp(), r: None, value }, Some(d), grid, tol))
}

/// Point sets probed by the `OM_loewner` property: 8 log-spaced points over
/// the whole grid, the lower half, the upper half and `[0.1, 10]`.
fn loewner_point_sets(grid: &GridSpec) -> Vec<Vec<f64>> {
    let spans = [(grid.t_min, grid.t_max), (grid.t_min, 1.0), (1.0, grid.t_max), (0.1, 10.0)];
    spans
        .iter()
        .map(|&(lo, hi)| log_grid(lo, hi, 8).into_iter().map(f64::exp).collect())
        .collect()
}

/// Threshold below which a Loewner matrix eigenvalue certifies
/// non-monotonicity.
pub const LOEWNER_TOL: f64 = 1e-8;

pub fn check_loewner<F: PositiveFunction + ?Sized>(f: &F, grid: &GridSpec, tol: &ToleranceConfig) -> Result<ClassificationReport> {
    grid.validate()?;
    tol.validate()?;
    let mut extreme: Option<Witness> = None;
    for points in loewner_point_sets(grid) {
        let v = loewner_test(f, &points, tol)?;
        if extreme.as_ref().is_none_or(|w| v < w.value) {
            extreme = Some(Witness { t: points[0], r: None, value: v });
        }
    }
    let extreme = extreme.expect("non-empty point sets");
    Ok(finish(Property::OmLoewner, extreme.value < -LOEWNER_TOL, extreme, None, grid, tol))
}

/// Runs the checker for `property`.
pub fn check<F: PositiveFunction + ?Sized>(
    property: Property,
    f: &F,
    grid: &GridSpec,
    tol: &ToleranceConfig,
) -> Result<ClassificationReport> {
    match property {
        Property::OmLoewner => check_loewner(f, grid, tol),
        Property::Gcv => check_gcv(f, grid, tol),
        Property::Gcc => check_gcc(f, grid, tol),
        Property::Pmi => check_pmi(f, grid, tol),
        Property::Pmd => check_pmd(f, grid, tol),
        Property::PmiR(r) => check_pmi_r(f, r, grid, tol),
        Property::PmiInf => check_pmi_inf(f, grid, tol),
    }
}

/// Recomputes the statistic of `report.property` at the report's witness.
pub fn witness_statistic<F: PositiveFunction + ?Sized>(f: &F, report: &ClassificationReport) -> Result<f64> {
    let w = report.witness.ok_or_else(|| Error::Parameter("report has no witness".into()))?;
    let x = w.t.ln();
    match report.property {
        Property::Gcv | Property::Gcc => midpoint_gap(f, x, report.grid.log_spacing()),
        Property::Pmi | Property::Pmd | Property::PmiR(_) => {
            power_gap(f, x, w.r.ok_or_else(|| Error::Parameter("witness lacks r".into()))?)
        }
        Property::PmiInf => {
            let (d, _) = derivative_at_one(f, &report.tolerances)?;
            Ok(f.log_eval(x)? - d * x)
        }
        Property::OmLoewner => {
            let points = loewner_point_sets(&report.grid)
                .into_iter()
                .find(|p| p[0] == w.t)
                .ok_or_else(|| Error::Parameter("witness does not match a probed point set".into()))?;
            loewner_test(f, &points, &report.tolerances)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::means::{adjoint, MeanFunction, ScalarFn};

    fn std_check(p: Property, f: &MeanFunction) -> ClassificationReport {
        check(p, f, &GridSpec::default(), &ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn default_r_values_are_the_documented_set() {
        assert_eq!(
            default_r_values(),
            vec![1.015625, 1.03125, 1.0625, 1.125, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0]
        );
    }

    #[test]
    fn power_is_in_every_class() {
        for alpha in [0.0, 0.25, 0.5, 1.0] {
            let f = MeanFunction::power(alpha).unwrap();
            for p in [Property::Gcv, Property::Gcc, Property::Pmi, Property::Pmd, Property::PmiInf, Property::OmLoewner] {
                assert!(std_check(p, &f).holds(), "{p} for t^{alpha}");
            }
            let pmi = std_check(Property::Pmi, &f);
            assert!(pmi.extreme.value.abs() < 1e-12);
        }
    }

    #[test]
    fn uab_gcv_follows_absolute_values() {
        let yes = MeanFunction::uab(1.0, 0.5).unwrap();
        assert!(std_check(Property::Gcv, &yes).holds());
        assert!(!std_check(Property::Gcc, &yes).holds());
        let no = MeanFunction::uab(0.25, -0.5).unwrap();
        let rep = std_check(Property::Gcv, &no);
        assert_eq!(rep.verdict, Verdict::Violated);
        assert!(std_check(Property::Gcc, &no).holds());
    }

    #[test]
    fn stolarsky_gcv_and_gcc() {
        for alpha in [-1.0, -0.5, 0.0, 1.0, 1.5, 2.0] {
            assert!(std_check(Property::Gcv, &MeanFunction::stolarsky(alpha).unwrap()).holds(), "{alpha}");
        }
        for alpha in [-2.0, -1.5] {
            let f = MeanFunction::stolarsky(alpha).unwrap();
            assert!(!std_check(Property::Gcv, &f).holds());
            assert!(std_check(Property::Gcc, &f).holds());
        }
    }

    #[test]
    fn section5_example_separates() {
        let f = MeanFunction::section5_example();
        let rep = std_check(Property::PmiR(2.0), &f);
        assert_eq!(rep.verdict, Verdict::Violated);
        let w = rep.witness.unwrap();
        assert!(w.t < 1e-2, "witness at small t, got {}", w.t);
        let ratio = (power_gap(&f, w.t.ln(), 2.0).unwrap()).exp();
        assert!(ratio < 1.0);
        let inf = std_check(Property::PmiInf, &f);
        assert!(inf.holds());
        assert!((inf.derivative_at_one.unwrap() - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn arithmetic_mean_pmi_inf_matches_am_gm() {
        let f = MeanFunction::arithmetic();
        let rep = std_check(Property::PmiInf, &f);
        assert!(rep.holds());
        assert!((rep.derivative_at_one.unwrap() - 0.5).abs() < 1e-10);
        for x in GridSpec::default().log_points() {
            let t = x.exp();
            assert!((1.0 + t) / 2.0 >= t.sqrt() * (1.0 - 1e-15));
        }
    }

    #[test]
    fn witnesses_reproduce() {
        let cases = [
            (Property::Gcv, MeanFunction::harmonic()),
            (Property::Gcc, MeanFunction::arithmetic()),
            (Property::Pmi, MeanFunction::harmonic()),
            (Property::Pmd, MeanFunction::arithmetic()),
            (Property::PmiR(3.0), MeanFunction::section5_example()),
            (Property::Gcv, MeanFunction::hansen(crate::hansen::theorem_counterexample())),
        ];
        for (p, f) in cases {
            let rep = std_check(p, &f);
            assert_eq!(rep.verdict, Verdict::Violated, "{p}");
            let again = witness_statistic(&f, &rep).unwrap();
            assert!((again - rep.witness.unwrap().value).abs() < 1e-14);
            let slack = rep.tolerances.criterion_slack;
            match p {
                Property::Gcc | Property::Pmd => assert!(again > slack),
                _ => assert!(again < -slack),
            }
        }
    }

    #[test]
    fn adjoint_swaps_classes() {
        let f = MeanFunction::binomial(0.4).unwrap();
        assert!(std_check(Property::Gcv, &f).holds());
        assert!(std_check(Property::Gcc, &adjoint(f.clone())).holds());
        assert!(std_check(Property::Pmd, &adjoint(f)).holds());
    }

    #[test]
    fn pmi_with_r_one_is_degenerate() {
        let f = MeanFunction::section5_example();
        let grid = GridSpec::default().with_r_values(vec![1.0]);
        let rep = check_pmi(&f, &grid, &ToleranceConfig::default()).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.extreme.value, 0.0);
    }

    #[test]
    fn gcc_sum_is_not_gcc() {
        let harmonic = ScalarFn(|t: f64| 2.0 * t / (t + 1.0));
        let square = ScalarFn(|t: f64| t * t);
        let sum = ScalarFn(|t: f64| 2.0 * t / (t + 1.0) + t * t);
        let (g, tol) = (GridSpec::default(), ToleranceConfig::default());
        assert!(check_gcc(&harmonic, &g, &tol).unwrap().holds());
        assert!(check_gcc(&square, &g, &tol).unwrap().holds());
        assert_eq!(check_gcc(&sum, &g, &tol).unwrap().verdict, Verdict::Violated);
    }

    #[test]
    fn property_names() {
        for p in [Property::OmLoewner, Property::Gcv, Property::Gcc, Property::Pmi, Property::Pmd, Property::PmiR(2.5), Property::PmiInf] {
            assert_eq!(p.to_string().parse::<Property>().unwrap(), p);
        }
        assert_eq!("gcv".parse::<Property>().unwrap(), Property::Gcv);
        assert!("pmi_r(0.5)".parse::<Property>().is_err());
        assert!("nope".parse::<Property>().is_err());
    }

    #[test]
    fn grid_validation() {
        let g = GridSpec { t_min: 2.0, ..GridSpec::default() };
        assert!(g.validate().is_err());
        let g = GridSpec { n_points: 2, ..GridSpec::default() };
        assert!(g.validate().is_err());
        let g = GridSpec::default().with_r_values(vec![0.5]);
        assert!(g.validate().is_err());
        let f = MeanFunction::arithmetic();
        assert!(check_pmi_r(&f, 1.0, &GridSpec::default(), &ToleranceConfig::default()).is_err());
    }

    #[test]
    fn report_json_shape() {
        let rep = std_check(Property::PmiR(2.0), &MeanFunction::section5_example());
        let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["property"], "PMI_r(2)");
        assert_eq!(v["verdict"], "violated");
        assert!(v["witness"]["t"].is_number());
        assert_eq!(v["witness"]["r"], 2.0);
        assert_eq!(v["grid"]["n_points"], 241);
        assert_eq!(v["tolerances"]["criterion_slack"], 1e-10);
        let back: ClassificationReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, rep);
        let ok = std_check(Property::Gcv, &MeanFunction::arithmetic());
        assert!(serde_json::to_value(&ok).unwrap()["witness"].is_null());
    }
}
