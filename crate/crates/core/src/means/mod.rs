//! Representation functions of operator means and the operations that build
//! new ones from old.
//!
//! Every function is evaluated in logarithmic coordinates, `F(x) = ln f(e^x)`.
//! Geometric convexity is convexity of `F`, power monotonicity compares
//! `F(rx)` with `rF(x)`, and extreme arguments never overflow.

mod gamma;
mod geodesic;
mod inverse;

pub use gamma::gamma_contains;
pub use geodesic::{geodesic_eval, Atom, BetaPart, GeodesicMeasure};
pub use inverse::{numeric_inverse, PolynomialU, INVERSE_BRACKET, WIDE_INVERSE_BRACKET};

use crate::error::{Error, Result};
use crate::hansen::HansenDensity;
use crate::numeric::{log_add_exp, ln_expm1_ratio, ln_expm1_ratio_d1, ln_expm1_ratio_d2};

const SEAM: f64 = 1e-6;

pub(crate) fn check_argument(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(t))
    }
}

/// A positive function on `(0, ∞)`, accessed through `x ↦ ln f(e^x)`.
pub trait PositiveFunction {
    fn log_eval(&self, x: f64) -> Result<f64>;

    fn eval(&self, t: f64) -> Result<f64> {
        check_argument(t)?;
        let v = self.log_eval(t.ln())?.exp();
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation(t))
        }
    }
}

impl<T: PositiveFunction + ?Sized> PositiveFunction for &T {
    fn log_eval(&self, x: f64) -> Result<f64> {
        (**self).log_eval(x)
    }
}

/// Wraps a plain closure `t ↦ f(t)` (for test functions such as `t²`).
pub struct ScalarFn<F>(pub F);

impl<F: Fn(f64) -> f64> PositiveFunction for ScalarFn<F> {
    fn log_eval(&self, x: f64) -> Result<f64> {
        let t = x.exp();
        let v = (self.0)(t);
        if v > 0.0 && v.is_finite() {
            Ok(v.ln())
        } else {
            Err(Error::Evaluation(t))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompositeOp {
    /// `f·g`
    Product,
    /// `f^e`, `e > 0`
    Power(f64),
    /// `f·h(g/f)` with operands `[f, g, h]`
    Sigma,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeanFunction {
    /// `t^α`, `α ∈ [0, 1]`
    Power { alpha: f64 },
    /// `((t^p + 1)/2)^{1/p}`, `p ∈ [-1, 1]`, `√t` at `p = 0`
    Binomial { p: f64 },
    /// `(b/a)(t^a - 1)/(t^b - 1)` for `(a, b)` in the Γ region
    Uab { a: f64, b: f64 },
    /// `S_α(1, t)`, `α ∈ [-2, 2]`
    Stolarsky { alpha: f64 },
    Geodesic(GeodesicMeasure),
    Hansen(HansenDensity),
    PolynomialU(PolynomialU),
    /// `((1/3)t + (2/3)t^{1/3}) / ((1/3) + (2/3)t^{1/3})`
    Section5Example,
    Composite { op: CompositeOp, operands: Vec<MeanFunction> },
    /// `1 / f(1/t)`
    Adjoint(Box<MeanFunction>),
    /// Functional inverse of `t ↦ t^shift · f(t)`
    InverseOf { inner: Box<MeanFunction>, shift: f64 },
}

impl MeanFunction {
    pub fn power(alpha: f64) -> Result<Self> {
        Self::checked(MeanFunction::Power { alpha })
    }

    pub fn binomial(p: f64) -> Result<Self> {
        Self::checked(MeanFunction::Binomial { p })
    }

    pub fn uab(a: f64, b: f64) -> Result<Self> {
        Self::checked(MeanFunction::Uab { a, b })
    }

    pub fn stolarsky(alpha: f64) -> Result<Self> {
        Self::checked(MeanFunction::Stolarsky { alpha })
    }

    /// `(1 + t)/2`
    pub fn arithmetic() -> Self {
        MeanFunction::Binomial { p: 1.0 }
    }

    /// `2t/(1 + t)`
    pub fn harmonic() -> Self {
        MeanFunction::Binomial { p: -1.0 }
    }

    pub fn geodesic(measure: GeodesicMeasure) -> Self {
        MeanFunction::Geodesic(measure)
    }

    pub fn hansen(density: HansenDensity) -> Self {
        MeanFunction::Hansen(density)
    }

    pub fn section5_example() -> Self {
        MeanFunction::Section5Example
    }

    pub fn product(f: MeanFunction, g: MeanFunction) -> Self {
        MeanFunction::Composite { op: CompositeOp::Product, operands: vec![f, g] }
    }

    pub fn pow(f: MeanFunction, exponent: f64) -> Result<Self> {
        Self::checked(MeanFunction::Composite { op: CompositeOp::Power(exponent), operands: vec![f] })
    }

    pub fn inverse_of(inner: MeanFunction, shift: f64) -> Result<Self> {
        Self::checked(MeanFunction::InverseOf { inner: Box::new(inner), shift })
    }

    fn checked(f: MeanFunction) -> Result<Self> {
        f.validate()?;
        Ok(f)
    }

    /// Checks family parameter domains, recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            MeanFunction::Power { alpha } => {
                if !(0.0..=1.0).contains(alpha) {
                    return Err(Error::Parameter(format!("power exponent {alpha} outside [0, 1]")));
                }
            }
            MeanFunction::Binomial { p } => {
                if !(-1.0..=1.0).contains(p) {
                    return Err(Error::Parameter(format!("binomial p = {p} outside [-1, 1]")));
                }
            }
            MeanFunction::Uab { a, b } => {
                if !gamma_contains(*a, *b) {
                    return Err(Error::Parameter(format!("(a, b) = ({a}, {b}) is outside the Γ region")));
                }
            }
            MeanFunction::Stolarsky { alpha } => {
                if !(-2.0..=2.0).contains(alpha) {
                    return Err(Error::Parameter(format!("Stolarsky α = {alpha} outside [-2, 2]")));
                }
            }
            MeanFunction::Geodesic(_)
            | MeanFunction::Hansen(_)
            | MeanFunction::PolynomialU(_)
            | MeanFunction::Section5Example => {}
            MeanFunction::Composite { op, operands } => {
                let arity = match op {
                    CompositeOp::Product => 2,
                    CompositeOp::Power(e) => {
                        if !(*e > 0.0 && e.is_finite()) {
                            return Err(Error::Parameter(format!("composite exponent {e} must be > 0")));
                        }
                        1
                    }
                    CompositeOp::Sigma => 3,
                };
                if operands.len() != arity {
                    return Err(Error::Parameter(format!(
                        "{op:?} needs {arity} operands, got {}",
                        operands.len()
                    )));
                }
                for f in operands {
                    f.validate()?;
                }
            }
            MeanFunction::Adjoint(inner) => inner.validate()?,
            MeanFunction::InverseOf { inner, shift } => {
                if !(*shift >= 0.0 && shift.is_finite()) {
                    return Err(Error::Parameter(format!("inverse shift {shift} must be >= 0")));
                }
                inner.validate()?;
            }
        }
        Ok(())
    }

    /// Whether the function is a normalized operator monotone function, as
    /// opposed to an auxiliary positive function built by the closure
    /// operations (products, large powers, `u`).
    pub fn is_mean(&self) -> bool {
        match self {
            MeanFunction::PolynomialU(_) => false,
            MeanFunction::Composite { op, operands } => match op {
                CompositeOp::Product => false,
                CompositeOp::Power(e) => *e <= 1.0 && operands[0].is_mean(),
                CompositeOp::Sigma => operands.iter().all(MeanFunction::is_mean),
            },
            MeanFunction::Adjoint(inner) => inner.is_mean(),
            MeanFunction::InverseOf { inner, shift } => match inner.as_ref() {
                MeanFunction::PolynomialU(_) => *shift == 0.0,
                other => *shift >= 1.0 && other.is_mean(),
            },
            _ => true,
        }
    }
}

/// `t ↦ 1/f(1/t)`.
pub fn adjoint(f: MeanFunction) -> MeanFunction {
    MeanFunction::Adjoint(Box::new(f))
}

/// `t ↦ f(t)·h(g(t)/f(t))`.
pub fn compose_sigma(f: MeanFunction, g: MeanFunction, h: MeanFunction) -> MeanFunction {
    MeanFunction::Composite { op: CompositeOp::Sigma, operands: vec![f, g, h] }
}

fn binomial_log(p: f64, x: f64) -> f64 {
    if p == 0.0 {
        return 0.5 * x;
    }
    if p.abs() < SEAM {
        return 0.5 * x + p * x * x / 8.0 - p * p * p * x.powi(4) / 192.0;
    }
    let y = p * x;
    let l = if y.abs() < 1.0 {
        (0.5 * y.exp_m1()).ln_1p()
    } else {
        y.max(0.0) + (-y.abs()).exp().ln_1p() - std::f64::consts::LN_2
    };
    l / p
}

fn stolarsky_log(alpha: f64, x: f64) -> f64 {
    let d = alpha - 1.0;
    if d.abs() < SEAM {
        x * ln_expm1_ratio_d1(x) + 0.5 * d * x * x * ln_expm1_ratio_d2(x)
    } else {
        (ln_expm1_ratio(alpha * x) - ln_expm1_ratio(x)) / d
    }
}

fn section5_log(x: f64) -> f64 {
    let ln3 = 3f64.ln();
    let cube = x / 3.0 + (2.0f64 / 3.0).ln();
    log_add_exp(x - ln3, cube) - log_add_exp(-ln3, cube)
}

impl PositiveFunction for MeanFunction {
    fn log_eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::Domain(f64::NAN));
        }
        let v = match self {
            MeanFunction::Power { alpha } => {
                self.validate()?;
                alpha * x
            }
            MeanFunction::Binomial { p } => {
                self.validate()?;
                binomial_log(*p, x)
            }
            MeanFunction::Uab { a, b } => {
                self.validate()?;
                ln_expm1_ratio(a * x) - ln_expm1_ratio(b * x)
            }
            MeanFunction::Stolarsky { alpha } => {
                self.validate()?;
                stolarsky_log(*alpha, x)
            }
            MeanFunction::Geodesic(m) => m.log_eval(x),
            MeanFunction::Hansen(h) => h.log_eval(x),
            MeanFunction::PolynomialU(u) => u.log_eval_raw(x),
            MeanFunction::Section5Example => section5_log(x),
            MeanFunction::Composite { op, operands } => {
                self.validate()?;
                match op {
                    CompositeOp::Product => operands[0].log_eval(x)? + operands[1].log_eval(x)?,
                    CompositeOp::Power(e) => e * operands[0].log_eval(x)?,
                    CompositeOp::Sigma => {
                        let lf = operands[0].log_eval(x)?;
                        let lg = operands[1].log_eval(x)?;
                        lf + operands[2].log_eval(lg - lf)?
                    }
                }
            }
            MeanFunction::Adjoint(inner) => -inner.log_eval(-x)?,
            MeanFunction::InverseOf { inner, shift } => {
                self.validate()?;
                inverse::log_inverse(inner.as_ref(), *shift, x, inverse::WIDE_INVERSE_BRACKET)?
            }
        };
        if v.is_nan() {
            return Err(Error::Evaluation(x.exp()));
        }
        Ok(v)
    }
}
