use super::{check_argument, PositiveFunction};
use crate::error::{Error, Result};
use crate::numeric::{log_add_exp, solve_increasing};

/// Search bracket of [`numeric_inverse`], in `t`.
pub const INVERSE_BRACKET: (f64, f64) = (1e-12, 1e12);
/// Bracket used when an inverse is evaluated as a mean function, where
/// power tests reach arguments like `t^10` for `t` in `[1e-4, 1e4]`.
pub const WIDE_INVERSE_BRACKET: (f64, f64) = (1e-300, 1e300);
const MAX_ITERATIONS: usize = 200;
const LOG_TOLERANCE: f64 = 1e-14;

/// `u(t) = β ∏ (t + a_i)^{γ_i}` with `0 = a_1 < a_2 < ... < a_n`, `γ_1 >= 1`,
/// `γ_i > 0` and `β > 0`.
///
/// `u` maps `(0, ∞)` onto itself; it is not a mean, but its inverse is one
/// when `u(1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialU {
    beta: f64,
    roots: Vec<f64>,
    exponents: Vec<f64>,
}

impl PolynomialU {
    pub fn new(beta: f64, roots: Vec<f64>, exponents: Vec<f64>) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Parameter(format!("beta = {beta} must be positive")));
        }
        if roots.is_empty() || roots.len() != exponents.len() {
            return Err(Error::Parameter("roots and exponents must be non-empty and of equal length".into()));
        }
        if roots[0] != 0.0 {
            return Err(Error::Parameter("first root must be 0".into()));
        }
        if roots.windows(2).any(|w| !(w[0] < w[1])) || roots.iter().any(|r| !r.is_finite()) {
            return Err(Error::Parameter("roots must be finite and strictly increasing".into()));
        }
        if !(exponents[0] >= 1.0) || exponents.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(Error::Parameter("exponents must be positive with the first >= 1".into()));
        }
        Ok(PolynomialU { beta, roots, exponents })
    }

    /// Same shape with `β` chosen so that `u(1) = 1`.
    pub fn normalized(roots: Vec<f64>, exponents: Vec<f64>) -> Result<Self> {
        let probe = Self::new(1.0, roots, exponents)?;
        let ln_at_one = probe.log_eval_raw(0.0);
        Self::new((-ln_at_one).exp(), probe.roots, probe.exponents)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub(crate) fn log_eval_raw(&self, x: f64) -> f64 {
        let mut acc = self.beta.ln();
        for (&a, &g) in self.roots.iter().zip(&self.exponents) {
            let term = if a == 0.0 { x } else { log_add_exp(x, a.ln()) };
            acc += g * term;
        }
        acc
    }
}

/// Solves `shift·y + F(y) = x` for `y`, where `F(y) = ln f(e^y)`.
pub(crate) fn log_inverse<F: PositiveFunction + ?Sized>(f: &F, shift: f64, x: f64, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = (bracket.0.ln(), bracket.1.ln());
    solve_increasing(
        |y| Ok(shift * y + f.log_eval(y)?),
        x,
        lo,
        hi,
        LOG_TOLERANCE,
        MAX_ITERATIONS,
    )
    .map_err(|e| match e {
        Error::Bracket { .. } => Error::Bracket { lo: bracket.0, hi: bracket.1, target: x.exp() },
        other => other,
    })
}

/// The `t` with `t^shift · f(t) = s`.
pub fn numeric_inverse<F: PositiveFunction + ?Sized>(f: &F, shift: f64, s: f64) -> Result<f64> {
    check_argument(s)?;
    if !(shift >= 0.0 && shift.is_finite()) {
        return Err(Error::Parameter(format!("shift {shift} must be >= 0")));
    }
    Ok(log_inverse(f, shift, s.ln(), INVERSE_BRACKET)?.exp())
}
