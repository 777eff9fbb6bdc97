//! Integral representation of normalized operator monotone functions by a
//! weight `h : (-∞, 0] → [0, 1]`:
//!
//! ```text
//! f(t) = exp ∫_{-∞}^0 ( 1/(λ - t) - 1/(λ - 1) ) h(λ) dλ
//! ```
//!
//! Weights are piecewise constant, so every integral has a closed form per
//! piece. A quadrature route over `w = 1/(1 - λ) ∈ (0, 1]` is kept as an
//! independent check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::means::PositiveFunction;
use crate::numeric::{adaptive_simpson, log_add_exp};

pub const MAX_PIECES: usize = 64;
const QUADRATURE_TOL: f64 = 1e-9;

/// `h = value` on `(from, to)`; `from` may be `-∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPiece {
    pub from: f64,
    pub to: f64,
    pub value: f64,
}

/// Piecewise-constant weight with disjoint pieces inside `(-∞, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PieceLiteral>", into = "Vec<PieceLiteral>")]
pub struct HansenDensity {
    pieces: Vec<DensityPiece>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum BoundLiteral {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceLiteral {
    from: BoundLiteral,
    to: f64,
    value: f64,
}

impl TryFrom<Vec<PieceLiteral>> for HansenDensity {
    type Error = Error;

    fn try_from(literals: Vec<PieceLiteral>) -> Result<Self> {
        let pieces = literals
            .into_iter()
            .map(|p| {
                let from = match p.from {
                    BoundLiteral::Number(v) => v,
                    BoundLiteral::Text(s) if s == "-inf" => f64::NEG_INFINITY,
                    BoundLiteral::Text(s) => {
                        return Err(Error::Density(format!("unknown bound {s:?}, expected a number or \"-inf\"")))
                    }
                };
                Ok(DensityPiece { from, to: p.to, value: p.value })
            })
            .collect::<Result<Vec<_>>>()?;
        HansenDensity::new(pieces)
    }
}

impl From<HansenDensity> for Vec<PieceLiteral> {
    fn from(h: HansenDensity) -> Self {
        h.pieces
            .into_iter()
            .map(|p| PieceLiteral {
                from: if p.from == f64::NEG_INFINITY {
                    BoundLiteral::Text("-inf".into())
                } else {
                    BoundLiteral::Number(p.from)
                },
                to: p.to,
                value: p.value,
            })
            .collect()
    }
}

impl HansenDensity {
    pub fn new(mut pieces: Vec<DensityPiece>) -> Result<Self> {
        if pieces.len() > MAX_PIECES {
            return Err(Error::Density(format!("{} pieces exceed the limit of {MAX_PIECES}", pieces.len())));
        }
        for p in &pieces {
            if p.from.is_nan() || p.from == f64::INFINITY || !p.to.is_finite() {
                return Err(Error::Density(format!("bad interval ({}, {})", p.from, p.to)));
            }
            if !(p.from < p.to) {
                return Err(Error::Density(format!("empty interval ({}, {})", p.from, p.to)));
            }
            if p.to > 0.0 {
                return Err(Error::Density(format!("interval ({}, {}) leaves (-inf, 0]", p.from, p.to)));
            }
            if !(0.0..=1.0).contains(&p.value) {
                return Err(Error::Density(format!("value {} outside [0, 1]", p.value)));
            }
        }
        pieces.sort_by(|a, b| a.from.total_cmp(&b.from));
        if pieces.windows(2).any(|w| w[0].to > w[1].from) {
            return Err(Error::Density("intervals overlap".into()));
        }
        Ok(HansenDensity { pieces })
    }

    /// `h = value` on `(from, to)`.
    pub fn single(from: f64, to: f64, value: f64) -> Result<Self> {
        Self::new(vec![DensityPiece { from, to, value }])
    }

    pub fn pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("density serializes")
    }

    /// `F(x) = ln f(e^x)` from the per-piece antiderivative
    /// `ln((t - λ)/(1 - λ))`, which vanishes at `λ = -∞`.
    pub fn log_eval(&self, x: f64) -> f64 {
        let anti = |lambda: f64| {
            if lambda == f64::NEG_INFINITY {
                0.0
            } else {
                ln_shift(x, lambda) - (-lambda).ln_1p()
            }
        };
        self.pieces.iter().map(|p| p.value * (anti(p.to) - anti(p.from))).sum()
    }

    /// `ln f(t^r) - r ln f(t)` via the antiderivative
    /// `ln(t^r - λ) - r ln(t - λ) + (r - 1) ln(1 - λ)`.
    fn pmi_closed(&self, x: f64, r: f64) -> f64 {
        let anti = |lambda: f64| {
            if lambda == f64::NEG_INFINITY {
                0.0
            } else {
                ln_shift(r * x, lambda) - r * ln_shift(x, lambda) + (r - 1.0) * (-lambda).ln_1p()
            }
        };
        self.pieces.iter().map(|p| p.value * (anti(p.to) - anti(p.from))).sum()
    }

    /// `∫ (λ + t)/(λ - t)^3 h(λ) dλ` via the antiderivative
    /// `-1/(λ - t) - t/(λ - t)^2 = -λ/(t - λ)^2`.
    fn gcv_closed(&self, t: f64) -> f64 {
        let anti = |lambda: f64| {
            if lambda == f64::NEG_INFINITY || lambda == 0.0 {
                0.0
            } else {
                let m = -lambda;
                m / ((t + m) * (t + m))
            }
        };
        self.pieces.iter().map(|p| p.value * (anti(p.to) - anti(p.from))).sum()
    }

    /// `Σ h_i ∫ kernel(w, 1 - w) dw` over the pieces mapped to
    /// `w = 1/(1-λ)`. The kernel has poles at the zeros of `1 + (s-1)w`,
    /// `s ∈ pole_params`, all outside `[0, 1]`.
    fn integrate<K: Fn(f64, f64) -> f64>(&self, kernel: K, pole_params: &[f64]) -> f64 {
        self.pieces
            .iter()
            .filter(|p| p.value != 0.0)
            .map(|p| {
                let from = if p.from == f64::NEG_INFINITY { (0.0, 1.0) } else { (1.0 / (1.0 - p.from), -p.from / (1.0 - p.from)) };
                let to = (1.0 / (1.0 - p.to), -p.to / (1.0 - p.to));
                p.value * integrate_near_poles(&kernel, from, to, pole_params)
            })
            .sum()
    }
}

/// Each half of `[a, b]` is integrated in the variable
/// `v = ln(distance to the nearest pole beyond its outer endpoint)` when
/// that pole is closer than the half-width, which resolves the
/// `1/(w - w*)` growth at the scale of the distance. Points carry their
/// complements `1 - w` so that no distance is formed by cancellation.
fn integrate_near_poles<K: Fn(f64, f64) -> f64>(kernel: &K, (a, ac): (f64, f64), (b, bc): (f64, f64), pole_params: &[f64]) -> f64 {
    if a >= b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let half = m - a;
    // the pole of parameter s lies right of [0, 1] for s < 1, left for s > 1
    let right = pole_params.iter().filter(|&&s| s < 1.0).map(|&s| (bc + s * b) / (1.0 - s)).fold(f64::INFINITY, f64::min);
    let left = pole_params.iter().filter(|&&s| s > 1.0).map(|&s| (ac + s * a) / (s - 1.0)).fold(f64::INFINITY, f64::min);
    let plain = |lo: f64, hi: f64| adaptive_simpson(|w| kernel(w, 1.0 - w), lo, hi, QUADRATURE_TOL);
    let upper = if right < half {
        let d = right;
        let g = |v: f64| {
            let delta = v.exp() - d;
            kernel(b - delta, bc + delta) * v.exp()
        };
        adaptive_simpson(g, d.ln(), (half + d).ln(), QUADRATURE_TOL)
    } else {
        plain(m, b)
    };
    let lower = if left < half {
        let d = left;
        let g = |v: f64| {
            let delta = v.exp() - d;
            kernel(a + delta, ac - delta) * v.exp()
        };
        adaptive_simpson(g, d.ln(), (half + d).ln(), QUADRATURE_TOL)
    } else {
        plain(a, m)
    };
    lower + upper
}

impl PositiveFunction for HansenDensity {
    fn log_eval(&self, x: f64) -> Result<f64> {
        Ok(HansenDensity::log_eval(self, x))
    }
}

/// `ln(e^x - λ)` for `λ <= 0`.
fn ln_shift(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        x
    } else {
        log_add_exp(x, (-lambda).ln())
    }
}

/// Kernel `1/(λ - s) - 1/(λ - 1)` times `dλ/dw` at `λ = 1 - 1/w`, with
/// `wc = 1 - w`.
fn hansen_kernel_w(s: f64, w: f64, wc: f64) -> f64 {
    (s - 1.0) / (wc + s * w)
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(t))
    }
}

fn check_r(r: f64) -> Result<()> {
    if r >= 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("exponent r = {r} must be >= 1")))
    }
}

/// `f(t)` for the function represented by `h`.
pub fn hansen_eval(h: &HansenDensity, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(h.log_eval(t.ln()).exp())
}

/// `∫ (1/(λ - t^r) - r/(λ - t) + (r - 1)/(λ - 1)) h(λ) dλ`, which equals
/// `ln f(t^r) - r ln f(t)`. Computed in log coordinates, so `t^r` may exceed
/// the floating-point range.
pub fn pmi_integrand(h: &HansenDensity, t: f64, r: f64) -> Result<f64> {
    check_t(t)?;
    check_r(r)?;
    Ok(h.pmi_closed(t.ln(), r))
}

/// `∫ (λ + t)/(λ - t)^3 h(λ) dλ`. Its sign is the sign of the second
/// derivative of `x ↦ ln f(e^x)` at `x = ln t`; see [`second_log_derivative`].
pub fn gcv_integrand(h: &HansenDensity, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(h.gcv_closed(t))
}

/// `d²/dx² ln f(e^x)` at `x = ln t`, equal to `t · gcv_integrand(h, t)`.
pub fn second_log_derivative(h: &HansenDensity, t: f64) -> Result<f64> {
    Ok(t * gcv_integrand(h, t)?)
}

/// `ln f(t)` by quadrature.
pub fn log_eval_quadrature(h: &HansenDensity, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(h.integrate(|w, wc| hansen_kernel_w(t, w, wc), &[t]))
}

/// [`pmi_integrand`] by quadrature.
pub fn pmi_integrand_quadrature(h: &HansenDensity, t: f64, r: f64) -> Result<f64> {
    check_t(t)?;
    check_r(r)?;
    let tr = t.powf(r);
    if !tr.is_finite() || tr == 0.0 {
        return Err(Error::Parameter(format!("t^r out of range for quadrature (t = {t}, r = {r})")));
    }
    Ok(h.integrate(|w, wc| hansen_kernel_w(tr, w, wc) - r * hansen_kernel_w(t, w, wc), &[tr, t]))
}

/// [`gcv_integrand`] by quadrature.
pub fn gcv_integrand_quadrature(h: &HansenDensity, t: f64) -> Result<f64> {
    check_t(t)?;
    let kernel = |w: f64, wc: f64| {
        let d = wc + t * w;
        (wc - t * w) / (d * d * d)
    };
    Ok(h.integrate(kernel, &[t]))
}

/// The separating weight `(9/14)·1_{(-∞,-2)} + (5/14)·1_{(-1,0)}`. Its mean
/// `((t+2)/3)^{9/14} (2t/(t+1))^{5/14}` is power monotone increasing but not
/// geometrically convex.
pub fn theorem_counterexample() -> HansenDensity {
    let alpha = 9.0 / 14.0;
    HansenDensity::new(vec![
        DensityPiece { from: f64::NEG_INFINITY, to: -2.0, value: alpha },
        DensityPiece { from: -1.0, to: 0.0, value: 1.0 - alpha },
    ])
    .expect("counterexample density is valid")
}

/// `β ln(3^{r-1}(t^r + 2)/(t + 2)^r) - ln(2^{r-1}(t^r + 1)/(t + 1)^r)`.
pub fn phi_eval(beta: f64, r: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    let x = t.ln();
    let part = |c: f64| (r - 1.0) * c.ln() + log_add_exp(r * x, (c - 1.0).ln()) - r * log_add_exp(x, (c - 1.0).ln());
    Ok(beta * part(3.0) - part(2.0))
}

/// `(β - 1/2) t^{r+1} + (β - 1)(t^r + t) - (2 - β)`.
pub fn psi_eval(beta: f64, r: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok((beta - 0.5) * t.powf(r + 1.0) + (beta - 1.0) * (t.powf(r) + t) - (2.0 - beta))
}

/// `dφ/dt = 2r(t^{r-1} - 1) ψ(t) / ((t^r + 2)(t^r + 1)(t + 2)(t + 1))`.
pub fn phi_derivative(beta: f64, r: f64, t: f64) -> Result<f64> {
    let psi = psi_eval(beta, r, t)?;
    let tr = t.powf(r);
    Ok(2.0 * r * (t.powf(r - 1.0) - 1.0) * psi / ((tr + 2.0) * (tr + 1.0) * (t + 2.0) * (t + 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Eval,
    Pmi,
    Gcv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// One evaluated row of a criterion scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrandReport {
    pub t: f64,
    pub r: Option<f64>,
    pub value: f64,
    pub method: Method,
}

/// Evaluates `criterion` at `(t, r)`; `r` is required for [`Criterion::Pmi`]
/// and ignored otherwise. `Eval` reports `f(t)`.
pub fn evaluate(h: &HansenDensity, criterion: Criterion, t: f64, r: Option<f64>, method: Method) -> Result<IntegrandReport> {
    let value = match (criterion, method) {
        (Criterion::Eval, Method::ClosedForm) => hansen_eval(h, t)?,
        (Criterion::Eval, Method::Quadrature) => log_eval_quadrature(h, t)?.exp(),
        (Criterion::Pmi, m) => {
            let r = r.ok_or_else(|| Error::Parameter("pmi criterion needs r".into()))?;
            match m {
                Method::ClosedForm => pmi_integrand(h, t, r)?,
                Method::Quadrature => pmi_integrand_quadrature(h, t, r)?,
            }
        }
        (Criterion::Gcv, Method::ClosedForm) => gcv_integrand(h, t)?,
        (Criterion::Gcv, Method::Quadrature) => gcv_integrand_quadrature(h, t)?,
    };
    let r = if criterion == Criterion::Pmi { r } else { None };
    Ok(IntegrandReport { t, r, value, method })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::log_grid;

    fn grid() -> Vec<f64> {
        log_grid(1e-4, 1e4, 241).into_iter().map(f64::exp).collect()
    }

    #[test]
    fn single_piece_closed_forms() {
        let left = HansenDensity::single(f64::NEG_INFINITY, -2.0, 1.0).unwrap();
        assert!((hansen_eval(&left, 4.0).unwrap() - 2.0).abs() < 1e-14);
        let right = HansenDensity::single(-1.0, 0.0, 1.0).unwrap();
        assert!((hansen_eval(&right, 4.0).unwrap() - 1.6).abs() < 1e-14);
        let flat = HansenDensity::single(f64::NEG_INFINITY, 0.0, 0.5).unwrap();
        assert!((hansen_eval(&flat, 9.0).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn counterexample_closed_form() {
        let h = theorem_counterexample();
        for t in grid() {
            let expected = ((t + 2.0) / 3.0).powf(9.0 / 14.0) * (2.0 * t / (t + 1.0)).powf(5.0 / 14.0);
            assert!((hansen_eval(&h, t).unwrap() / expected - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn pmi_trivial_zeros() {
        let h = theorem_counterexample();
        for t in grid() {
            assert!(pmi_integrand(&h, t, 1.0).unwrap().abs() < 1e-15);
        }
        for r in [1.0, 1.5, 2.0, 10.0] {
            assert!(pmi_integrand(&h, 1.0, r).unwrap().abs() < 1e-15);
        }
        assert!(pmi_integrand(&h, 2.0, 0.5).is_err());
        assert!(pmi_integrand(&h, 0.0, 2.0).is_err());
    }

    #[test]
    fn pmi_matches_phi() {
        // the criterion integral is (1 - α)·φ(t) with β = α/(1 - α)
        let h = theorem_counterexample();
        for r in [1.1, 2.0, 5.0] {
            for t in grid() {
                let lhs = pmi_integrand(&h, t, r).unwrap();
                let rhs = 5.0 / 14.0 * phi_eval(9.0 / 5.0, r, t).unwrap();
                assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
            }
        }
    }

    #[test]
    fn gcv_values() {
        let flat = HansenDensity::single(f64::NEG_INFINITY, 0.0, 0.3).unwrap();
        let left = HansenDensity::single(f64::NEG_INFINITY, -2.0, 1.0).unwrap();
        for t in grid() {
            assert!(gcv_integrand(&flat, t).unwrap().abs() < 1e-15);
            assert!(gcv_integrand(&left, t).unwrap() > 0.0);
        }
        let h = theorem_counterexample();
        assert!(gcv_integrand(&h, 0.01).unwrap() < 0.0);
        assert!(gcv_integrand(&h, 100.0).unwrap() > 0.0);
        assert!((gcv_integrand(&h, 1e-12).unwrap() + 1.0 / 28.0).abs() < 1e-10);
        // closed form (1-α)(2/(t+2)^2)(β - (t+2)^2/(2(t+1)^2))
        for t in grid() {
            let closed = 5.0 / 14.0 * 2.0 / ((t + 2.0) * (t + 2.0))
                * (9.0 / 5.0 - (t + 2.0) * (t + 2.0) / (2.0 * (t + 1.0) * (t + 1.0)));
            assert!((gcv_integrand(&h, t).unwrap() - closed).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_agrees_with_closed_forms() {
        let h = theorem_counterexample();
        for &t in &[1e-4, 0.03, 0.7, 1.0, 2.0, 50.0, 1e4] {
            let c = hansen_eval(&h, t).unwrap().ln();
            let q = log_eval_quadrature(&h, t).unwrap();
            assert!((c - q).abs() < 1e-7 * (1.0 + c.abs()), "eval t={t}: {c} vs {q}");
            for r in [1.1, 3.0] {
                let c = pmi_integrand(&h, t, r).unwrap();
                let q = pmi_integrand_quadrature(&h, t, r).unwrap();
                assert!((c - q).abs() < 1e-7 * (1.0 + c.abs()), "pmi t={t} r={r}: {c} vs {q}");
            }
            let c = gcv_integrand(&h, t).unwrap();
            let q = gcv_integrand_quadrature(&h, t).unwrap();
            assert!((c - q).abs() < 1e-7 * (1.0 + c.abs()), "gcv t={t}: {c} vs {q}");
        }
    }

    #[test]
    fn phi_and_psi() {
        for r in [1.1, 1.5, 2.0, 3.0, 5.0, 10.0] {
            assert!(phi_eval(1.8, r, 1.0).unwrap().abs() < 1e-12);
        }
        for t in grid() {
            assert!(phi_eval(1.8, 2.0, t).unwrap() >= -1e-12);
        }
        let ts: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
        let signs: Vec<bool> = ts.iter().map(|&t| psi_eval(1.8, 2.0, t).unwrap() > 0.0).collect();
        assert_eq!(signs.windows(2).filter(|w| w[0] != w[1]).count(), 1);
    }

    #[test]
    fn phi_derivative_matches_finite_difference() {
        for r in [1.5, 2.0, 3.0] {
            for &t in &[0.05, 0.3, 0.9, 1.7, 6.0] {
                let h = 1e-6 * t;
                let fd = (phi_eval(1.8, r, t + h).unwrap() - phi_eval(1.8, r, t - h).unwrap()) / (2.0 * h);
                let d = phi_derivative(1.8, r, t).unwrap();
                assert!((fd - d).abs() < 1e-7 * (1.0 + d.abs()), "r={r} t={t}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn density_validation() {
        assert!(HansenDensity::single(-1.0, 0.5, 0.5).is_err());
        assert!(HansenDensity::single(-1.0, -2.0, 0.5).is_err());
        assert!(HansenDensity::single(-1.0, 0.0, 1.5).is_err());
        assert!(HansenDensity::single(f64::NAN, 0.0, 0.5).is_err());
        assert!(HansenDensity::new(vec![
            DensityPiece { from: -3.0, to: -1.0, value: 0.5 },
            DensityPiece { from: -2.0, to: 0.0, value: 0.5 },
        ])
        .is_err());
        let many = (0..65)
            .map(|i| DensityPiece { from: -(i as f64) - 1.0, to: -(i as f64) - 0.5, value: 0.1 })
            .collect();
        assert!(HansenDensity::new(many).is_err());
    }

    #[test]
    fn json_literal() {
        let text = r#"[{"from": -1, "to": 0, "value": 0.3571428571428571},
                       {"from": "-inf", "to": -2, "value": 0.6428571428571429}]"#;
        let h = HansenDensity::from_json(text).unwrap();
        assert_eq!(h.pieces()[0].from, f64::NEG_INFINITY);
        let again = HansenDensity::from_json(&h.to_json()).unwrap();
        assert_eq!(h, again);
        assert!(h.to_json().contains("\"-inf\""));
        assert!(HansenDensity::from_json(r#"[{"from": "inf", "to": 0, "value": 1}]"#).is_err());
        assert!(HansenDensity::from_json(r#"[{"from": -1, "to": 0}]"#).is_err());
        assert!(HansenDensity::from_json("{").is_err());
    }

    #[test]
    fn evaluate_reports_method() {
        let h = theorem_counterexample();
        let rep = evaluate(&h, Criterion::Pmi, 2.0, Some(1.5), Method::Quadrature).unwrap();
        assert_eq!(rep.method, Method::Quadrature);
        assert_eq!(rep.r, Some(1.5));
        assert!(evaluate(&h, Criterion::Pmi, 2.0, None, Method::ClosedForm).is_err());
        let rep = evaluate(&h, Criterion::Eval, 2.0, Some(3.0), Method::ClosedForm).unwrap();
        assert_eq!(rep.r, None);
    }
}
