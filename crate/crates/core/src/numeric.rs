//! Scalar numerical kernels shared by the mean families and the checkers.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{v_i}`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_infinite() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// `ln((e^y - 1) / y)`, extended smoothly by 0 at `y = 0`.
///
/// Every two-parameter power-difference family reduces to differences of this
/// function, which is what removes the 0/0 seams from their evaluation.
pub fn ln_expm1_ratio(y: f64) -> f64 {
    let ay = y.abs();
    if ay < 1e-3 {
        let y2 = y * y;
        return y / 2.0 + y2 / 24.0 - y2 * y2 / 2880.0;
    }
    if y > 0.0 {
        y + (-(-y).exp_m1()).ln() - y.ln()
    } else {
        (-y.exp_m1()).ln() - (-y).ln()
    }
}

/// First derivative of [`ln_expm1_ratio`]: `1/(1 - e^{-y}) - 1/y`.
pub fn ln_expm1_ratio_d1(y: f64) -> f64 {
    if y.abs() < 0.05 {
        let y2 = y * y;
        return 0.5 + y / 12.0 - y * y2 / 720.0 + y * y2 * y2 / 30240.0
            - y * y2 * y2 * y2 / 1_209_600.0;
    }
    1.0 / (-(-y).exp_m1()) - 1.0 / y
}

/// Second derivative of [`ln_expm1_ratio`]: `1/y^2 - 1/(4 sinh^2(y/2))`.
pub fn ln_expm1_ratio_d2(y: f64) -> f64 {
    if y.abs() < 0.05 {
        let y2 = y * y;
        return 1.0 / 12.0 - y2 / 240.0 + y2 * y2 / 6048.0 - y2 * y2 * y2 / 172_800.0;
    }
    let s = (0.5 * y).sinh();
    1.0 / (y * y) - 1.0 / (4.0 * s * s)
}

/// Nodes and weights of the 64-point Gauss-Legendre rule mapped to `[0, 1]`.
pub fn gauss_legendre_unit() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        gauss_legendre(64)
            .into_iter()
            .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect()
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule.reverse();
    rule
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Solves `g(y) = target` for increasing `g` on `[lo, hi]`.
///
/// Bisection with secant refinement: a secant step is taken only when it falls
/// strictly inside the bracket and the previous step at least halved it.
pub fn solve_increasing<G: Fn(f64) -> Result<f64>>(
    g: G,
    target: f64,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut g_lo = g(lo)? - target;
    let mut g_hi = g(hi)? - target;
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo > 0.0 || g_hi < 0.0 {
        return Err(Error::Bracket { lo, hi, target });
    }
    let mut last_width = f64::INFINITY;
    let mut best = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        let width = hi - lo;
        let secant = lo - g_lo * (hi - lo) / (g_hi - g_lo);
        let y = if secant > lo && secant < hi && width <= 0.5 * last_width {
            secant
        } else {
            0.5 * (lo + hi)
        };
        last_width = width;
        let gy = g(y)? - target;
        best = y;
        if gy.abs() <= abs_tol {
            return Ok(y);
        }
        if gy < 0.0 {
            lo = y;
            g_lo = gy;
        } else {
            hi = y;
            g_hi = gy;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
    }
    Ok(best)
}

/// Golden-section minimization on `[a, b]`; returns `(argmin, min)`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, iterations: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iterations {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Log-spaced points `ln t` for `n` points covering `[t_min, t_max]`.
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    let (lo, hi) = (t_min.ln(), t_max.ln());
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_ratio_matches_direct_formula() {
        for &y in &[-30.0f64, -2.0, -0.5, -1e-2, 1e-2, 0.5, 3.0, 40.0] {
            let direct: f64 = (y.exp_m1() / y).ln();
            assert!((ln_expm1_ratio(y) - direct).abs() < 1e-13, "y = {y}");
        }
        assert_eq!(ln_expm1_ratio(0.0), 0.0);
    }

    #[test]
    fn expm1_ratio_is_continuous_at_series_switch() {
        for &y in &[1e-3, -1e-3] {
            let below = ln_expm1_ratio(y * (1.0 - 1e-12));
            let above = ln_expm1_ratio(y * (1.0 + 1e-12));
            assert!((below - above).abs() < 1e-14);
        }
    }

    #[test]
    fn expm1_ratio_derivatives_match_finite_differences() {
        for &y in &[-4.0, -0.3, -0.04, 0.0, 0.04, 0.06, 0.7, 5.0] {
            let h = 1e-5;
            let d1 = (ln_expm1_ratio(y + h) - ln_expm1_ratio(y - h)) / (2.0 * h);
            assert!((d1 - ln_expm1_ratio_d1(y)).abs() < 1e-9, "d1 at {y}");
            let d2 = (ln_expm1_ratio_d1(y + h) - ln_expm1_ratio_d1(y - h)) / (2.0 * h);
            assert!((d2 - ln_expm1_ratio_d2(y)).abs() < 1e-8, "d2 at {y}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre_unit();
        assert_eq!(rule.len(), 64);
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-14);
        let m: f64 = rule.iter().map(|(x, w)| w * x.powi(20)).sum();
        assert!((m - 1.0 / 21.0).abs() < 1e-14);
        let e: f64 = rule.iter().map(|(x, w)| w * x.exp()).sum();
        assert!((e - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn simpson_handles_endpoint_spike() {
        let t: f64 = 1e-4;
        let v = adaptive_simpson(|w| (t - 1.0) / (1.0 + (t - 1.0) * w), 0.0, 1.0, 1e-10);
        assert!((v - t.ln()).abs() < 1e-8, "{v}");
    }

    #[test]
    fn solver_inverts_cubic() {
        let y = solve_increasing(|y| Ok(y * y * y + y), 10.0, -5.0, 5.0, 1e-14, 200).unwrap();
        assert!((y * y * y + y - 10.0).abs() < 1e-12);
        assert!(matches!(
            solve_increasing(Ok, 10.0, -1.0, 1.0, 1e-14, 200),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, v) = golden_section_min(|x| (x - 0.3) * (x - 0.3) - 1.0, -2.0, 2.0, 200);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v + 1.0).abs() < 1e-13);
    }

    #[test]
    fn log_add_exp_is_stable() {
        assert!((log_add_exp(1000.0, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 3.0), 3.0);
        assert!((log_sum_exp(&[0.0, 0.0, 0.0]) - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log_grid_hits_endpoints_and_one() {
        let g = log_grid(1e-4, 1e4, 241);
        assert_eq!(g.len(), 241);
        assert!((g[0] - 1e-4f64.ln()).abs() < 1e-15);
        assert!(g[120].abs() < 1e-14);
        assert_eq!(g[240], 1e4f64.ln());
    }
}
