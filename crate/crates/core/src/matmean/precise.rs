//! Extended-precision evaluation of the implication gap for matrices given
//! by spectral data. Matrix operations run at a precision sized to the
//! condition numbers of `A^p` and `B^p`.

#![allow(clippy::needless_range_loop)]

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::means::PositiveFunction;

type Hp = FBig<HalfEven, 2>;

const MAX_SWEEPS: usize = 60;

fn lift(v: f64, prec: usize) -> Hp {
    Hp::try_from(v).expect("finite").with_precision(prec).value()
}

fn abs(x: &Hp) -> Hp {
    if *x < Hp::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

#[derive(Clone)]
struct Mat {
    n: usize,
    data: Vec<Hp>,
}

impl Mat {
    fn zeros(n: usize, prec: usize) -> Self {
        Mat { n, data: vec![lift(0.0, prec); n * n] }
    }

    fn get(&self, i: usize, j: usize) -> &Hp {
        &self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: Hp) {
        self.data[i * self.n + j] = v;
    }

    fn mul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.get(i, 0) * other.get(0, j);
                for k in 1..n {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.push(acc);
            }
        }
        Mat { n, data: out }
    }

    fn transpose(&self) -> Mat {
        let n = self.n;
        Mat { n, data: (0..n * n).map(|k| self.get(k % n, k / n).clone()).collect() }
    }

    /// `Q diag(d) Qᵀ`, symmetric by construction.
    fn spectral(q: &Mat, d: &[Hp]) -> Mat {
        let n = q.n;
        let mut out = q.clone();
        for i in 0..n {
            for j in i..n {
                let mut acc = q.get(i, 0) * q.get(j, 0) * &d[0];
                for k in 1..n {
                    acc += q.get(i, k) * q.get(j, k) * &d[k];
                }
                out.set(j, i, acc.clone());
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// Exactly orthonormal (to working precision) columns from an almost
/// orthogonal `q`, by two passes of modified Gram-Schmidt.
fn orthonormalize(q: &DMatrix<f64>, prec: usize) -> Mat {
    let n = q.nrows();
    let mut cols: Vec<Vec<Hp>> = (0..n).map(|j| (0..n).map(|i| lift(q[(i, j)], prec)).collect()).collect();
    for _ in 0..2 {
        for j in 0..n {
            for k in 0..j {
                let mut dot = &cols[j][0] * &cols[k][0];
                for i in 1..n {
                    dot += &cols[j][i] * &cols[k][i];
                }
                for i in 0..n {
                    let delta = &dot * &cols[k][i];
                    cols[j][i] -= delta;
                }
            }
            let mut norm2 = &cols[j][0] * &cols[j][0];
            for i in 1..n {
                norm2 += &cols[j][i] * &cols[j][i];
            }
            let norm = norm2.sqrt();
            for i in 0..n {
                cols[j][i] = &cols[j][i] / &norm;
            }
        }
    }
    let mut m = Mat::zeros(n, prec);
    for (j, col) in cols.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m
}

/// Cyclic Jacobi for a symmetric positive definite matrix, stopping when
/// every `|a_ij| <= tol·sqrt(a_ii a_jj)`; this relative criterion keeps the
/// small eigenvalues accurate.
fn jacobi(mut a: Mat, prec: usize) -> Result<(Vec<Hp>, Mat)> {
    let n = a.n;
    let one = lift(1.0, prec);
    let two = lift(2.0, prec);
    let tol = lift((-(prec as f64 - 8.0)).exp2(), prec);
    let mut v = Mat::zeros(n, prec);
    for i in 0..n {
        v.set(i, i, one.clone());
    }
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q).clone();
                if apq == Hp::ZERO {
                    continue;
                }
                let app = a.get(p, p).clone();
                let aqq = a.get(q, q).clone();
                if !(app > Hp::ZERO && aqq > Hp::ZERO) {
                    return Err(Error::NotPositiveDefinite(app.to_f64().value().min(aqq.to_f64().value())));
                }
                if abs(&apq) <= &tol * (&app * &aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let theta = (&aqq - &app) / (&two * &apq);
                let root = (&theta * &theta + &one).sqrt();
                let t = if theta >= Hp::ZERO { &one / (&theta + &root) } else { -(&one / (&root - &theta)) };
                let c = &one / (&t * &t + &one).sqrt();
                let s = &t * &c;
                for k in 0..n {
                    let akp = a.get(k, p).clone();
                    let akq = a.get(k, q).clone();
                    a.set(k, p, &c * &akp - &s * &akq);
                    a.set(k, q, &s * &akp + &c * &akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k).clone();
                    let aqk = a.get(q, k).clone();
                    a.set(p, k, &c * &apk - &s * &aqk);
                    a.set(q, k, &s * &apk + &c * &aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p).clone();
                    let vkq = v.get(k, q).clone();
                    v.set(k, p, &c * &vkp - &s * &vkq);
                    v.set(k, q, &s * &vkp + &c * &vkq);
                }
            }
        }
        if !rotated {
            let values = (0..n).map(|i| a.get(i, i).clone()).collect();
            return Ok((values, v));
        }
    }
    Err(Error::EigenNoConvergence(MAX_SWEEPS))
}

/// Positive definite matrix `Q diag(λ) Qᵀ` held as exact spectral data.
#[derive(Clone)]
pub(crate) struct SpectralPd {
    q: Mat,
    values: Vec<Hp>,
    prec: usize,
}

impl SpectralPd {
    pub(crate) fn new(q: &DMatrix<f64>, values: &[f64], prec: usize) -> Self {
        SpectralPd { q: orthonormalize(q, prec), values: values.iter().map(|&v| lift(v, prec)).collect(), prec }
    }

    fn map(&self, g: impl Fn(&Hp) -> Hp) -> SpectralPd {
        SpectralPd { q: self.q.clone(), values: self.values.iter().map(g).collect(), prec: self.prec }
    }

    pub(crate) fn scaled(&self, c: f64) -> SpectralPd {
        let c = lift(c, self.prec);
        self.map(|v| v * &c)
    }

    /// Half-integer exponents use square roots and products only.
    pub(crate) fn power(&self, p: f64) -> SpectralPd {
        let twice = (2.0 * p).round();
        if (2.0 * p - twice).abs() < 1e-12 && twice.abs() <= 64.0 {
            let k = twice as i64;
            return self.map(|v| {
                let root = v.sqrt();
                let mut acc = lift(1.0, self.prec);
                for _ in 0..k.unsigned_abs() {
                    acc *= &root;
                }
                if k < 0 { lift(1.0, self.prec) / acc } else { acc }
            });
        }
        let p = lift(p, self.prec);
        self.map(|v| (v.ln() * &p).exp())
    }

    fn dense(&self) -> Mat {
        Mat::spectral(&self.q, &self.values)
    }

    pub(crate) fn to_f64(&self) -> (DMatrix<f64>, Vec<f64>) {
        let n = self.q.n;
        (
            DMatrix::from_fn(n, n, |i, j| self.q.get(i, j).to_f64().value()),
            self.values.iter().map(|v| v.to_f64().value()).collect(),
        )
    }
}

/// Working precision for the pair: enough bits to absorb the condition
/// numbers of both matrices raised to the power `p`.
pub(crate) fn precision_for(a_values: &[f64], b_values: &[f64], p: f64) -> usize {
    let spread = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(0.0, f64::max);
        (hi / lo).log2().max(0.0)
    };
    let bits = p.max(1.0) * (spread(a_values) + spread(b_values));
    96 + bits.ceil() as usize
}

/// `λ_min(A σ_f B)` evaluated in extended precision; `f` itself is
/// evaluated in double precision on the eigenvalues of the inner matrix,
/// which perturbs the result by a relative `O(ε)` only.
pub(crate) fn mean_min_eigenvalue<F: PositiveFunction + ?Sized>(f: &F, a: &SpectralPd, b: &SpectralPd) -> Result<f64> {
    let prec = a.prec;
    let half = lift(0.5, prec);
    let one = lift(1.0, prec);
    let root = a.map(|v| v.sqrt());
    let inv_root = root.map(|v| &one / v).dense();
    let root = root.dense();
    let inner = inv_root.mul(&b.dense()).mul(&inv_root);
    let (mu, u) = jacobi(inner, prec)?;
    let fmu = mu
        .iter()
        .map(|m| f.eval(m.to_f64().value()).map(|v| lift(v, prec)))
        .collect::<Result<Vec<_>>>()?;
    let middle = Mat::spectral(&u, &fmu);
    let mean = root.mul(&middle).mul(&root);
    let sym = {
        let t = mean.transpose();
        let mut s = mean.clone();
        for k in 0..s.data.len() {
            s.data[k] = (&mean.data[k] + &t.data[k]) * &half;
        }
        s
    };
    let (values, _) = jacobi(sym, prec)?;
    let min = values.into_iter().reduce(|x, y| if y < x { y } else { x }).expect("non-empty");
    Ok(min.to_f64().value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matmean::{operator_mean, PositiveMatrix};
    use crate::means::MeanFunction;

    #[test]
    fn agrees_with_double_precision_when_well_conditioned() {
        let q = crate::matmean::random_orthogonal(&mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1), 3);
        let (la, lb) = ([0.5, 1.0, 3.0], [2.0, 0.7, 1.5]);
        let q2 = DMatrix::from_fn(3, 3, |i, j| q[(j, i)]);
        let f = MeanFunction::binomial(0.3).unwrap();
        let prec = precision_for(&la, &lb, 1.0);
        let exact = mean_min_eigenvalue(&f, &SpectralPd::new(&q, &la, prec), &SpectralPd::new(&q2, &lb, prec)).unwrap();
        let a = PositiveMatrix::from_spectral(la.to_vec(), q.clone()).unwrap();
        let b = PositiveMatrix::from_spectral(lb.to_vec(), q2).unwrap();
        let double = operator_mean(&f, &a, &b, 0.0).unwrap().min_eigenvalue();
        assert!((exact - double).abs() < 1e-12, "{exact} vs {double}");
    }

    #[test]
    fn graded_geometric_mean() {
        // diagonal pair: A # B = diag(sqrt(a_i b_i)) exactly
        let id = DMatrix::identity(3, 3);
        let (la, lb) = ([1e-16, 1.0, 1e16], [1e16, 1e-8, 1e-16]);
        let prec = precision_for(&la, &lb, 1.0);
        let f = MeanFunction::power(0.5).unwrap();
        let v = mean_min_eigenvalue(&f, &SpectralPd::new(&id, &la, prec), &SpectralPd::new(&id, &lb, prec)).unwrap();
        assert!((v / 1e-4 - 1.0).abs() < 1e-14, "{v}");
    }

    #[test]
    fn power_is_exact_on_spectrum() {
        let id = DMatrix::identity(2, 2);
        let a = SpectralPd::new(&id, &[4.0, 9.0], 128).power(1.5);
        let (_, values) = a.to_f64();
        assert_eq!(values, vec![8.0, 27.0]);
    }
}
