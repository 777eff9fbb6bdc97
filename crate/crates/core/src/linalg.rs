//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius norm, relative to the matrix norm, at which
/// the iteration stops.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;

/// Eigenvalues in ascending order; column `i` of `vectors` belongs to
/// `values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymmetricEigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `Q diag(g(λ)) Qᵀ`, symmetrized.
    pub fn recompose<G: Fn(f64) -> f64>(&self, g: G) -> DMatrix<f64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let gv = g(v);
            for i in 0..n {
                scaled[(i, j)] *= gv;
            }
        }
        symmetrize(&(scaled * self.vectors.transpose()))
    }
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Only the upper triangle's symmetric part matters; the input is
/// symmetrized first.
pub fn sym_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::Matrix(format!("expected a non-empty square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Matrix("non-finite entry".into()));
    }
    let mut a = symmetrize(m);
    let mut v = DMatrix::<f64>::identity(n, n);
    let norm = a.norm();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= OFF_DIAGONAL_TOL * norm {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > OFF_DIAGONAL_TOL * norm {
        return Err(Error::EigenNoConvergence(MAX_SWEEPS));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    Ok(sym_eigen(m)?.min())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-3.0..3.0));
        symmetrize(&g)
    }

    #[test]
    fn matches_library_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=12 {
            let m = random_symmetric(&mut rng, n);
            let ours = sym_eigen(&m).unwrap();
            let mut reference: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            for (x, y) in ours.values.iter().zip(&reference) {
                assert!((x - y).abs() < 1e-11 * (1.0 + y.abs()), "n = {n}");
            }
            let rebuilt = ours.recompose(|x| x);
            assert!((rebuilt - &m).norm() < 1e-12 * (1.0 + m.norm()));
            let qtq = ours.vectors.transpose() * &ours.vectors;
            assert!((qtq - DMatrix::identity(n, n)).norm() < 1e-13);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 3.0, 3.0, 4.0]);
        let e = sym_eigen(&m).unwrap();
        assert!((e.min() - (3.0 - 10f64.sqrt())).abs() < 1e-14);
        assert!((e.max() - (3.0 + 10f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn diagonal_input_is_immediate() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let e = sym_eigen(&m).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(sym_eigen(&DMatrix::<f64>::zeros(2, 3)).is_err());
        assert!(sym_eigen(&DMatrix::from_element(2, 2, f64::NAN)).is_err());
        assert!(sym_eigen(&DMatrix::<f64>::zeros(0, 0)).is_err());
    }
}
