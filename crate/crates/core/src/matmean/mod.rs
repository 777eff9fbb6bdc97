//! Functional calculus on real symmetric positive definite matrices and the
//! operator mean `A σ_f B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}`.

mod io;
mod precise;
mod search;

pub use io::{matrix_from_json, matrix_from_text, matrix_to_json, matrix_to_text, MatrixJson, MAX_DIM};
pub use search::{ando_hiai_search, implication_gap, AndoHiaiWitness, SearchConfig, SearchPhase, SearchReport, EIGEN_RANGE, WITNESS_TOL};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, sym_eigen, symmetrize, SymmetricEigen};
use crate::means::PositiveFunction;

/// Condition number above which [`operator_mean`] logs a warning.
pub const CONDITION_WARNING: f64 = 1e12;

/// Symmetric positive definite matrix with its spectral decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct PositiveMatrix {
    entries: DMatrix<f64>,
    eigen: SymmetricEigen,
}

impl PositiveMatrix {
    /// Validates symmetry (`max |M_ij - M_ji| <= 1e-12 ‖M‖`), strict
    /// positivity and reconstruction accuracy.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::Matrix(format!("expected a non-empty square matrix, got {}x{}", n, entries.ncols())));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Matrix("non-finite entry".into()));
        }
        let norm = entries.norm();
        let asym = (&entries - entries.transpose()).amax();
        if asym > 1e-12 * norm {
            return Err(Error::Matrix(format!("not symmetric (asymmetry {asym:e})")));
        }
        Self::from_symmetric(symmetrize(&entries))
    }

    /// Like [`PositiveMatrix::new`] for matrices that are symmetric up to
    /// rounding by construction; the input is symmetrized.
    fn from_symmetric(entries: DMatrix<f64>) -> Result<Self> {
        let entries = symmetrize(&entries);
        let eigen = sym_eigen(&entries)?;
        if !(eigen.min() > 0.0) {
            return Err(Error::NotPositiveDefinite(eigen.min()));
        }
        let norm = entries.norm();
        let residual = (eigen.recompose(|x| x) - &entries).norm();
        if residual > 1e-9 * norm {
            return Err(Error::Matrix(format!("eigendecomposition residual {residual:e} too large")));
        }
        Ok(PositiveMatrix { entries, eigen })
    }

    /// Builds `Q diag(values) Qᵀ` from an orthogonal `Q`, keeping the given
    /// spectral data as the cache.
    pub(crate) fn from_spectral(values: Vec<f64>, vectors: DMatrix<f64>) -> Result<Self> {
        if let Some(&v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::NotPositiveDefinite(v));
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let n = values.len();
        let eigen = SymmetricEigen {
            values: order.iter().map(|&i| values[i]).collect(),
            vectors: DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]),
        };
        let entries = eigen.recompose(|x| x);
        Ok(PositiveMatrix { entries, eigen })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n]).expect("identity is positive definite")
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Matrix("empty diagonal".into()));
        }
        Self::from_spectral(values.to_vec(), DMatrix::identity(values.len(), values.len()))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Matrix("rows must form a square matrix".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigen.vectors
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen.min()
    }

    pub fn condition_number(&self) -> f64 {
        self.eigen.max() / self.eigen.min()
    }

    /// `g(M)` through the cached spectrum.
    pub fn map_spectrum<G: Fn(f64) -> Result<f64>>(&self, g: G) -> Result<Self> {
        let values = self.eigen.values.iter().map(|&v| g(v)).collect::<Result<Vec<_>>>()?;
        Self::from_spectral(values, self.eigen.vectors.clone())
    }

    pub fn power(&self, p: f64) -> Self {
        self.map_spectrum(|v| Ok(v.powf(p))).expect("powers of a positive spectrum are positive")
    }

    /// `M + εI`.
    pub fn shifted(&self, eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::Parameter(format!("shift ε = {eps} must be >= 0")));
        }
        self.map_spectrum(|v| Ok(v + eps))
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Parameter(format!("scale {c} must be positive")));
        }
        self.map_spectrum(|v| Ok(c * v))
    }

    /// `TᵀMT` for invertible `T`.
    pub fn congruence(&self, t: &DMatrix<f64>) -> Result<Self> {
        check_invertible(t, self.dim())?;
        Self::from_symmetric(t.transpose() * &self.entries * t)
    }
}

fn check_invertible(t: &DMatrix<f64>, dim: usize) -> Result<()> {
    if t.nrows() != dim || t.ncols() != dim {
        return Err(Error::Matrix(format!("transformer must be {dim}x{dim}")));
    }
    let gram = sym_eigen(&(t.transpose() * t))?;
    if !(gram.min() > 1e-24 * gram.max()) {
        return Err(Error::SingularTransformer);
    }
    Ok(())
}

/// `f(A) = Q f(Λ) Qᵀ`.
pub fn apply_function<F: PositiveFunction + ?Sized>(f: &F, a: &PositiveMatrix) -> Result<PositiveMatrix> {
    a.map_spectrum(|v| f.eval(v))
}

/// `A_ε^{1/2} f(A_ε^{-1/2} B_ε A_ε^{-1/2}) A_ε^{1/2}` with `X_ε = X + εI`.
pub fn operator_mean<F: PositiveFunction + ?Sized>(
    f: &F,
    a: &PositiveMatrix,
    b: &PositiveMatrix,
    eps: f64,
) -> Result<PositiveMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::Matrix(format!("dimension mismatch {} vs {}", a.dim(), b.dim())));
    }
    let a = a.shifted(eps)?;
    let b = b.shifted(eps)?;
    if a.condition_number() > CONDITION_WARNING {
        log::warn!("operator mean: condition number {:e} of the first argument", a.condition_number());
    }
    let root = a.eigen.recompose(f64::sqrt);
    let inv_root = a.eigen.recompose(|v| 1.0 / v.sqrt());
    let inner = PositiveMatrix::from_symmetric(&inv_root * b.entries() * &inv_root)?;
    let middle = apply_function(f, &inner)?;
    PositiveMatrix::from_symmetric(&root * middle.entries() * &root)
}

/// Smallest eigenvalue of `(TᵀAT) σ (TᵀBT) - Tᵀ(A σ B)T`. Nonnegative for
/// every operator mean; zero up to rounding when `T` is invertible.
pub fn transformer_check<F: PositiveFunction + ?Sized>(
    f: &F,
    a: &PositiveMatrix,
    b: &PositiveMatrix,
    t: &DMatrix<f64>,
) -> Result<f64> {
    check_invertible(t, a.dim())?;
    let left = operator_mean(f, &a.congruence(t)?, &b.congruence(t)?, 0.0)?;
    let mean = operator_mean(f, a, b, 0.0)?;
    let right = t.transpose() * mean.entries() * t;
    min_eigenvalue(&(left.entries() - right))
}

/// Haar-like orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix column signs so the distribution does not depend on QR conventions
    let mut q = q;
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Random orthogonal `Q` and log-uniform eigenvalues in `[min_eig, max_eig]`.
pub fn random_spectrum<R: Rng + ?Sized>(rng: &mut R, dim: usize, min_eig: f64, max_eig: f64) -> Result<(DMatrix<f64>, Vec<f64>)> {
    if dim == 0 || !(min_eig > 0.0 && max_eig >= min_eig && max_eig.is_finite()) {
        return Err(Error::Parameter(format!("bad random matrix spec dim={dim} [{min_eig}, {max_eig}]")));
    }
    let q = random_orthogonal(rng, dim);
    let (lo, hi) = (min_eig.ln(), max_eig.ln());
    let values = (0..dim)
        .map(|_| if hi > lo { rng.random_range(lo..hi).exp() } else { min_eig })
        .collect();
    Ok((q, values))
}

/// `Q diag(λ) Qᵀ` from [`random_spectrum`].
pub fn random_positive_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize, min_eig: f64, max_eig: f64) -> Result<PositiveMatrix> {
    let (q, values) = random_spectrum(rng, dim, min_eig, max_eig)?;
    PositiveMatrix::from_spectral(values, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::means::MeanFunction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        (a - b).amax() <= tol * (1.0 + b.amax())
    }

    #[test]
    fn construction_checks() {
        assert!(PositiveMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).is_ok());
        assert!(matches!(
            PositiveMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]),
            Err(Error::NotPositiveDefinite(_))
        ));
        assert!(PositiveMatrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 2.0]]).is_err());
        assert!(PositiveMatrix::from_rows(&[vec![2.0, 1.0]]).is_err());
        assert!(PositiveMatrix::diagonal(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn apply_function_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_positive_matrix(&mut rng, 4, 0.1, 10.0).unwrap();
        let id = apply_function(&MeanFunction::power(1.0).unwrap(), &a).unwrap();
        assert!(close(id.entries(), a.entries(), 1e-10));
        let d = PositiveMatrix::diagonal(&[4.0, 9.0]).unwrap();
        let r = apply_function(&MeanFunction::power(0.5).unwrap(), &d).unwrap();
        assert!(close(r.entries(), &DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]), 1e-15));
        let am = apply_function(&MeanFunction::arithmetic(), &a).unwrap();
        let direct = (DMatrix::identity(4, 4) + a.entries()) * 0.5;
        assert!(close(am.entries(), &direct, 1e-12));
    }

    #[test]
    fn operator_mean_examples() {
        let half = MeanFunction::power(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_positive_matrix(&mut rng, 3, 0.1, 10.0).unwrap();
        let same = operator_mean(&MeanFunction::section5_example(), &a, &a, 0.0).unwrap();
        assert!(close(same.entries(), a.entries(), 1e-12));
        let m = operator_mean(&half, &PositiveMatrix::diagonal(&[2.0]).unwrap(), &PositiveMatrix::diagonal(&[8.0]).unwrap(), 0.0).unwrap();
        assert!((m.entries()[(0, 0)] - 4.0).abs() < 1e-14);
        let m = operator_mean(&half, &PositiveMatrix::diagonal(&[4.0, 4.0]).unwrap(), &PositiveMatrix::diagonal(&[9.0, 9.0]).unwrap(), 0.0).unwrap();
        assert!(close(m.entries(), &(DMatrix::identity(2, 2) * 6.0), 1e-14));
    }

    #[test]
    fn geometric_mean_solves_riccati() {
        // G = A # B is the positive solution of G A^{-1} G = B
        let half = MeanFunction::power(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = random_positive_matrix(&mut rng, 4, 0.1, 10.0).unwrap();
        let b = random_positive_matrix(&mut rng, 4, 0.1, 10.0).unwrap();
        let g = operator_mean(&half, &a, &b, 0.0).unwrap();
        let a_inv = a.power(-1.0);
        let lhs = g.entries() * a_inv.entries() * g.entries();
        assert!(close(&lhs, b.entries(), 1e-10));
    }

    #[test]
    fn transformer_examples() {
        let half = MeanFunction::power(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_positive_matrix(&mut rng, 3, 0.2, 5.0).unwrap();
        let b = random_positive_matrix(&mut rng, 3, 0.2, 5.0).unwrap();
        let v = transformer_check(&half, &a, &b, &DMatrix::identity(3, 3)).unwrap();
        assert!(v.abs() < 1e-12);
        let t = DMatrix::from_fn(3, 3, |i, j| if i == j { 1.5 } else { 0.3 * (i as f64 - j as f64) });
        assert!(transformer_check(&half, &a, &b, &t).unwrap().abs() <= 1e-8);
        let q = random_orthogonal(&mut rng, 3);
        assert!(transformer_check(&MeanFunction::section5_example(), &a, &b, &q).unwrap().abs() <= 1e-8);
        let singular = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 1.0]);
        assert_eq!(transformer_check(&half, &a, &b, &singular), Err(Error::SingularTransformer));
    }

    #[test]
    fn epsilon_limit() {
        let f = MeanFunction::binomial(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_positive_matrix(&mut rng, 3, 0.1, 10.0).unwrap();
        let b = random_positive_matrix(&mut rng, 3, 0.1, 10.0).unwrap();
        let exact = operator_mean(&f, &a, &b, 0.0).unwrap();
        let errs: Vec<f64> = [1e-4, 1e-6, 1e-8]
            .iter()
            .map(|&e| (operator_mean(&f, &a, &b, e).unwrap().entries() - exact.entries()).norm())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2] * 0.5);
        assert!(errs[2] < 1e-7);
        assert!(operator_mean(&f, &a, &b, -1.0).is_err());
    }

    #[test]
    fn random_matrix_spectrum_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let m = random_positive_matrix(&mut rng, 5, 1e-4, 1e4).unwrap();
            assert!(m.eigenvalues().iter().all(|&v| (1e-4..=1e4).contains(&v)));
            let rebuilt = PositiveMatrix::new(m.entries().clone()).unwrap();
            for (x, y) in rebuilt.eigenvalues().iter().zip(m.eigenvalues()) {
                assert!((x - y).abs() < 1e-9 * 1e4);
            }
        }
    }
}
