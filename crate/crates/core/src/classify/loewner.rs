use nalgebra::DMatrix;

use super::{derivative_at, ToleranceConfig};
use crate::error::{Error, Result};
use crate::linalg::min_eigenvalue;
use crate::means::PositiveFunction;

/// Divided-difference matrices beyond this size are too ill-conditioned to
/// say anything.
pub const MAX_LOEWNER_POINTS: usize = 12;

/// `L_ij = (f(x_i) - f(x_j))/(x_i - x_j)`, `L_ii = f'(x_i)`.
pub fn loewner_matrix<F: PositiveFunction + ?Sized>(f: &F, points: &[f64], tol: &ToleranceConfig) -> Result<DMatrix<f64>> {
    let n = points.len();
    if n == 0 || n > MAX_LOEWNER_POINTS {
        return Err(Error::Parameter(format!("Loewner test takes 1..={MAX_LOEWNER_POINTS} points, got {n}")));
    }
    if let Some(&bad) = points.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
        return Err(Error::Domain(bad));
    }
    for i in 0..n {
        for j in 0..i {
            if points[i] == points[j] {
                return Err(Error::DuplicatePoints);
            }
        }
    }
    let values = points.iter().map(|&x| f.eval(x)).collect::<Result<Vec<_>>>()?;
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] = if i == j {
                derivative_at(f, points[i], tol)?.0
            } else {
                (values[i] - values[j]) / (points[i] - points[j])
            };
        }
    }
    Ok(l)
}

/// Minimum eigenvalue of the Loewner matrix at `points`. A value clearly
/// below zero certifies that `f` is not operator monotone; a nonnegative
/// value is only consistent with it.
pub fn loewner_test<F: PositiveFunction + ?Sized>(f: &F, points: &[f64], tol: &ToleranceConfig) -> Result<f64> {
    min_eigenvalue(&loewner_matrix(f, points, tol)?)
}
