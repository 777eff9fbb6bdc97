use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre_unit, log_sum_exp};

/// Point mass of a geodesic measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub exponent: f64,
}

/// Absolutely continuous part with density proportional to
/// `α^(a-1) (1-α)^(b-1)` on `[0, 1]`, carrying total mass `weight`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPart {
    pub weight: f64,
    pub a: f64,
    pub b: f64,
}

/// Probability measure on `[0, 1]` defining `t ↦ ∫ t^α dp(α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicMeasure {
    atoms: Vec<Atom>,
    continuous: Option<BetaPart>,
    /// Quadrature nodes of the continuous part as `(α_k, ln mass_k)`.
    nodes: Vec<(f64, f64)>,
}

impl GeodesicMeasure {
    pub fn new(atoms: Vec<Atom>, continuous: Option<BetaPart>) -> Result<Self> {
        let mut total = 0.0;
        for atom in &atoms {
            if !(atom.weight >= 0.0 && atom.weight.is_finite()) {
                return Err(Error::Measure(format!("negative weight {}", atom.weight)));
            }
            if !(0.0..=1.0).contains(&atom.exponent) {
                return Err(Error::Measure(format!("exponent {} outside [0, 1]", atom.exponent)));
            }
            total += atom.weight;
        }
        let mut nodes = Vec::new();
        if let Some(part) = continuous {
            if !(part.weight >= 0.0 && part.weight.is_finite()) {
                return Err(Error::Measure(format!("negative weight {}", part.weight)));
            }
            if !(part.a >= 1.0 && part.b >= 1.0 && part.a.is_finite() && part.b.is_finite()) {
                return Err(Error::Measure("beta shape parameters must be >= 1".into()));
            }
            total += part.weight;
            let rule = gauss_legendre_unit();
            let raw: Vec<f64> = rule
                .iter()
                .map(|&(x, w)| w * x.powf(part.a - 1.0) * (1.0 - x).powf(part.b - 1.0))
                .collect();
            let norm: f64 = raw.iter().sum();
            if part.weight > 0.0 {
                nodes = rule
                    .iter()
                    .zip(&raw)
                    .filter(|(_, m)| **m > 0.0)
                    .map(|(&(x, _), m)| (x, (part.weight * m / norm).ln()))
                    .collect();
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Measure(format!("total mass {total} differs from 1")));
        }
        Ok(GeodesicMeasure { atoms, continuous, nodes })
    }

    pub fn point_mass(exponent: f64) -> Result<Self> {
        Self::new(vec![Atom { weight: 1.0, exponent }], None)
    }

    /// Lebesgue measure on `[0, 1]`.
    pub fn uniform() -> Self {
        Self::new(Vec::new(), Some(BetaPart { weight: 1.0, a: 1.0, b: 1.0 }))
            .expect("uniform measure is valid")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn continuous(&self) -> Option<&BetaPart> {
        self.continuous.as_ref()
    }

    /// `ln ∫ e^{αx} dp(α)`.
    pub fn log_eval(&self, x: f64) -> f64 {
        let terms: Vec<f64> = self
            .atoms
            .iter()
            .filter(|a| a.weight > 0.0)
            .map(|a| a.weight.ln() + a.exponent * x)
            .chain(self.nodes.iter().map(|&(alpha, lw)| lw + alpha * x))
            .collect();
        log_sum_exp(&terms)
    }
}

/// `∫ t^α dp(α)` for a geodesic measure.
pub fn geodesic_eval(measure: &GeodesicMeasure, t: f64) -> Result<f64> {
    super::check_argument(t)?;
    Ok(measure.log_eval(t.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_is_power() {
        let m = GeodesicMeasure::point_mass(0.5).unwrap();
        assert!((geodesic_eval(&m, 4.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_atoms_give_arithmetic_mean() {
        let m = GeodesicMeasure::new(
            vec![Atom { weight: 0.5, exponent: 0.0 }, Atom { weight: 0.5, exponent: 1.0 }],
            None,
        )
        .unwrap();
        assert!((geodesic_eval(&m, 9.0).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn uniform_matches_antiderivative() {
        // ∫_0^1 t^α dα = (t - 1) / ln t
        let m = GeodesicMeasure::uniform();
        let e = std::f64::consts::E;
        assert!((geodesic_eval(&m, e).unwrap() - (e - 1.0)).abs() < 1e-13);
        for &t in &[1e-3, 0.5, 7.0, 1e4] {
            let exact = (t - 1.0) / f64::ln(t);
            assert!((geodesic_eval(&m, t).unwrap() / exact - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_measures() {
        assert!(GeodesicMeasure::new(vec![Atom { weight: 0.7, exponent: 0.5 }], None).is_err());
        assert!(GeodesicMeasure::point_mass(1.5).is_err());
        assert!(GeodesicMeasure::new(
            vec![Atom { weight: -0.5, exponent: 0.0 }, Atom { weight: 1.5, exponent: 1.0 }],
            None
        )
        .is_err());
        assert!(GeodesicMeasure::new(Vec::new(), Some(BetaPart { weight: 1.0, a: 0.5, b: 1.0 }))
            .is_err());
        assert!(geodesic_eval(&GeodesicMeasure::uniform(), 0.0).is_err());
    }
}
