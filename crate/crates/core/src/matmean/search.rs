//! Randomized search for counterexamples to `AσB ≥ I ⇒ A^pσB^p ≥ I`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::precise::{mean_min_eigenvalue, precision_for, SpectralPd};
use super::{operator_mean, random_spectrum, PositiveMatrix};
use crate::classify::{check_pmi_r, GridSpec, ToleranceConfig};
use crate::error::{Error, Result};
use crate::linalg::min_eigenvalue;
use crate::means::PositiveFunction;

/// Eigenvalue range of the random matrices.
pub const EIGEN_RANGE: (f64, f64) = (1e-4, 1e4);
/// `λ_min(A^pσB^p) - 1` below this is reported as a witness.
pub const WITNESS_TOL: f64 = 1e-8;
/// Relative margin put on top of `λ_min(AσB) = 1` after rescaling.
const RESCALE_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub p: f64,
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { p: 2.0, trials: 10_000, dim: 3, seed: 7 }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::Parameter(format!("p = {} must be > 1", self.p)));
        }
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be >= 1".into()));
        }
        if self.dim == 0 || self.dim > super::MAX_DIM {
            return Err(Error::Parameter(format!("dim must be in 1..={}", super::MAX_DIM)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchPhase {
    ScalarProbe,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AndoHiaiWitness {
    pub a: PositiveMatrix,
    pub b: PositiveMatrix,
    pub p: f64,
    /// `λ_min(AσB) - 1`.
    pub min_eig_before: f64,
    /// `λ_min(A^pσB^p) - 1`.
    pub min_eig_after: f64,
    pub phase: SearchPhase,
    /// Index of the random trial, absent for the scalar probe.
    pub trial_index: Option<usize>,
    /// Grid point of the scalar probe.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub probe_t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub config: SearchConfig,
    /// Smallest `ln f(t^p) - p ln f(t)` seen by the scalar probe.
    pub scalar_probe_min: f64,
    pub witness: Option<AndoHiaiWitness>,
    /// Random trials evaluated before stopping.
    pub trials_run: usize,
    /// Trials whose mean could not be evaluated.
    pub skipped: usize,
}

impl SearchReport {
    pub fn found(&self) -> bool {
        self.witness.is_some()
    }
}

fn scalar_probe<F: PositiveFunction + ?Sized>(f: &F, cfg: &SearchConfig) -> Result<(f64, Option<AndoHiaiWitness>)> {
    let report = check_pmi_r(f, cfg.p, &GridSpec::default(), &ToleranceConfig::default())?;
    let t = report.extreme.t;
    let c = (1.0 + RESCALE_MARGIN) / f.eval(t)?;
    let a = PositiveMatrix::diagonal(&vec![c; cfg.dim])?;
    let b = PositiveMatrix::diagonal(&vec![c * t; cfg.dim])?;
    let (before, after) = implication_gap(f, &a, &b, cfg.p)?;
    let witness = (after < -WITNESS_TOL).then_some(AndoHiaiWitness {
        a,
        b,
        p: cfg.p,
        min_eig_before: before,
        min_eig_after: after,
        phase: SearchPhase::ScalarProbe,
        trial_index: None,
        probe_t: Some(t),
    });
    Ok((report.extreme.value, witness))
}

/// `(λ_min(AσB) - 1, λ_min(A^pσB^p) - 1)`.
pub fn implication_gap<F: PositiveFunction + ?Sized>(f: &F, a: &PositiveMatrix, b: &PositiveMatrix, p: f64) -> Result<(f64, f64)> {
    let before = operator_mean(f, a, b, 0.0)?.min_eigenvalue() - 1.0;
    let after = operator_mean(f, &a.power(p), &b.power(p), 0.0)?;
    let n = after.dim();
    let shifted = after.entries() - nalgebra::DMatrix::<f64>::identity(n, n);
    Ok((before, min_eigenvalue(&shifted)?))
}

enum Trial {
    Witness(Box<AndoHiaiWitness>),
    Clean,
    Skipped,
}

fn random_trial<F: PositiveFunction + Sync + ?Sized>(f: &F, cfg: &SearchConfig, index: usize) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let mut run = || -> Result<Option<AndoHiaiWitness>> {
        let (qa, la) = random_spectrum(&mut rng, cfg.dim, EIGEN_RANGE.0, EIGEN_RANGE.1)?;
        let (qb, lb) = random_spectrum(&mut rng, cfg.dim, EIGEN_RANGE.0, EIGEN_RANGE.1)?;
        let prec = precision_for(&la, &lb, cfg.p);
        let (a, b) = (SpectralPd::new(&qa, &la, prec), SpectralPd::new(&qb, &lb, prec));
        let m = mean_min_eigenvalue(f, &a, &b)?;
        let c = (1.0 + RESCALE_MARGIN) / m;
        let (a, b) = (a.scaled(c), b.scaled(c));
        // exact by homogeneity of the mean
        let before = c * m - 1.0;
        let after = mean_min_eigenvalue(f, &a.power(cfg.p), &b.power(cfg.p))? - 1.0;
        if after >= -WITNESS_TOL {
            return Ok(None);
        }
        let to_matrix = |s: &SpectralPd| {
            let (q, values) = s.to_f64();
            PositiveMatrix::from_spectral(values, q)
        };
        Ok(Some(AndoHiaiWitness {
            a: to_matrix(&a)?,
            b: to_matrix(&b)?,
            p: cfg.p,
            min_eig_before: before,
            min_eig_after: after,
            phase: SearchPhase::Random,
            trial_index: Some(index),
            probe_t: None,
        }))
    };
    match run() {
        Ok(Some(w)) => Trial::Witness(Box::new(w)),
        Ok(None) => Trial::Clean,
        Err(e) => {
            log::debug!("trial {index} skipped: {e}");
            Trial::Skipped
        }
    }
}

/// Scalar probe on the default grid, then `cfg.trials` random pairs. Trial
/// `i` draws from stream `i` of a ChaCha8 generator seeded with `cfg.seed`,
/// so the outcome does not depend on scheduling; the reported witness is
/// the one with the smallest trial index.
pub fn ando_hiai_search<F: PositiveFunction + Sync + ?Sized>(f: &F, cfg: &SearchConfig) -> Result<SearchReport> {
    cfg.validate()?;
    let (scalar_probe_min, witness) = scalar_probe(f, cfg)?;
    if witness.is_some() {
        return Ok(SearchReport { config: cfg.clone(), scalar_probe_min, witness, trials_run: 0, skipped: 0 });
    }
    let outcomes: Vec<Trial> = (0..cfg.trials).into_par_iter().map(|i| random_trial(f, cfg, i)).collect();
    let skipped = outcomes.iter().filter(|t| matches!(t, Trial::Skipped)).count();
    let first = outcomes.iter().position(|t| matches!(t, Trial::Witness(_)));
    let trials_run = first.map_or(cfg.trials, |i| i + 1);
    let witness = first.and_then(|i| match outcomes.into_iter().nth(i) {
        Some(Trial::Witness(w)) => Some(*w),
        _ => None,
    });
    Ok(SearchReport { config: cfg.clone(), scalar_probe_min, witness, trials_run, skipped })
}
