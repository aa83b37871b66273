use rayon::prelude::*;

use super::{count_s, dependent_round, independent_round, FracVector, LaminarFamily};
use crate::error::{Error, Result};
use crate::rng::trial_rng;

/// Which rounding procedure to sample.
#[derive(Debug, Clone, Copy)]
pub enum RoundingMode<'a> {
    Dependent(&'a LaminarFamily),
    Independent,
}

impl RoundingMode<'_> {
    /// One rounding of `v` drawn from stream `(seed, trial)`.
    pub fn sample(&self, v: &FracVector, seed: u64, trial: u64) -> Result<Vec<bool>> {
        let mut rng = trial_rng(seed, trial);
        match self {
            RoundingMode::Dependent(fam) => dependent_round(v, fam, &mut rng),
            RoundingMode::Independent => Ok(independent_round(v, &mut rng)),
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub mean: f64,
    /// Sample standard deviation divided by `sqrt(trials)`.
    pub stderr: f64,
    pub trials: usize,
}

impl EstimateReport {
    /// Summarize samples in order; the result does not depend on how the
    /// samples were produced.
    pub fn from_samples(samples: &[f64]) -> Self {
        let t = samples.len();
        if t == 0 {
            return EstimateReport {
                mean: f64::NAN,
                stderr: f64::NAN,
                trials: 0,
            };
        }
        let mean = samples.iter().sum::<f64>() / t as f64;
        let stderr = if t > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1) as f64;
            (var / t as f64).sqrt()
        } else {
            0.0
        };
        EstimateReport {
            mean,
            stderr,
            trials: t,
        }
    }
}

/// Monte Carlo estimate of `E[min(k, ones of the rounding inside S)]`.
pub fn estimate_min_k(
    v: &FracVector,
    s: &[usize],
    k: usize,
    mode: RoundingMode<'_>,
    trials: usize,
    seed: u64,
) -> Result<EstimateReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    if let Some(&bad) = s.iter().find(|&&i| i >= v.len()) {
        return Err(Error::InvalidInput(format!(
            "index {bad} out of range for length {}",
            v.len()
        )));
    }
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let out = mode.sample(v, seed, t)?;
            Ok(count_s(&out, s)?.min(k) as f64)
        })
        .collect::<Result<_>>()?;
    Ok(EstimateReport::from_samples(&samples))
}
