//! Monte Carlo measurement of how many close (and close or distant)
//! facilities end up open for each clustered client.
//!
//! The boundary facility, which is both close and distant, is kept whole by
//! the algorithm. For the close count it is split by a coin that credits it
//! as close with probability `x^c_b / ybar_b`, so that its close part is open
//! with probability exactly `x^c_b`. The coin is drawn after rounding and
//! never influences it.

use rand::Rng as _;
use rayon::prelude::*;

use super::Prepared;
use crate::error::Result;
use crate::rng::trial_rng;
use crate::rounding::EstimateReport;

/// Coverage statistics of one clustered client.
#[derive(Debug, Clone, PartialEq)]
pub struct ClientCoverage {
    pub client: usize,
    pub rbar: usize,
    /// Mean of `min(rbar, open close facilities)`.
    pub close: EstimateReport,
    /// Mean of `min(rbar, open close-or-distant facilities)`.
    pub any: EstimateReport,
}

/// Run `trials` roundings and report coverage for every clustered client.
pub fn coverage_counts(prep: &Prepared<'_>, trials: usize, seed: u64) -> Result<Vec<ClientCoverage>> {
    let clients = &prep.classes.clustered;
    let samples: Vec<Vec<(f64, f64)>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Vec<(f64, f64)>> {
            let mut rng = trial_rng(seed, trial);
            let rounded = prep.round_openings(&mut rng)?;
            let open = |i: usize| rounded[i] || prep.scaled.preopened[i];
            Ok(clients
                .iter()
                .map(|&j| {
                    let split = prep.splits[j].as_ref().expect("clustered clients have splits");
                    let boundary = split.boundary();
                    let mut close = 0usize;
                    for &(i, w) in &split.close {
                        if !open(i) {
                            continue;
                        }
                        if Some(i) == boundary {
                            let denom = prep.scaled.ybar[i].max(prep.scaled.xbar[j][i]);
                            if rng.gen::<f64>() < w / denom {
                                close += 1;
                            }
                        } else {
                            close += 1;
                        }
                    }
                    let mut seen = 0usize;
                    for &(i, _) in &split.close {
                        seen += usize::from(open(i));
                    }
                    for &(i, _) in &split.distant {
                        if Some(i) != boundary {
                            seen += usize::from(open(i));
                        }
                    }
                    (
                        close.min(split.rbar) as f64,
                        seen.min(split.rbar) as f64,
                    )
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok(clients
        .iter()
        .enumerate()
        .map(|(k, &j)| {
            let close: Vec<f64> = samples.iter().map(|s| s[k].0).collect();
            let any: Vec<f64> = samples.iter().map(|s| s[k].1).collect();
            ClientCoverage {
                client: j,
                rbar: prep.scaled.rbar[j],
                close: EstimateReport::from_samples(&close),
                any: EstimateReport::from_samples(&any),
            }
        })
        .collect())
}
