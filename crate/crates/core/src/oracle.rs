//! Exhaustive exact solver for small instances and approximation-ratio
//! reports.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::pipeline::{connect, IntegralSolution, PipelineOptions, Prepared};
use crate::rounding::EstimateReport;

/// Largest facility count [`exact_opt`] accepts.
pub const MAX_EXACT_FACILITIES: usize = 20;

#[derive(Clone, Copy)]
struct Best {
    cost: f64,
    mask: u32,
}

impl Best {
    const NONE: Best = Best {
        cost: f64::INFINITY,
        mask: u32::MAX,
    };

    /// Lower cost wins; equal costs go to the lexicographically smaller open
    /// set.
    fn better(self, other: Best) -> Best {
        match self.cost.total_cmp(&other.cost) {
            std::cmp::Ordering::Less => self,
            std::cmp::Ordering::Greater => other,
            std::cmp::Ordering::Equal => {
                if lex_less(self.mask, other.mask) {
                    self
                } else {
                    other
                }
            }
        }
    }
}

fn lex_less(a: u32, b: u32) -> bool {
    if a == b {
        return false;
    }
    if b == u32::MAX {
        return true;
    }
    if a == u32::MAX {
        return false;
    }
    // below the lowest differing bit both sets agree; the set holding that
    // bit is smaller unless the other one has no elements beyond it
    let low = (a ^ b).trailing_zeros();
    let below = (1u32 << low) - 1;
    let (with, without) = if a & (1 << low) != 0 { (a, b) } else { (b, a) };
    if without & !below == 0 {
        without == a
    } else {
        with == a
    }
}

/// Minimum-cost integral solution by enumerating every facility subset of
/// size at least `max_j r_j`.
pub fn exact_opt(inst: &Instance) -> Result<IntegralSolution> {
    let m = inst.num_facilities();
    if m > MAX_EXACT_FACILITIES {
        return Err(Error::Size(format!(
            "exact enumeration supports at most {MAX_EXACT_FACILITIES} facilities, got {m}"
        )));
    }
    let rmax = inst.max_requirement();
    if rmax > m {
        return Err(Error::Infeasible(format!("requirement {rmax} exceeds {m} facilities")));
    }
    let order: Vec<Vec<usize>> = (0..inst.num_clients())
        .map(|j| inst.facilities_by_distance(j))
        .collect();
    let eval = |mask: u32, bound: f64| -> Option<f64> {
        let mut cost: f64 = (0..m)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| inst.opening_cost(i))
            .sum();
        if cost > bound {
            return None;
        }
        for (j, ord) in order.iter().enumerate() {
            let r = inst.requirement(j);
            cost += ord
                .iter()
                .filter(|&&i| mask >> i & 1 == 1)
                .take(r)
                .map(|&i| inst.dist(i, j))
                .sum::<f64>();
        }
        Some(cost)
    };

    let total: u64 = 1 << m;
    let chunk = 1u64 << m.saturating_sub(6);
    let best = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut best = Best::NONE;
            for mask in c * chunk..((c + 1) * chunk).min(total) {
                let mask = mask as u32;
                if (mask.count_ones() as usize) < rmax {
                    continue;
                }
                if let Some(cost) = eval(mask, best.cost) {
                    best = best.better(Best { cost, mask });
                }
            }
            best
        })
        .reduce(|| Best::NONE, Best::better);

    let open: Vec<bool> = (0..m).map(|i| best.mask >> i & 1 == 1).collect();
    connect(inst, &open)
}

/// Empirical performance of the pipeline on one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub instance: String,
    pub m: usize,
    pub n: usize,
    pub rmax: usize,
    pub lp_cost: f64,
    pub opt_cost: Option<f64>,
    pub alg_mean: f64,
    pub alg_stderr: f64,
    pub ratio_to_lp: f64,
    pub ratio_to_opt: Option<f64>,
    pub trials: usize,
    pub feasibility_failures: usize,
    /// Cost of every trial, in trial order.
    pub costs: Vec<f64>,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num.abs() <= 1e-12 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// Run `trials` independent pipeline roundings (streams `(seed, 0..trials)`)
/// and summarize them; `with_exact` adds the exact optimum when the instance
/// is small enough.
pub fn ratio_report(inst: &Instance, trials: usize, seed: u64, with_exact: bool) -> Result<RatioReport> {
    ratio_report_with(inst, trials, seed, with_exact, PipelineOptions::default())
}

pub fn ratio_report_with(
    inst: &Instance,
    trials: usize,
    seed: u64,
    with_exact: bool,
    opts: PipelineOptions,
) -> Result<RatioReport> {
    ratio_report_prepared(&Prepared::with_options(inst, opts)?, trials, seed, with_exact)
}

/// [`ratio_report`] on an already prepared instance.
pub fn ratio_report_prepared(
    prep: &Prepared<'_>,
    trials: usize,
    seed: u64,
    with_exact: bool,
) -> Result<RatioReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let inst = prep.inst;
    let outcomes: Vec<Option<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| match prep.trial(seed, t) {
            Ok(tr) => Ok(tr.solution.check(inst).ok().map(|_| tr.solution.cost)),
            Err(Error::Internal { stage: "connect", .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let costs: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let feasibility_failures = trials - costs.len();
    let est = EstimateReport::from_samples(&costs);
    let opt_cost = if with_exact && inst.num_facilities() <= MAX_EXACT_FACILITIES {
        Some(exact_opt(inst)?.cost)
    } else {
        None
    };
    Ok(RatioReport {
        instance: String::new(),
        m: inst.num_facilities(),
        n: inst.num_clients(),
        rmax: inst.max_requirement(),
        lp_cost: prep.lp_cost,
        opt_cost,
        alg_mean: est.mean,
        alg_stderr: est.stderr,
        ratio_to_lp: ratio(est.mean, prep.lp_cost),
        ratio_to_opt: opt_cost.map(|o| ratio(est.mean, o)),
        trials,
        feasibility_failures,
        costs,
    })
}
