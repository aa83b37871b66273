//! Randomized property suite for the rounding engine, as run by
//! `ftfl verify-rounding`.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use super::{count_s, estimate_min_k, FracVector, LaminarFamily, RoundingMode};
use crate::error::Result;
use crate::rng::{seeded, trial_rng};
use crate::snapped_floor;

/// Statistical checks use this many standard errors.
pub const SIGMA_LEVEL: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Fixed `k` for the min-k checks; random in `1..=|S|` when absent.
    pub k: Option<usize>,
    pub subsets: usize,
    pub triples: usize,
    pub family_sets: usize,
}

impl SuiteConfig {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        SuiteConfig {
            n,
            trials,
            seed,
            k: None,
            subsets: 50,
            triples: 50,
            family_sets: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub rows: Vec<CheckRow>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{:<width$}  {}  {}\n",
                    r.name,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.detail
                )
            })
            .collect()
    }
}

/// Entries uniform in (0, 1).
pub fn random_frac_vector(n: usize, rng: &mut impl rand::Rng) -> FracVector {
    FracVector::new((0..n).map(|_| rng.gen_range(0.02..0.98)).collect())
        .expect("entries are in range")
}

/// A random laminar family with up to `target` proper sets (each of size at
/// least 2) plus the root, mixing nested and disjoint sets.
pub fn random_laminar_family(n: usize, target: usize, rng: &mut impl rand::Rng) -> LaminarFamily {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    // intervals over positions of `perm` are laminar iff nested or disjoint
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    let mut attempts = 0;
    while intervals.len() < target && attempts < 100 * (target + 1) && n >= 3 {
        attempts += 1;
        let a = rng.gen_range(0..n - 1);
        let b = rng.gen_range(a + 2..=n);
        if b - a == n || intervals.contains(&(a, b)) {
            continue;
        }
        let compatible = intervals
            .iter()
            .all(|&(c, d)| b <= c || d <= a || (c <= a && b <= d) || (a <= c && d <= b));
        if compatible {
            intervals.push((a, b));
        }
    }
    intervals.sort_by_key(|&(a, b)| (b - a, a));
    let sets = intervals
        .into_iter()
        .map(|(a, b)| perm[a..b].to_vec())
        .collect();
    LaminarFamily::new(n, sets).expect("intervals are laminar")
}

#[derive(Clone)]
struct Tally {
    ones: Vec<u64>,
    sum_violations: u64,
    floor_violations: u64,
    all_ones: Vec<u64>,
    all_zeros: Vec<u64>,
}

impl Tally {
    fn new(n: usize, subsets: usize) -> Self {
        Tally {
            ones: vec![0; n],
            sum_violations: 0,
            floor_violations: 0,
            all_ones: vec![0; subsets],
            all_zeros: vec![0; subsets],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        let add = |a: &mut Vec<u64>, b: &[u64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.ones, &other.ones);
        add(&mut self.all_ones, &other.all_ones);
        add(&mut self.all_zeros, &other.all_zeros);
        self.sum_violations += other.sum_violations;
        self.floor_violations += other.floor_violations;
        self
    }
}

/// Marginals, sum preservation, per-set floors, negative correlation and the
/// min-k comparisons on random vectors and families.
pub fn run_property_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rng = seeded(cfg.seed);
    let n = cfg.n.max(2);
    let trials = cfg.trials.max(1);
    let t = trials as f64;
    let v = random_frac_vector(n, &mut rng);
    let fam = random_laminar_family(n, cfg.family_sets, &mut rng);
    let subsets: Vec<Vec<usize>> = (0..cfg.subsets)
        .map(|_| {
            let size = rng.gen_range(2..=n.min(4));
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            idx.truncate(size);
            idx.sort_unstable();
            idx
        })
        .collect();
    let total = v.sum();
    let set_floors: Vec<i64> = fam
        .sets()
        .iter()
        .map(|s| snapped_floor(s.iter().map(|&i| v.values()[i]).sum()))
        .collect();
    let run_seed: u64 = rng.gen();

    let tally = (0..trials as u64)
        .into_par_iter()
        .fold(
            || Tally::new(n, subsets.len()),
            |mut acc, trial| {
                let out = RoundingMode::Dependent(&fam)
                    .sample(&v, run_seed, trial)
                    .expect("dimensions validated");
                let ones = out.iter().filter(|b| **b).count() as i64;
                if ones != snapped_floor(total) && ones != -snapped_floor(-total) {
                    acc.sum_violations += 1;
                }
                for (s, &fl) in fam.sets().iter().zip(&set_floors) {
                    if (count_s(&out, s).unwrap() as i64) < fl {
                        acc.floor_violations += 1;
                    }
                }
                for (i, &b) in out.iter().enumerate() {
                    acc.ones[i] += u64::from(b);
                }
                for (k, s) in subsets.iter().enumerate() {
                    let c = count_s(&out, s).unwrap();
                    acc.all_ones[k] += u64::from(c == s.len());
                    acc.all_zeros[k] += u64::from(c == 0);
                }
                acc
            },
        )
        .reduce(|| Tally::new(n, subsets.len()), Tally::merge);

    let mut rows = Vec::new();

    let worst_marginal = v
        .values()
        .iter()
        .zip(&tally.ones)
        .map(|(&p, &c)| {
            let sigma = (p * (1.0 - p) / t).sqrt();
            ((c as f64 / t - p).abs(), sigma)
        })
        .fold((0.0f64, true), |(worst, ok), (dev, sigma)| {
            (worst.max(dev / sigma.max(1e-300)), ok && dev <= SIGMA_LEVEL * sigma)
        });
    rows.push(CheckRow {
        name: "P1 marginals".into(),
        passed: worst_marginal.1,
        detail: format!("n={n} trials={trials} worst deviation {:.2} sigma", worst_marginal.0),
    });
    rows.push(CheckRow {
        name: "P2 total sum".into(),
        passed: tally.sum_violations == 0,
        detail: format!("{} violations", tally.sum_violations),
    });
    rows.push(CheckRow {
        name: "P2' per-set floors".into(),
        passed: tally.floor_violations == 0,
        detail: format!("{} violations over {} sets", tally.floor_violations, fam.len()),
    });

    let mut p3_fail = 0;
    for (k, s) in subsets.iter().enumerate() {
        let q1: f64 = s.iter().map(|&i| v.values()[i]).product();
        let q0: f64 = s.iter().map(|&i| 1.0 - v.values()[i]).product();
        for (count, q) in [(tally.all_ones[k], q1), (tally.all_zeros[k], q0)] {
            let p = count as f64 / t;
            let sigma = (q * (1.0 - q) / t).sqrt().max((p * (1.0 - p) / t).sqrt());
            if p > q + SIGMA_LEVEL * sigma {
                p3_fail += 1;
            }
        }
    }
    rows.push(CheckRow {
        name: "P3 negative correlation".into(),
        passed: p3_fail == 0,
        detail: format!("{p3_fail} of {} bounds exceeded", 2 * subsets.len()),
    });

    let (mut thm2_fail, mut thm3_fail, mut cor4_fail) = (0, 0, 0);
    for _ in 0..cfg.triples {
        let tv = random_frac_vector(n, &mut rng);
        let tfam = random_laminar_family(n, cfg.family_sets, &mut rng);
        let size = rng.gen_range(1..=n);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        idx.truncate(size);
        idx.sort_unstable();
        let k = cfg.k.unwrap_or_else(|| rng.gen_range(1..=size)).max(1);
        let tseed: u64 = rng.gen();
        let dep = estimate_min_k(&tv, &idx, k, RoundingMode::Dependent(&tfam), trials, tseed)?;
        let ind = estimate_min_k(&tv, &idx, k, RoundingMode::Independent, trials, tseed ^ 1)?;
        let pooled = (dep.stderr.powi(2) + ind.stderr.powi(2)).sqrt();
        if dep.mean < ind.mean - SIGMA_LEVEL * pooled {
            thm2_fail += 1;
        }
        let sum: f64 = idx.iter().map(|&i| tv.values()[i]).sum();
        let bound = k as f64 * (1.0 - (-sum / k as f64).exp());
        if ind.mean < bound - SIGMA_LEVEL * ind.stderr {
            thm3_fail += 1;
        }
        if dep.mean < bound - SIGMA_LEVEL * dep.stderr {
            cor4_fail += 1;
        }
    }
    let triples = cfg.triples;
    rows.push(CheckRow {
        name: "dependent >= independent (min k)".into(),
        passed: thm2_fail == 0,
        detail: format!("{thm2_fail} of {triples} triples below"),
    });
    rows.push(CheckRow {
        name: "independent >= k(1-exp(-sum/k))".into(),
        passed: thm3_fail == 0,
        detail: format!("{thm3_fail} of {triples} triples below"),
    });
    rows.push(CheckRow {
        name: "dependent >= k(1-exp(-sum/k))".into(),
        passed: cor4_fail == 0,
        detail: format!("{cor4_fail} of {triples} triples below"),
    });

    let replay = || -> Result<(Vec<bool>, Vec<bool>)> {
        let dep = RoundingMode::Dependent(&fam).sample(&v, run_seed, 0)?;
        let ind = super::independent_round(&v, &mut trial_rng(run_seed, 0));
        Ok((dep, ind))
    };
    let (a, b) = (replay()?, replay()?);
    rows.push(CheckRow {
        name: "determinism".into(),
        passed: a == b,
        detail: "same seed reproduces the same rounding".into(),
    });

    Ok(SuiteReport { rows })
}
