//! Dependent randomized rounding guided by a laminar family.
//!
//! A Type II step couples two fractional entries so their sum is preserved
//! and at least one becomes integral; a Type I step rounds a lone fractional
//! entry independently. Processing the sets of a laminar family smallest
//! first leaves at most one fractional entry per set before moving on to its
//! parent, so each set `S` ends with at least `floor(sum_S v)` ones.
//!
//! Indices are zero-based throughout.

mod estimate;
pub mod suite;

pub use estimate::{estimate_min_k, EstimateReport, RoundingMode};

use crate::error::{Error, Result};
use crate::{is_fractional, snap01, FRAC_TOL};

/// A vector with entries in [0, 1]. Entries within [`FRAC_TOL`] of 0 or 1
/// are stored snapped.
#[derive(Debug, Clone, PartialEq)]
pub struct FracVector(Vec<f64>);

impl FracVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let mut out = values;
        for (i, v) in out.iter_mut().enumerate() {
            if !(v.is_finite() && *v >= -FRAC_TOL && *v <= 1.0 + FRAC_TOL) {
                return Err(Error::InvalidInput(format!("entry {i} = {v} is outside [0, 1]")));
            }
            *v = snap01(v.clamp(0.0, 1.0));
        }
        Ok(FracVector(out))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// A laminar family over `0..ground` in creation order. Every set comes after
/// all of its strict subsets, and the last set is the ground set.
#[derive(Debug, Clone, PartialEq)]
pub struct LaminarFamily {
    ground: usize,
    sets: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
}

impl LaminarFamily {
    /// Validate `sets` and append the ground set as root unless the last set
    /// already is the ground set.
    pub fn new(ground: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut sets: Vec<Vec<usize>> = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        for (k, s) in sets.iter().enumerate() {
            if let Some(&bad) = s.iter().find(|&&i| i >= ground) {
                return Err(Error::Structure(format!(
                    "set {k} contains index {bad} outside ground set of size {ground}"
                )));
            }
        }
        if sets.last().map_or(true, |s| s.len() != ground) {
            sets.push((0..ground).collect());
        }

        let mut member = vec![false; ground];
        let mut parent = vec![None; sets.len()];
        for a in 0..sets.len() {
            for &i in &sets[a] {
                member[i] = true;
            }
            for b in 0..sets.len() {
                if a == b {
                    continue;
                }
                let common = sets[b].iter().filter(|&&i| member[i]).count();
                if common == 0 {
                    continue;
                }
                let b_in_a = common == sets[b].len();
                let a_in_b = common == sets[a].len();
                if !b_in_a && !a_in_b {
                    return Err(Error::Structure(format!(
                        "sets {a} and {b} overlap without nesting"
                    )));
                }
                // b is a strict superset of a: must be created later
                if a_in_b && !b_in_a && b < a {
                    return Err(Error::Structure(format!(
                        "set {b} is created before its strict subset {a}"
                    )));
                }
                if a_in_b && b > a && parent[a].is_none() {
                    parent[a] = Some(b);
                }
            }
            for &i in &sets[a] {
                member[i] = false;
            }
        }
        Ok(LaminarFamily {
            ground,
            sets,
            parent,
        })
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    /// All sets in creation order; the last one is the root.
    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// The first later set containing set `k`.
    pub fn parent(&self, k: usize) -> Option<usize> {
        self.parent[k]
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// One Type II step on two strictly fractional values.
///
/// With `eps = min(1 - a, b)` and `delta = min(a, 1 - b)`, returns
/// `(a + eps, b - eps)` with probability `delta / (eps + delta)`, otherwise
/// `(a - delta, b + delta)`.
pub fn round_pair(a: f64, b: f64, rng: &mut impl rand::Rng) -> Result<(f64, f64)> {
    if !is_fractional(a) || !is_fractional(b) {
        return Err(Error::Contract(format!(
            "round_pair needs two fractional values, got ({a}, {b})"
        )));
    }
    Ok(pair_step(a, b, rng))
}

fn pair_step(a: f64, b: f64, rng: &mut impl rand::Rng) -> (f64, f64) {
    let eps = (1.0 - a).min(b);
    let delta = a.min(1.0 - b);
    let up = rng.gen::<f64>() * (eps + delta) < delta;
    let (na, nb) = if up {
        if 1.0 - a <= b {
            (1.0, b - (1.0 - a))
        } else {
            (a + b, 0.0)
        }
    } else if a <= 1.0 - b {
        (0.0, a + b)
    } else {
        (a - (1.0 - b), 1.0)
    };
    (snap01(na), snap01(nb))
}

/// Dependent rounding of `v`, processing the sets of `family` in creation
/// order and pairing the two lowest-indexed fractional entries each step.
pub fn dependent_round(
    v: &FracVector,
    family: &LaminarFamily,
    rng: &mut impl rand::Rng,
) -> Result<Vec<bool>> {
    if v.len() != family.ground() {
        return Err(Error::Contract(format!(
            "vector of length {} does not match family ground set of size {}",
            v.len(),
            family.ground()
        )));
    }
    let mut w = v.values().to_vec();
    for set in family.sets() {
        let mut carry: Option<usize> = None;
        for &i in set {
            if !is_fractional(w[i]) {
                continue;
            }
            let Some(a) = carry else {
                carry = Some(i);
                continue;
            };
            let (na, ni) = pair_step(w[a], w[i], rng);
            w[a] = na;
            w[i] = ni;
            carry = if is_fractional(na) {
                Some(a)
            } else if is_fractional(ni) {
                Some(i)
            } else {
                None
            };
        }
    }
    // the root covers every index, so at most one fractional entry is left
    for x in w.iter_mut() {
        if is_fractional(*x) {
            *x = if rng.gen::<f64>() < *x { 1.0 } else { 0.0 };
        }
    }
    Ok(w.into_iter().map(|x| x >= 0.5).collect())
}

/// Round each entry to 1 with probability `v_i`, independently.
pub fn independent_round(v: &FracVector, rng: &mut impl rand::Rng) -> Vec<bool> {
    v.values()
        .iter()
        .map(|&p| {
            if p >= 1.0 {
                true
            } else if p <= 0.0 {
                false
            } else {
                rng.gen::<f64>() < p
            }
        })
        .collect()
}

/// `sum_{i in S} x_i`.
pub fn sum_s(x: &[f64], s: &[usize]) -> Result<f64> {
    s.iter()
        .map(|&i| {
            x.get(i).copied().ok_or_else(|| {
                Error::InvalidInput(format!("index {i} out of range for length {}", x.len()))
            })
        })
        .sum()
}

/// Number of ones of a binary vector inside `S`.
pub fn count_s(x: &[bool], s: &[usize]) -> Result<usize> {
    s.iter().try_fold(0, |acc, &i| match x.get(i) {
        Some(&b) => Ok(acc + usize::from(b)),
        None => Err(Error::InvalidInput(format!(
            "index {i} out of range for length {}",
            x.len()
        ))),
    })
}

/// Coefficients `lambda_0..lambda_s` of a function of the count of ones in a
/// set of size `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaVector(pub Vec<f64>);

impl LambdaVector {
    /// `lambda_i = min(k, i)` for `i = 0..=s`.
    pub fn min_k(s: usize, k: usize) -> Self {
        LambdaVector((0..=s).map(|i| i.min(k) as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `lambda_{count of ones of x in S}`.
pub fn g_lambda(x: &[bool], s: &[usize], lambda: &LambdaVector) -> Result<f64> {
    if lambda.len() != s.len() + 1 {
        return Err(Error::InvalidInput(format!(
            "lambda has {} entries, set has {} elements",
            lambda.len(),
            s.len()
        )));
    }
    Ok(lambda.0[count_s(x, s)?])
}

/// Discrete concavity: `lambda_r - 2 lambda_{r+1} + lambda_{r+2} <= 0` for all `r`.
pub fn check_lambda_condition(lambda: &LambdaVector) -> bool {
    lambda
        .0
        .windows(3)
        .all(|w| w[0] - 2.0 * w[1] + w[2] <= 1e-12 * (1.0 + w[1].abs()))
}
