//! The full rounding pipeline.
//!
//! 1. solve the LP relaxation and canonicalize it,
//! 2. scale by `gamma` and pre-open what became integral,
//! 3. split each client's residual connection into close and distant parts
//!    and build the laminar cluster family,
//! 4. round the residual openings with dependent rounding guided by the family,
//! 5. connect each client to its `r_j` nearest open facilities.
//!
//! Steps 1-3 are deterministic and live in [`Prepared`]; only step 4 draws
//! random bits, so Monte Carlo trials share one `Prepared`.

mod cluster;
mod connect;
mod coverage;
mod gamma;
mod scaling;
mod split;

pub use cluster::{build_clusters, Clustering};
pub use connect::{connect, IntegralSolution};
pub use coverage::{coverage_counts, ClientCoverage};
pub use gamma::{compute_gamma, gamma0, gamma_map};
pub use scaling::{scale_and_preopen, ScaledState};
pub use split::{classify_clients, split_close_distant, Classification, ClientSplit};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::{build_lp, canonicalize, solve_lp, FractionalSolution};
use crate::rng::trial_rng;
use crate::rounding::{dependent_round, FracVector, LaminarFamily};

/// Knobs for [`Prepared::with_options`].
#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    /// Scaling constant; defaults to [`gamma0`].
    pub gamma: Option<f64>,
    pub lp_tol: f64,
    /// Assert the 3 * d_max coverage radius after every rounding. Only valid
    /// on metric instances.
    pub check_radius: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            gamma: None,
            lp_tol: 1e-9,
            check_radius: true,
        }
    }
}

/// Everything up to and including clustering, for one instance.
#[derive(Debug, Clone)]
pub struct Prepared<'a> {
    pub inst: &'a Instance,
    pub lp_cost: f64,
    /// Canonical optimal LP solution.
    pub lp: FractionalSolution,
    pub scaled: ScaledState,
    pub splits: Vec<Option<ClientSplit>>,
    pub classes: Classification,
    pub clustering: Clustering,
    openings: FracVector,
    check_radius: bool,
}

/// Per-client diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClientDiag {
    pub client: usize,
    pub r: usize,
    pub rbar: usize,
    pub special: bool,
    pub d_max: Option<f64>,
    #[serde(rename = "R")]
    pub r_gap: Option<f64>,
}

/// Deterministic diagnostics of a prepared instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub gamma: f64,
    pub lp_cost: f64,
    pub preopened: usize,
    pub cluster_count: usize,
    pub cluster_sizes: Vec<usize>,
    pub clients: Vec<ClientDiag>,
}

/// Outcome of one randomized trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub solution: IntegralSolution,
    /// Facilities opened by rounding (pre-opened ones excluded).
    pub rounded: Vec<bool>,
    /// Final open vector.
    pub open: Vec<bool>,
}

impl<'a> Prepared<'a> {
    pub fn new(inst: &'a Instance, gamma: Option<f64>) -> Result<Self> {
        Self::with_options(
            inst,
            PipelineOptions {
                gamma,
                ..PipelineOptions::default()
            },
        )
    }

    pub fn with_options(inst: &'a Instance, opts: PipelineOptions) -> Result<Self> {
        let gamma = opts.gamma.unwrap_or_else(gamma0);
        if !(gamma > 1.0 && gamma < 2.0) {
            return Err(Error::InvalidInput(format!("gamma = {gamma} must lie in (1, 2)")));
        }
        let raw = solve_lp(&build_lp(inst), opts.lp_tol)?;
        raw.check(inst, 1e-6)
            .map_err(|e| Error::internal("lp", e.to_string()))?;
        let lp = canonicalize(&raw, inst)?;
        let scaled = scale_and_preopen(&lp, inst, gamma)?;
        let splits = split_close_distant(&scaled, inst)?;
        let classes = classify_clients(&scaled, &splits)?;
        let clustering = build_clusters(&splits, &scaled, &classes.clustered)?;
        let openings = FracVector::new(scaled.ybar.clone())?;
        Ok(Prepared {
            inst,
            lp_cost: raw.objective,
            lp,
            scaled,
            splits,
            classes,
            clustering,
            openings,
            check_radius: opts.check_radius,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.scaled.gamma
    }

    pub fn family(&self) -> &LaminarFamily {
        &self.clustering.family
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let fam = self.family();
        Diagnostics {
            gamma: self.gamma(),
            lp_cost: self.lp_cost,
            preopened: self.scaled.preopened.iter().filter(|p| **p).count(),
            cluster_count: self.clustering.num_clusters(),
            cluster_sizes: fam.sets()[..self.clustering.num_clusters()]
                .iter()
                .map(Vec::len)
                .collect(),
            clients: (0..self.inst.num_clients())
                .map(|j| {
                    let split = self.splits[j].as_ref();
                    ClientDiag {
                        client: j,
                        r: self.inst.requirement(j),
                        rbar: self.scaled.rbar[j],
                        special: self.classes.special.contains(&j),
                        d_max: split.map(|s| s.d_max),
                        r_gap: split.map(|s| s.r_gap),
                    }
                })
                .collect(),
        }
    }

    /// Round the residual openings guided by the cluster family.
    pub fn round_openings(&self, rng: &mut impl rand::Rng) -> Result<Vec<bool>> {
        dependent_round(&self.openings, self.family(), rng)
    }

    /// Clients in the clustered set with fewer than `rbar_j` rounded-open
    /// facilities within `3 * d_max`.
    pub fn radius_shortfalls(&self, rounded: &[bool]) -> Vec<usize> {
        self.classes
            .clustered
            .iter()
            .copied()
            .filter(|&j| {
                let split = self.splits[j].as_ref().expect("clustered clients have splits");
                let radius = 3.0 * split.d_max * (1.0 + 1e-12) + 1e-12;
                let near = (0..rounded.len())
                    .filter(|&i| rounded[i] && self.inst.dist(i, j) <= radius)
                    .count();
                near < split.rbar
            })
            .collect()
    }

    /// One randomized run on stream `(seed, trial)`.
    pub fn trial(&self, seed: u64, trial: u64) -> Result<Trial> {
        let mut rng = trial_rng(seed, trial);
        let rounded = self.round_openings(&mut rng)?;
        if self.check_radius {
            if let Some(&j) = self.radius_shortfalls(&rounded).first() {
                return Err(Error::internal(
                    "round",
                    format!("client {j} has too few open facilities within 3 * d_max"),
                ));
            }
        }
        let open: Vec<bool> = rounded
            .iter()
            .zip(&self.scaled.preopened)
            .map(|(a, b)| *a || *b)
            .collect();
        let solution = connect(self.inst, &open).map_err(|e| match e {
            Error::Infeasible(msg) => Error::internal("connect", msg),
            other => other,
        })?;
        Ok(Trial {
            solution,
            rounded,
            open,
        })
    }
}

/// Run the whole pipeline once, drawing from stream `(seed, 0)`.
pub fn run_alg(inst: &Instance, seed: u64, gamma: Option<f64>) -> Result<(IntegralSolution, Diagnostics)> {
    let prep = Prepared::new(inst, gamma)?;
    let trial = prep.trial(seed, 0)?;
    Ok((trial.solution, prep.diagnostics()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate, GenMode};

    #[test]
    fn integral_lp_is_returned_as_is() {
        // one free facility at distance 0 for every client
        let inst = Instance::new(
            vec![0.0, 5.0],
            vec![vec![0.0, 1.0], vec![0.0, 2.0]],
            vec![1, 1],
        )
        .unwrap();
        let prep = Prepared::new(&inst, None).unwrap();
        assert!(prep.lp_cost.abs() < 1e-12);
        for seed in 0..20 {
            let (sol, _) = run_alg(&inst, seed, None).unwrap();
            assert_eq!(sol.open, vec![0]);
            assert_eq!(sol.cost, 0.0);
        }
    }

    #[test]
    fn runs_are_feasible_and_deterministic() {
        for seed in 0..10 {
            let inst = generate(GenMode::Euclidean, 7, 6, 3, seed).unwrap();
            let prep = Prepared::new(&inst, None).unwrap();
            let a = prep.trial(99, 3).unwrap();
            let b = prep.trial(99, 3).unwrap();
            assert_eq!(a, b);
            a.solution.check(&inst).unwrap();
            assert!(a.solution.cost >= prep.lp_cost - 1e-9);
        }
    }

    #[test]
    fn gamma_override_is_validated() {
        let inst = generate(GenMode::Euclidean, 3, 3, 1, 0).unwrap();
        assert!(matches!(Prepared::new(&inst, Some(2.5)), Err(Error::InvalidInput(_))));
        assert!(Prepared::new(&inst, Some(1.9)).is_ok());
    }

    #[test]
    fn diagnostics_shape() {
        let inst = generate(GenMode::Uniform, 6, 5, 2, 4).unwrap();
        let prep = Prepared::new(&inst, None).unwrap();
        let d = prep.diagnostics();
        assert_eq!(d.clients.len(), 5);
        assert_eq!(d.cluster_sizes.len(), d.cluster_count);
        for c in &d.clients {
            assert_eq!(c.d_max.is_some(), c.rbar > 0);
        }
    }
}
