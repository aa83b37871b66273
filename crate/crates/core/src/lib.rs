//! Randomized dependent LP-rounding for metric Fault-Tolerant Uncapacitated
//! Facility Location (FTFL).
//!
//! Each client `j` must be connected to `r_j` distinct open facilities. The
//! pipeline solves the LP relaxation, scales it by the constant
//! [`pipeline::compute_gamma`] (about 1.7244), pre-opens facilities that became
//! integral, builds a laminar family of clusters over the residual fractional
//! openings, and rounds those openings with dependent rounding guided by the
//! family. The expected cost is at most `gamma` times the LP optimum.
//!
//! Alongside the algorithm the crate ships the pieces needed to check it:
//! a dense simplex LP solver, an exhaustive exact solver for small instances,
//! and Monte Carlo estimators for the rounding guarantees.
//!
//! ```
//! use ftfl::instance::{generate, GenMode};
//! use ftfl::pipeline::run_alg;
//!
//! let inst = generate(GenMode::Euclidean, 6, 5, 2, 7).unwrap();
//! let (sol, diag) = run_alg(&inst, 1, None).unwrap();
//! sol.check(&inst).unwrap();
//! assert!(diag.lp_cost <= sol.cost + 1e-9);
//! ```

pub mod cli;
pub mod error;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod rounding;

pub use error::{Error, Result};

/// Values within this distance of 0 or 1 (or of an integer, for sums) are
/// treated as integral.
pub const FRAC_TOL: f64 = 1e-9;

/// Snap `v` to 0 or 1 when it lies within [`FRAC_TOL`] of either.
#[inline]
pub fn snap01(v: f64) -> f64 {
    if v.abs() <= FRAC_TOL {
        0.0
    } else if (v - 1.0).abs() <= FRAC_TOL {
        1.0
    } else {
        v
    }
}

/// Floor that first snaps `v` to the nearest integer when within [`FRAC_TOL`].
#[inline]
pub fn snapped_floor(v: f64) -> i64 {
    let r = v.round();
    if (v - r).abs() <= FRAC_TOL {
        r as i64
    } else {
        v.floor() as i64
    }
}

/// True when `v` lies strictly inside (0, 1) beyond the snapping threshold.
#[inline]
pub fn is_fractional(v: f64) -> bool {
    v > FRAC_TOL && v < 1.0 - FRAC_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping() {
        assert_eq!(snap01(1e-10), 0.0);
        assert_eq!(snap01(1.0 - 1e-10), 1.0);
        assert_eq!(snap01(0.5), 0.5);
        assert_eq!(snapped_floor(0.9999999999), 1);
        assert_eq!(snapped_floor(1.7), 1);
        assert_eq!(snapped_floor(2.0000000001), 2);
        assert!(!is_fractional(1.0 - 1e-12));
        assert!(is_fractional(0.3));
    }
}
