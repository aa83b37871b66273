//! LP relaxation of the FTFL integer program.
//!
//! Variables are ordered `y_0..y_{m-1}` followed by `x` in client-major order
//! (`x[j][i]` at `m + j*m + i`). Rows are the `n` coverage rows
//! `sum_i x_ij >= r_j`, then `n*m` linkage rows `x_ij - y_i <= 0`, then `m`
//! bound rows `y_i <= 1`. Nonnegativity is implicit.

mod simplex;

pub use simplex::DenseSimplex;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::{snap01, FRAC_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization LP over nonnegative variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    /// Instance dimensions the variables were laid out for.
    pub facilities: usize,
    pub clients: usize,
}

impl LpProblem {
    pub fn y_var(&self, facility: usize) -> usize {
        facility
    }

    pub fn x_var(&self, facility: usize, client: usize) -> usize {
        self.facilities + client * self.facilities + facility
    }
}

/// Anything that can minimize an [`LpProblem`]. Returns the variable values.
pub trait LpSolver {
    fn solve(&self, lp: &LpProblem, tol: f64) -> Result<Vec<f64>>;
}

/// A fractional FTFL solution `(x, y)`; `x[j][i]` is client-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub objective: f64,
}

impl FractionalSolution {
    pub fn cost(inst: &Instance, x: &[Vec<f64>], y: &[f64]) -> f64 {
        let open: f64 = y.iter().zip(inst.opening_costs()).map(|(y, f)| y * f).sum();
        let conn: f64 = x
            .iter()
            .enumerate()
            .map(|(j, row)| {
                row.iter()
                    .zip(inst.client_costs(j))
                    .map(|(x, c)| x * c)
                    .sum::<f64>()
            })
            .sum();
        open + conn
    }

    /// Check LP feasibility and objective consistency within `tol`.
    pub fn check(&self, inst: &Instance, tol: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::internal("lp", msg));
        for (i, &y) in self.y.iter().enumerate() {
            if y < -tol || y > 1.0 + tol {
                return bad(format!("y[{i}] = {y} outside [0, 1]"));
            }
        }
        for (j, row) in self.x.iter().enumerate() {
            let total: f64 = row.iter().sum();
            if total < inst.requirement(j) as f64 - tol {
                return bad(format!("client {j} covered {total} < {}", inst.requirement(j)));
            }
            for (i, &x) in row.iter().enumerate() {
                if x < -tol || x > self.y[i] + tol {
                    return bad(format!("x[{j}][{i}] = {x} violates 0 <= x <= y = {}", self.y[i]));
                }
            }
        }
        let recomputed = Self::cost(inst, &self.x, &self.y);
        if (recomputed - self.objective).abs() > tol * (1.0 + recomputed.abs()) {
            return bad(format!(
                "objective {} disagrees with recomputed cost {recomputed}",
                self.objective
            ));
        }
        Ok(())
    }
}

/// The relaxation with integrality replaced by nonnegativity.
pub fn build_lp(inst: &Instance) -> LpProblem {
    let m = inst.num_facilities();
    let n = inst.num_clients();
    let num_vars = m + n * m;
    let mut objective = Vec::with_capacity(num_vars);
    objective.extend_from_slice(inst.opening_costs());
    for j in 0..n {
        objective.extend_from_slice(inst.client_costs(j));
    }
    let mut lp = LpProblem {
        num_vars,
        objective,
        rows: Vec::with_capacity(n + n * m + m),
        facilities: m,
        clients: n,
    };
    for j in 0..n {
        let coeffs = (0..m).map(|i| (lp.x_var(i, j), 1.0)).collect();
        lp.rows.push(Row {
            coeffs,
            sense: Sense::Ge,
            rhs: inst.requirement(j) as f64,
        });
    }
    for j in 0..n {
        for i in 0..m {
            lp.rows.push(Row {
                coeffs: vec![(lp.x_var(i, j), 1.0), (lp.y_var(i), -1.0)],
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
    }
    for i in 0..m {
        lp.rows.push(Row {
            coeffs: vec![(lp.y_var(i), 1.0)],
            sense: Sense::Le,
            rhs: 1.0,
        });
    }
    lp
}

/// Solve with the built-in [`DenseSimplex`].
pub fn solve_lp(lp: &LpProblem, tol: f64) -> Result<FractionalSolution> {
    solve_lp_with(&DenseSimplex::default(), lp, tol)
}

/// Solve with any [`LpSolver`] and unpack into `(x, y)`.
pub fn solve_lp_with(solver: &dyn LpSolver, lp: &LpProblem, tol: f64) -> Result<FractionalSolution> {
    let values = solver.solve(lp, tol)?;
    if values.len() != lp.num_vars {
        return Err(Error::SolverFailure(format!(
            "solver returned {} values for {} variables",
            values.len(),
            lp.num_vars
        )));
    }
    let m = lp.facilities;
    let y: Vec<f64> = (0..m).map(|i| values[lp.y_var(i)].clamp(0.0, 1.0)).collect();
    let x: Vec<Vec<f64>> = (0..lp.clients)
        .map(|j| (0..m).map(|i| values[lp.x_var(i, j)].max(0.0)).collect())
        .collect();
    let objective = values
        .iter()
        .zip(&lp.objective)
        .map(|(v, c)| v * c)
        .sum();
    Ok(FractionalSolution { x, y, objective })
}

/// Rebuild `x` greedily for the fixed `y` so each client has at most one
/// facility with `0 < x_ij < y_i`, and that facility is its farthest server.
///
/// `y` is snapped to {0, 1} within [`FRAC_TOL`] first. Facilities are filled
/// in (distance, index) order up to exactly `r_j`.
pub fn canonicalize(sol: &FractionalSolution, inst: &Instance) -> Result<FractionalSolution> {
    let y: Vec<f64> = sol.y.iter().map(|&v| snap01(v)).collect();
    let total_open: f64 = y.iter().sum();
    let mut x = vec![vec![0.0; inst.num_facilities()]; inst.num_clients()];
    for (j, row) in x.iter_mut().enumerate() {
        let r = inst.requirement(j) as f64;
        if total_open < r - FRAC_TOL {
            return Err(Error::Infeasible(format!(
                "client {j} needs {r} but total opening is {total_open}"
            )));
        }
        let mut remaining = r;
        for i in inst.facilities_by_distance(j) {
            if remaining <= 0.0 {
                break;
            }
            if y[i] <= 0.0 {
                continue;
            }
            if y[i] <= remaining + FRAC_TOL {
                row[i] = y[i];
                remaining -= y[i];
                if remaining < FRAC_TOL {
                    remaining = 0.0;
                }
            } else {
                row[i] = remaining;
                remaining = 0.0;
            }
        }
    }
    let objective = FractionalSolution::cost(inst, &x, &y);
    Ok(FractionalSolution { x, y, objective })
}
