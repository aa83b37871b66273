use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::FractionalSolution;
use crate::{is_fractional, snap01, FRAC_TOL};

/// The scaled solution split into what was fixed integrally (pre-opened
/// facilities, pre-connected pairs) and the residual fractional part.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledState {
    pub gamma: f64,
    /// Residual fractional opening, zero where pre-opened.
    pub ybar: Vec<f64>,
    /// Residual fractional connection, client-major.
    pub xbar: Vec<Vec<f64>>,
    pub preopened: Vec<bool>,
    /// Pre-connected pairs, client-major.
    pub preconnected: Vec<Vec<bool>>,
    /// Residual requirement `r_j` minus pre-connections.
    pub rbar: Vec<usize>,
    /// The pre-opened facility that still serves the client fractionally.
    pub special: Vec<Option<usize>>,
}

/// Scale `(x, y)` by `gamma`, capping at 1, then pre-open every facility and
/// pre-connect every pair that reached 1.
///
/// `sol` must be canonical (see [`crate::lp::canonicalize`]). A client with
/// more than `r_j` saturated pairs is pre-connected to the nearest `r_j` of
/// them only; the surplus pairs are dropped from the residual solution.
pub fn scale_and_preopen(sol: &FractionalSolution, inst: &Instance, gamma: f64) -> Result<ScaledState> {
    let m = inst.num_facilities();
    let n = inst.num_clients();
    let scale = |v: f64| snap01((gamma * snap01(v)).min(1.0));

    let mut ybar: Vec<f64> = sol.y.iter().map(|&y| scale(y)).collect();
    let preopened: Vec<bool> = ybar.iter().map(|&y| y >= 1.0).collect();
    for (y, &pre) in ybar.iter_mut().zip(&preopened) {
        if pre {
            *y = 0.0;
        }
    }

    let mut xbar = vec![vec![0.0; m]; n];
    let mut preconnected = vec![vec![false; m]; n];
    let mut rbar = inst.requirements().to_vec();
    let mut special = vec![None; n];
    for j in 0..n {
        for i in inst.facilities_by_distance(j) {
            let x = scale(sol.x[j][i]);
            if x >= 1.0 {
                if !preopened[i] {
                    return Err(Error::internal(
                        "scaling",
                        format!("x[{j}][{i}] saturated while facility {i} is not open"),
                    ));
                }
                if rbar[j] > 0 {
                    preconnected[j][i] = true;
                    rbar[j] -= 1;
                }
            } else {
                xbar[j][i] = x;
            }
        }
        for i in 0..m {
            if preopened[i] && is_fractional(xbar[j][i]) {
                if special[j].is_some() {
                    return Err(Error::internal(
                        "scaling",
                        format!("client {j} has two special facilities; input not canonical"),
                    ));
                }
                special[j] = Some(i);
            }
        }
        if rbar[j] > 0 {
            let total: f64 = xbar[j].iter().sum();
            if total < gamma * rbar[j] as f64 - 1e3 * FRAC_TOL {
                return Err(Error::internal(
                    "scaling",
                    format!("client {j}: residual mass {total} < gamma * {}", rbar[j]),
                ));
            }
        }
    }

    Ok(ScaledState {
        gamma,
        ybar,
        xbar,
        preopened,
        preconnected,
        rbar,
        special,
    })
}
