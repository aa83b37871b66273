use crate::error::{Error, Result};
use crate::instance::Instance;

/// An integral FTFL solution.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSolution {
    /// Open facilities, ascending.
    pub open: Vec<usize>,
    /// For each client, its `r_j` distinct open facilities.
    pub assign: Vec<Vec<usize>>,
    pub cost: f64,
}

impl IntegralSolution {
    pub fn opening_cost(&self, inst: &Instance) -> f64 {
        self.open.iter().map(|&i| inst.opening_cost(i)).sum()
    }

    /// Verify requirement counts, distinctness, openness and the cost.
    pub fn check(&self, inst: &Instance) -> Result<()> {
        let fail = |msg: String| Err(Error::internal("feasibility", msg));
        let mut is_open = vec![false; inst.num_facilities()];
        for &i in &self.open {
            if i >= is_open.len() || is_open[i] {
                return fail(format!("bad or repeated open facility {i}"));
            }
            is_open[i] = true;
        }
        if self.assign.len() != inst.num_clients() {
            return fail(format!("{} assignments for {} clients", self.assign.len(), inst.num_clients()));
        }
        let mut cost = self.opening_cost(inst);
        for (j, a) in self.assign.iter().enumerate() {
            if a.len() != inst.requirement(j) {
                return fail(format!("client {j} has {} facilities, needs {}", a.len(), inst.requirement(j)));
            }
            let mut seen = a.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != a.len() {
                return fail(format!("client {j} is assigned a facility twice"));
            }
            if let Some(&i) = a.iter().find(|&&i| i >= is_open.len() || !is_open[i]) {
                return fail(format!("client {j} uses closed facility {i}"));
            }
            cost += a.iter().map(|&i| inst.dist(i, j)).sum::<f64>();
        }
        if (cost - self.cost).abs() > 1e-9 * (1.0 + cost.abs()) {
            return fail(format!("stored cost {} but recomputed {cost}", self.cost));
        }
        Ok(())
    }
}

/// Connect every client to its `r_j` cheapest open facilities, ties by index.
pub fn connect(inst: &Instance, open: &[bool]) -> Result<IntegralSolution> {
    let open_list: Vec<usize> = (0..inst.num_facilities()).filter(|&i| open[i]).collect();
    let mut cost: f64 = open_list.iter().map(|&i| inst.opening_cost(i)).sum();
    let mut assign = Vec::with_capacity(inst.num_clients());
    for j in 0..inst.num_clients() {
        let r = inst.requirement(j);
        if open_list.len() < r {
            return Err(Error::Infeasible(format!(
                "client {j} needs {r} facilities but only {} are open",
                open_list.len()
            )));
        }
        let row = inst.client_costs(j);
        let mut cands = open_list.clone();
        cands.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
        cands.truncate(r);
        cost += cands.iter().map(|&i| row[i]).sum::<f64>();
        assign.push(cands);
    }
    Ok(IntegralSolution {
        open: open_list,
        assign,
        cost,
    })
}
