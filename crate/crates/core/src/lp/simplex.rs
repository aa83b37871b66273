//! Dense revised primal simplex with Bland's rule.
//!
//! The problem is brought to standard form `min c'x, Ax = b, x >= 0, b >= 0`
//! with one slack per `<=` row, one surplus plus artificial per `>=` row and
//! one artificial per `=` row. Phase one minimizes the artificial sum; phase
//! two optimizes the real objective with artificials barred from entering.
//! The basis inverse is kept explicitly and refactored periodically.

use super::{LpProblem, LpSolver, Sense};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;

/// The built-in solver.
#[derive(Debug, Clone, Copy, Default)]
pub struct DenseSimplex {
    /// Hard cap on pivots per phase; 0 picks a size-based default.
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Slack,
    Artificial,
}

struct StandardForm {
    rows: usize,
    /// Sparse columns: (row, coefficient).
    cols: Vec<Vec<(usize, f64)>>,
    kind: Vec<Kind>,
    b: Vec<f64>,
    num_structural: usize,
}

impl StandardForm {
    fn new(lp: &LpProblem) -> Self {
        let rows = lp.rows.len();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.num_vars];
        let mut kind = vec![Kind::Structural; lp.num_vars];
        let mut b = Vec::with_capacity(rows);
        let mut artificial_rows = Vec::new();
        for (r, row) in lp.rows.iter().enumerate() {
            let flip = row.rhs < 0.0;
            let sign = if flip { -1.0 } else { 1.0 };
            for &(var, a) in &row.coeffs {
                if a != 0.0 {
                    cols[var].push((r, sign * a));
                }
            }
            b.push(sign * row.rhs);
            let sense = match (row.sense, flip) {
                (Sense::Le, true) => Sense::Ge,
                (Sense::Ge, true) => Sense::Le,
                (s, _) => s,
            };
            match sense {
                Sense::Le => {
                    cols.push(vec![(r, 1.0)]);
                    kind.push(Kind::Slack);
                }
                Sense::Ge => {
                    cols.push(vec![(r, -1.0)]);
                    kind.push(Kind::Slack);
                    artificial_rows.push(r);
                }
                Sense::Eq => artificial_rows.push(r),
            }
        }
        for r in artificial_rows {
            cols.push(vec![(r, 1.0)]);
            kind.push(Kind::Artificial);
        }
        StandardForm {
            rows,
            cols,
            kind,
            b,
            num_structural: lp.num_vars,
        }
    }
}

struct Revised<'a> {
    sf: &'a StandardForm,
    basis: Vec<usize>,
    /// `basic_row[col]` is the row a basic column sits in.
    basic_row: Vec<Option<usize>>,
    /// Row-major basis inverse.
    binv: Vec<f64>,
    xb: Vec<f64>,
    since_refactor: usize,
}

impl<'a> Revised<'a> {
    fn new(sf: &'a StandardForm) -> Self {
        let k = sf.rows;
        let mut basis = vec![usize::MAX; k];
        let mut basic_row = vec![None; sf.cols.len()];
        // initial basis: the +1 slack or artificial of each row
        for (c, col) in sf.cols.iter().enumerate() {
            if sf.kind[c] == Kind::Structural {
                continue;
            }
            if let [(r, a)] = col.as_slice() {
                if *a == 1.0 && basis[*r] == usize::MAX {
                    basis[*r] = c;
                    basic_row[c] = Some(*r);
                }
            }
        }
        debug_assert!(basis.iter().all(|&c| c != usize::MAX));
        let mut binv = vec![0.0; k * k];
        for r in 0..k {
            binv[r * k + r] = 1.0;
        }
        Revised {
            sf,
            basis,
            basic_row,
            binv,
            xb: sf.b.clone(),
            since_refactor: 0,
        }
    }

    fn k(&self) -> usize {
        self.sf.rows
    }

    fn ftran(&self, col: usize) -> Vec<f64> {
        let k = self.k();
        let mut alpha = vec![0.0; k];
        for &(row, a) in &self.sf.cols[col] {
            for (r, out) in alpha.iter_mut().enumerate() {
                *out += self.binv[r * k + row] * a;
            }
        }
        alpha
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let k = self.k();
        let mut pi = vec![0.0; k];
        for (r, &c) in self.basis.iter().enumerate() {
            let cb = cost[c];
            if cb != 0.0 {
                let row = &self.binv[r * k..(r + 1) * k];
                for (p, &v) in pi.iter_mut().zip(row) {
                    *p += cb * v;
                }
            }
        }
        pi
    }

    fn pivot(&mut self, leave_row: usize, enter: usize, alpha: &[f64]) {
        let k = self.k();
        let p = alpha[leave_row];
        for v in &mut self.binv[leave_row * k..(leave_row + 1) * k] {
            *v /= p;
        }
        self.xb[leave_row] /= p;
        let pivot_row: Vec<f64> = self.binv[leave_row * k..(leave_row + 1) * k].to_vec();
        let x_pivot = self.xb[leave_row];
        for r in 0..k {
            if r == leave_row || alpha[r] == 0.0 {
                continue;
            }
            let f = alpha[r];
            for (v, &pr) in self.binv[r * k..(r + 1) * k].iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            self.xb[r] -= f * x_pivot;
            if self.xb[r] < 0.0 && self.xb[r] > -1e-11 {
                self.xb[r] = 0.0;
            }
        }
        let leaving = self.basis[leave_row];
        self.basic_row[leaving] = None;
        self.basis[leave_row] = enter;
        self.basic_row[enter] = Some(leave_row);
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    /// Recompute the basis inverse and basic values by Gauss-Jordan elimination.
    fn refactor(&mut self) {
        let k = self.k();
        let mut a = vec![0.0; k * k];
        for (r, &c) in self.basis.iter().enumerate() {
            for &(row, v) in &self.sf.cols[c] {
                a[row * k + r] = v;
            }
        }
        let mut inv = vec![0.0; k * k];
        for r in 0..k {
            inv[r * k + r] = 1.0;
        }
        for col in 0..k {
            let piv = (col..k)
                .max_by(|&x, &y| a[x * k + col].abs().total_cmp(&a[y * k + col].abs()))
                .unwrap();
            if a[piv * k + col].abs() < 1e-14 {
                // numerically singular; keep the product-form inverse
                self.since_refactor = 0;
                return;
            }
            if piv != col {
                for c in 0..k {
                    a.swap(piv * k + c, col * k + c);
                    inv.swap(piv * k + c, col * k + c);
                }
            }
            let d = a[col * k + col];
            for c in 0..k {
                a[col * k + c] /= d;
                inv[col * k + c] /= d;
            }
            for r in 0..k {
                if r == col {
                    continue;
                }
                let f = a[r * k + col];
                if f == 0.0 {
                    continue;
                }
                for c in 0..k {
                    a[r * k + c] -= f * a[col * k + c];
                    inv[r * k + c] -= f * inv[col * k + c];
                }
            }
        }
        self.binv = inv;
        for r in 0..k {
            let row = &self.binv[r * k..(r + 1) * k];
            let v: f64 = row.iter().zip(&self.sf.b).map(|(x, y)| x * y).sum();
            self.xb[r] = if v < 0.0 && v > -1e-9 { 0.0 } else { v };
        }
        self.since_refactor = 0;
    }

    /// Bland's rule: lowest-index improving column enters, lowest-index
    /// basic column leaves among ratio ties.
    fn optimize(&mut self, cost: &[f64], allow_artificial: bool, limit: usize) -> Result<()> {
        let opt_tol = 1e-9;
        for _ in 0..limit {
            let pi = self.duals(cost);
            let entering = (0..self.sf.cols.len()).find(|&c| {
                if self.basic_row[c].is_some()
                    || (!allow_artificial && self.sf.kind[c] == Kind::Artificial)
                {
                    return false;
                }
                let d = cost[c]
                    - self.sf.cols[c]
                        .iter()
                        .map(|&(r, a)| pi[r] * a)
                        .sum::<f64>();
                d < -opt_tol
            });
            let Some(q) = entering else {
                return Ok(());
            };
            let alpha = self.ftran(q);
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.k() {
                if alpha[r] <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.xb[r].max(0.0) / alpha[r];
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, best)) => {
                        if ratio < best - 1e-12
                            || (ratio <= best + 1e-12 && self.basis[r] < self.basis[br])
                        {
                            Some((r, ratio))
                        } else {
                            Some((br, best))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Err(Error::SolverFailure("LP is unbounded".into()));
            };
            self.pivot(r, q, &alpha);
        }
        Err(Error::SolverFailure(format!(
            "iteration limit of {limit} pivots exceeded"
        )))
    }

    /// Pivot zero-level artificials out of the basis where possible.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.k() {
            if self.sf.kind[self.basis[r]] != Kind::Artificial {
                continue;
            }
            let k = self.k();
            let candidate = (0..self.sf.cols.len()).find(|&c| {
                self.basic_row[c].is_none()
                    && self.sf.kind[c] != Kind::Artificial
                    && self.sf.cols[c]
                        .iter()
                        .map(|&(row, a)| self.binv[r * k + row] * a)
                        .sum::<f64>()
                        .abs()
                        > 1e-7
            });
            if let Some(c) = candidate {
                let alpha = self.ftran(c);
                self.pivot(r, c, &alpha);
            }
        }
    }
}

impl LpSolver for DenseSimplex {
    fn solve(&self, lp: &LpProblem, tol: f64) -> Result<Vec<f64>> {
        let sf = StandardForm::new(lp);
        let ncols = sf.cols.len();
        let limit = if self.max_iterations > 0 {
            self.max_iterations
        } else {
            200 * (sf.rows + ncols) + 1000
        };
        let mut rs = Revised::new(&sf);

        if sf.kind.contains(&Kind::Artificial) {
            let phase1: Vec<f64> = sf
                .kind
                .iter()
                .map(|k| if *k == Kind::Artificial { 1.0 } else { 0.0 })
                .collect();
            rs.optimize(&phase1, true, limit)?;
            rs.refactor();
            let infeasibility: f64 = rs
                .basis
                .iter()
                .zip(&rs.xb)
                .filter(|(c, _)| sf.kind[**c] == Kind::Artificial)
                .map(|(_, x)| x.max(0.0))
                .sum();
            let scale = 1.0 + sf.b.iter().map(|v| v.abs()).sum::<f64>();
            if infeasibility > tol.max(1e-9) * scale {
                return Err(Error::Infeasible(format!(
                    "LP has no feasible point (phase-one residual {infeasibility:.3e})"
                )));
            }
            rs.drive_out_artificials();
        }

        let mut cost = vec![0.0; ncols];
        cost[..lp.num_vars].copy_from_slice(&lp.objective);
        rs.optimize(&cost, false, limit)?;
        rs.refactor();

        let mut x = vec![0.0; sf.num_structural];
        for (r, &c) in rs.basis.iter().enumerate() {
            if c < sf.num_structural {
                x[c] = rs.xb[r].max(0.0);
            }
        }
        Ok(x)
    }
}
