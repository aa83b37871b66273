//! FTFL instances: data model, text format, metric check and generators.
//!
//! Text format (whitespace separated, `#` comments to end of line):
//!
//! ```text
//! FTFL 1
//! <m> <n>
//! <f_1> ... <f_m>
//! <r_1> <c_11> ... <c_1m>     one line per client
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng;

/// An FTFL instance with `m` facilities and `n` clients.
///
/// Immutable after construction; all invariants are checked by [`Instance::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    opening: Vec<f64>,
    /// `costs[j][i]`: cost of serving client `j` from facility `i`.
    costs: Vec<Vec<f64>>,
    requirements: Vec<usize>,
}

impl Instance {
    pub fn new(opening: Vec<f64>, costs: Vec<Vec<f64>>, requirements: Vec<usize>) -> Result<Self> {
        let m = opening.len();
        let n = requirements.len();
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput(
                "need at least one facility and one client".into(),
            ));
        }
        if costs.len() != n {
            return Err(Error::InvalidInput(format!(
                "{} cost rows for {} clients",
                costs.len(),
                n
            )));
        }
        for (i, &f) in opening.iter().enumerate() {
            if !f.is_finite() || f < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "opening cost of facility {i} is {f}"
                )));
            }
        }
        for (j, row) in costs.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidInput(format!(
                    "client {j} has {} costs, expected {m}",
                    row.len()
                )));
            }
            if let Some(c) = row.iter().find(|c| !c.is_finite() || **c < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "client {j} has connection cost {c}"
                )));
            }
        }
        for (j, &r) in requirements.iter().enumerate() {
            if r == 0 {
                return Err(Error::InvalidInput(format!("client {j} has requirement 0")));
            }
            if r > m {
                return Err(Error::Infeasible(format!(
                    "client {j} requires {r} facilities but only {m} exist"
                )));
            }
        }
        Ok(Instance {
            opening,
            costs,
            requirements,
        })
    }

    pub fn num_facilities(&self) -> usize {
        self.opening.len()
    }

    pub fn num_clients(&self) -> usize {
        self.requirements.len()
    }

    pub fn opening_cost(&self, facility: usize) -> f64 {
        self.opening[facility]
    }

    pub fn opening_costs(&self) -> &[f64] {
        &self.opening
    }

    /// Connection cost between `facility` and `client`.
    pub fn dist(&self, facility: usize, client: usize) -> f64 {
        self.costs[client][facility]
    }

    /// All connection costs of one client, indexed by facility.
    pub fn client_costs(&self, client: usize) -> &[f64] {
        &self.costs[client]
    }

    pub fn requirement(&self, client: usize) -> usize {
        self.requirements[client]
    }

    pub fn requirements(&self) -> &[usize] {
        &self.requirements
    }

    pub fn max_requirement(&self) -> usize {
        self.requirements.iter().copied().max().unwrap_or(0)
    }

    /// Facilities of `client` ordered by (cost, index).
    pub fn facilities_by_distance(&self, client: usize) -> Vec<usize> {
        let row = &self.costs[client];
        let mut order: Vec<usize> = (0..row.len()).collect();
        order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
        order
    }
}

/// Parse the FTFL text format.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut tokens = Tokens::new(text);

    let (line, magic) = tokens.next_token("magic `FTFL`")?;
    if magic != "FTFL" {
        return Err(Error::Parse {
            line,
            msg: format!("expected magic `FTFL`, found `{magic}`"),
        });
    }
    let version: u32 = tokens.parse("format version")?;
    if version != 1 {
        return Err(Error::Parse {
            line,
            msg: format!("unsupported format version {version}"),
        });
    }

    let m: usize = tokens.parse("facility count")?;
    let n: usize = tokens.parse("client count")?;
    if m == 0 || n == 0 {
        return Err(Error::Parse {
            line: tokens.line,
            msg: "facility and client counts must be positive".into(),
        });
    }

    let mut opening = Vec::with_capacity(m);
    for i in 0..m {
        opening.push(tokens.cost(&format!("opening cost of facility {}", i + 1))?);
    }

    let mut requirements = Vec::with_capacity(n);
    let mut costs = Vec::with_capacity(n);
    for j in 0..n {
        let (line, tok) = tokens.next_token("client requirement")?;
        let r: usize = tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("requirement of client {} is not a positive integer: `{tok}`", j + 1),
        })?;
        if r == 0 {
            return Err(Error::Parse {
                line,
                msg: format!("requirement of client {} must be positive", j + 1),
            });
        }
        if r > m {
            return Err(Error::Infeasible(format!(
                "line {line}: client {} requires {r} facilities but only {m} exist",
                j + 1
            )));
        }
        requirements.push(r);
        let mut row = Vec::with_capacity(m);
        for i in 0..m {
            row.push(tokens.cost(&format!("cost c[{},{}]", i + 1, j + 1))?);
        }
        costs.push(row);
    }

    if let Some((line, tok)) = tokens.peek() {
        return Err(Error::Parse {
            line,
            msg: format!("trailing token `{tok}` after {n} clients"),
        });
    }

    Instance::new(opening, costs, requirements)
}

/// Canonical text form. Costs use the shortest decimal that round-trips.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = write!(out, "FTFL 1\n{} {}\n", inst.num_facilities(), inst.num_clients());
    out.push_str(&join(inst.opening_costs()));
    for j in 0..inst.num_clients() {
        let _ = write!(out, "\n{} {}", inst.requirement(j), join(inst.client_costs(j)));
    }
    out
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .flat_map(|(no, line)| {
                let content = line.split('#').next().unwrap_or("");
                content.split_whitespace().map(move |t| (no + 1, t))
            })
            .collect();
        Tokens {
            items,
            pos: 0,
            line: 1,
        }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    fn next_token(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.items.get(self.pos) {
            Some(&(line, tok)) => {
                self.pos += 1;
                self.line = line;
                Ok((line, tok))
            }
            None => Err(Error::Parse {
                line: self.line,
                msg: format!("unexpected end of input, expected {what}"),
            }),
        }
    }

    fn parse<T: FromStr>(&mut self, what: &str) -> Result<T> {
        let (line, tok) = self.next_token(what)?;
        tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid {what}: `{tok}`"),
        })
    }

    fn cost(&mut self, what: &str) -> Result<f64> {
        let (line, tok) = self.next_token(what)?;
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
            _ => Err(Error::Parse {
                line,
                msg: format!("{what} must be a finite nonnegative number, found `{tok}`"),
            }),
        }
    }
}

/// One violated bipartite triangle inequality
/// `dist(i, j) <= dist(i', j) + dist(i', j') + dist(i, j')`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricViolation {
    pub facility: usize,
    pub client: usize,
    pub via_facility: usize,
    pub via_client: usize,
    pub direct: f64,
    pub detour: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricReport {
    pub violations: Vec<MetricViolation>,
}

impl MetricReport {
    pub fn is_metric(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every facility-client-facility-client path against the direct edge.
pub fn validate_metric(inst: &Instance, tol: f64) -> MetricReport {
    let m = inst.num_facilities();
    let n = inst.num_clients();
    let mut violations = Vec::new();
    for j in 0..n {
        for i in 0..m {
            let direct = inst.dist(i, j);
            for jj in 0..n {
                for ii in 0..m {
                    let detour = inst.dist(ii, j) + inst.dist(ii, jj) + inst.dist(i, jj);
                    if direct > detour + tol {
                        violations.push(MetricViolation {
                            facility: i,
                            client: j,
                            via_facility: ii,
                            via_client: jj,
                            direct,
                            detour,
                        });
                    }
                }
            }
        }
    }
    MetricReport { violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// Points uniform in the unit square, Euclidean distances.
    Euclidean,
    /// Shortest-path closure of a complete graph with uniform random weights.
    Uniform,
}

impl FromStr for GenMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(GenMode::Euclidean),
            "uniform" => Ok(GenMode::Uniform),
            other => Err(Error::InvalidInput(format!(
                "unknown generator mode `{other}` (expected euclidean or uniform)"
            ))),
        }
    }
}

/// Seeded random metric instance. Opening costs are uniform in [0, 1] and
/// requirements uniform in `1..=r_max`.
pub fn generate(mode: GenMode, m: usize, n: usize, r_max: usize, seed: u64) -> Result<Instance> {
    if m == 0 || n == 0 || r_max == 0 {
        return Err(Error::InvalidInput(
            "generator needs m, n, r_max >= 1".into(),
        ));
    }
    if r_max > m {
        return Err(Error::InvalidInput(format!(
            "r_max = {r_max} exceeds facility count {m}"
        )));
    }
    let mut rng = rng::seeded(seed);
    let costs = match mode {
        GenMode::Euclidean => {
            let facilities: Vec<(f64, f64)> = (0..m).map(|_| (rng.gen(), rng.gen())).collect();
            let clients: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
            clients
                .iter()
                .map(|&(cx, cy)| {
                    facilities
                        .iter()
                        .map(|&(fx, fy)| ((cx - fx).powi(2) + (cy - fy).powi(2)).sqrt())
                        .collect()
                })
                .collect()
        }
        GenMode::Uniform => {
            // nodes 0..m are facilities, m..m+n clients
            let k = m + n;
            let mut d = vec![vec![0.0f64; k]; k];
            for a in 0..k {
                for b in a + 1..k {
                    let w = 1.0 - rng.gen::<f64>();
                    d[a][b] = w;
                    d[b][a] = w;
                }
            }
            for via in 0..k {
                for a in 0..k {
                    for b in 0..k {
                        let alt = d[a][via] + d[via][b];
                        if alt < d[a][b] {
                            d[a][b] = alt;
                        }
                    }
                }
            }
            (0..n).map(|j| (0..m).map(|i| d[m + j][i]).collect()).collect()
        }
    };
    let opening = (0..m).map(|_| rng.gen::<f64>()).collect();
    let requirements = (0..n).map(|_| rng.gen_range(1..=r_max)).collect();
    Instance::new(opening, costs, requirements)
}
