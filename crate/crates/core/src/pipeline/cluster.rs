//! Laminar clustering of facilities around clients.
//!
//! Each clustered client `j` keeps two families of disjoint facility sets:
//! `A_j`, which starts as the singletons of its close facilities and only
//! ever holds sets of close facilities of `j`, and `B_j`, which holds
//! clusters created by other clients that reach into `j`'s close set. The
//! residual requirement `rr_j` is `rbar_j` minus the floors of the fractional
//! opening mass over both families. While some client has `rr_j > 0`, the one
//! with the smallest `d_max` turns a minimal subset of `A_j` whose
//! fractional parts cover `rr_j` into a new cluster.

use super::split::ClientSplit;
use super::ScaledState;
use crate::error::{Error, Result};
use crate::rounding::LaminarFamily;
use crate::{snapped_floor, FRAC_TOL};

/// One node of the forest: a singleton facility or a created cluster.
#[derive(Debug, Clone)]
struct Node {
    members: Vec<usize>,
    mass: f64,
}

impl Node {
    fn floor(&self) -> i64 {
        snapped_floor(self.mass)
    }

    fn frac(&self) -> f64 {
        (self.mass - self.floor() as f64).max(0.0)
    }
}

/// Output of the clustering loop.
#[derive(Debug, Clone)]
pub struct Clustering {
    /// Created clusters in creation order followed by the root (all facilities).
    pub family: LaminarFamily,
    /// The client each non-root cluster was created for.
    pub centers: Vec<usize>,
    /// For each clustered client, the clusters (indices into `family`) left in
    /// its families when it went inactive. They are disjoint and their floors
    /// sum to at least `rbar_j`.
    pub witnesses: Vec<(usize, Vec<usize>)>,
}

impl Clustering {
    pub fn num_clusters(&self) -> usize {
        self.centers.len()
    }
}

struct Families {
    a: Vec<Vec<usize>>,
    b: Vec<Vec<usize>>,
}

/// Run the clustering loop for the clients in `clustered`.
///
/// `splits` is indexed by client. Errors if a client runs out of fractional
/// mass, if the families stop being disjoint, or if the tracked potential
/// `sum_{A_j} frac - rr_j` of a waiting client decreases.
pub fn build_clusters(
    splits: &[Option<ClientSplit>],
    st: &ScaledState,
    clustered: &[usize],
) -> Result<Clustering> {
    let m = st.ybar.len();
    let n = splits.len();
    let mut nodes: Vec<Node> = (0..m)
        .map(|i| Node {
            members: vec![i],
            mass: st.ybar[i],
        })
        .collect();
    let mut fam = Families {
        a: vec![Vec::new(); n],
        b: vec![Vec::new(); n],
    };
    let mut rbar = vec![0i64; n];
    let mut d_max = vec![f64::INFINITY; n];
    for &j in clustered {
        let split = splits[j]
            .as_ref()
            .ok_or_else(|| Error::internal("cluster", format!("client {j} has no split")))?;
        fam.a[j] = split.close.iter().map(|&(i, _)| i).collect();
        rbar[j] = split.rbar as i64;
        d_max[j] = split.d_max;
    }

    let rr = |j: usize, fam: &Families, nodes: &[Node]| -> i64 {
        rbar[j]
            - fam.a[j]
                .iter()
                .chain(&fam.b[j])
                .map(|&s| nodes[s].floor())
                .sum::<i64>()
    };
    let potential = |j: usize, fam: &Families, nodes: &[Node]| -> f64 {
        fam.a[j].iter().map(|&s| nodes[s].frac()).sum::<f64>() - rr(j, fam, nodes) as f64
    };

    let mut centers = Vec::new();
    let mut witnesses = Vec::new();
    let mut mask = vec![false; m];

    for _round in 0..=clustered.len() {
        let active: Vec<usize> = clustered
            .iter()
            .copied()
            .filter(|&j| rr(j, &fam, &nodes) > 0)
            .collect();
        let Some(&j) = active
            .iter()
            .min_by(|&&a, &&b| d_max[a].total_cmp(&d_max[b]).then(a.cmp(&b)))
        else {
            break;
        };
        let need = rr(j, &fam, &nodes) as f64;
        let before: Vec<(usize, f64)> = active
            .iter()
            .filter(|&&k| k != j)
            .map(|&k| (k, potential(k, &fam, &nodes)))
            .collect();

        // greedy by fractional part, then drop anything redundant
        let mut cands: Vec<usize> = fam.a[j]
            .iter()
            .copied()
            .filter(|&s| nodes[s].frac() > FRAC_TOL)
            .collect();
        cands.sort_by(|&x, &y| {
            nodes[y]
                .frac()
                .total_cmp(&nodes[x].frac())
                .then(nodes[x].members[0].cmp(&nodes[y].members[0]))
        });
        let mut chosen = Vec::new();
        let mut covered = 0.0;
        for s in cands {
            if covered >= need - FRAC_TOL {
                break;
            }
            covered += nodes[s].frac();
            chosen.push(s);
        }
        if covered < need - FRAC_TOL {
            return Err(Error::internal(
                "cluster",
                format!("client {j} needs {need} but its close sets carry only {covered}"),
            ));
        }
        let mut k = 0;
        while k < chosen.len() {
            let f = nodes[chosen[k]].frac();
            if covered - f >= need - FRAC_TOL {
                covered -= f;
                chosen.remove(k);
            } else {
                k += 1;
            }
        }

        let mut members: Vec<usize> = chosen
            .iter()
            .flat_map(|&s| nodes[s].members.iter().copied())
            .collect();
        members.sort_unstable();
        let mass = members.iter().map(|&i| st.ybar[i]).sum();
        let new = nodes.len();
        nodes.push(Node { members, mass });
        centers.push(j);

        for &i in &nodes[new].members {
            mask[i] = true;
        }
        fam.a[j].retain(|s| !chosen.contains(s));
        fam.a[j].push(new);
        for &k in &active {
            if k == j {
                continue;
            }
            let shared = chosen.iter().filter(|s| fam.a[k].contains(s)).count();
            if shared == chosen.len() {
                fam.a[k].retain(|s| !chosen.contains(s));
                fam.a[k].push(new);
            } else if shared > 0 {
                fam.a[k].retain(|s| !chosen.contains(s));
                fam.b[k].retain(|&s| !nodes[s].members.iter().any(|&i| mask[i]));
                fam.b[k].push(new);
            }
        }
        for &i in &nodes[new].members {
            mask[i] = false;
        }

        if rr(j, &fam, &nodes) > 0 {
            return Err(Error::internal(
                "cluster",
                format!("client {j} still has residual requirement after forming its cluster"),
            ));
        }
        for &(k, phi) in &before {
            if rr(k, &fam, &nodes) > 0 && potential(k, &fam, &nodes) < phi - 1e3 * FRAC_TOL {
                return Err(Error::internal(
                    "cluster",
                    format!("potential of waiting client {k} decreased"),
                ));
            }
        }
        for &k in &active {
            check_disjoint(k, &fam, &nodes, m)?;
        }
    }
    if clustered.iter().any(|&j| rr(j, &fam, &nodes) > 0) {
        return Err(Error::internal("cluster", "loop did not terminate"));
    }

    for &j in clustered {
        let w: Vec<usize> = fam.a[j]
            .iter()
            .chain(&fam.b[j])
            .filter(|&&s| s >= m)
            .map(|&s| s - m)
            .collect();
        witnesses.push((j, w));
    }

    let mut sets: Vec<Vec<usize>> = nodes.drain(m..).map(|nd| nd.members).collect();
    sets.push((0..m).collect());
    let family = LaminarFamily::new(m, sets)
        .map_err(|e| Error::internal("cluster", format!("cluster family invalid: {e}")))?;
    Ok(Clustering {
        family,
        centers,
        witnesses,
    })
}

fn check_disjoint(j: usize, fam: &Families, nodes: &[Node], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    for &s in fam.a[j].iter().chain(&fam.b[j]) {
        for &i in &nodes[s].members {
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::internal(
                    "cluster",
                    format!("families of client {j} overlap at facility {i}"),
                ));
            }
        }
    }
    Ok(())
}
