#![allow(dead_code)]

use ftfl::instance::{generate, GenMode, Instance};
use ftfl::pipeline::Prepared;
use ftfl::rng::seeded;
use ftfl::{is_fractional, snapped_floor};
use rand::seq::SliceRandom;
use rand::Rng;

/// Shortest-path metric on a sparse bipartite graph: each client is wired to
/// `r_j + 1` random facilities at distance about 1, and facilities form a
/// longer ring. Small instances from `generate` almost always have integral
/// LP optima; these often do not.
pub fn sparse_metric(m: usize, n: usize, rmax: usize, seed: u64) -> Instance {
    let mut rng = seeded(seed ^ 0x5eed_f00d);
    let v = m + n;
    let mut d = vec![vec![f64::INFINITY; v]; v];
    for (a, row) in d.iter_mut().enumerate() {
        row[a] = 0.0;
    }
    let r: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=rmax)).collect();
    for (j, &rj) in r.iter().enumerate() {
        let mut fac: Vec<usize> = (0..m).collect();
        fac.shuffle(&mut rng);
        for &i in fac.iter().take((rj + 1).min(m)) {
            let w = rng.gen_range(1.0..1.3);
            d[i][m + j] = w;
            d[m + j][i] = w;
        }
    }
    for i in 0..m {
        let k = (i + 1) % m;
        let w = rng.gen_range(2.0..3.0);
        if i != k && w < d[i][k] {
            d[i][k] = w;
            d[k][i] = w;
        }
    }
    for k in 0..v {
        for a in 0..v {
            for b in 0..v {
                let t = d[a][k] + d[k][b];
                if t < d[a][b] {
                    d[a][b] = t;
                }
            }
        }
    }
    let f = (0..m).map(|_| rng.gen_range(0.5..3.0)).collect();
    let c = (0..n).map(|j| (0..m).map(|i| d[i][m + j]).collect()).collect();
    Instance::new(f, c, r).unwrap()
}

pub fn lp_is_fractional(inst: &Instance) -> bool {
    let prep = Prepared::new(inst, None).unwrap();
    !prep.classes.clustered.is_empty() && prep.lp.y.iter().any(|&y| is_fractional(y))
}

/// The first `count` sparse-metric instances (sizes cycling through
/// `2..=max_m` by `1..=max_n`) whose LP optimum is fractional and which
/// have at least one clustered client.
pub fn fractional_instances(count: usize, max_m: usize, max_n: usize, rmax: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        let m = 3 + (seed as usize % (max_m - 2));
        let n = 2 + (seed as usize * 5 % (max_n - 1));
        let inst = sparse_metric(m, n, rmax.min(m - 1), seed);
        if lp_is_fractional(&inst) {
            out.push(inst);
        }
        seed += 1;
    }
    out
}

/// A mix of generator output in both modes and fractional sparse-metric
/// instances.
pub fn mixed_instances(count: usize, max_m: usize, max_n: usize, rmax: usize) -> Vec<Instance> {
    let plain = count / 2;
    let mut out: Vec<Instance> = (0..plain as u64)
        .map(|s| {
            let mode = if s % 2 == 0 { GenMode::Euclidean } else { GenMode::Uniform };
            let m = 2 + (s as usize % (max_m - 1));
            let n = 1 + (s as usize * 7 % max_n);
            generate(mode, m, n, rmax.min(m), s).unwrap()
        })
        .collect();
    out.extend(fractional_instances(count - plain, max_m, max_n, rmax));
    out
}

/// Sum of `ybar` over `set`, floored after snapping.
pub fn floor_mass(ybar: &[f64], set: &[usize]) -> i64 {
    snapped_floor(set.iter().map(|&i| ybar[i]).sum())
}

/// Cheapest `r` of the open facilities for one client by trying every
/// `r`-subset.
pub fn brute_force_assignment(costs: &[f64], open: &[bool], r: usize) -> Option<f64> {
    let m = costs.len();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != r {
            continue;
        }
        if (0..m).any(|i| mask >> i & 1 == 1 && !open[i]) {
            continue;
        }
        let c: f64 = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| costs[i]).sum();
        best = Some(best.map_or(c, |b: f64| b.min(c)));
    }
    best
}

/// Exact optimum by plain enumeration (no pruning, no parallelism).
pub fn brute_force_opt(inst: &Instance) -> f64 {
    let m = inst.num_facilities();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << m) {
        let open: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
        let mut cost: f64 = (0..m).filter(|&i| open[i]).map(|i| inst.opening_cost(i)).sum();
        let mut ok = true;
        for j in 0..inst.num_clients() {
            match brute_force_assignment(inst.client_costs(j), &open, inst.requirement(j)) {
                Some(c) => cost += c,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            best = best.min(cost);
        }
    }
    best
}

/// Pairwise laminarity plus the root-last and children-first orderings,
/// checked directly on the raw set list.
pub fn check_laminar(ground: usize, sets: &[Vec<usize>]) -> Result<(), String> {
    let last = sets.last().ok_or("empty family")?;
    if *last != (0..ground).collect::<Vec<_>>() {
        return Err("last set is not the ground set".into());
    }
    for (a, s) in sets.iter().enumerate() {
        for (b, t) in sets.iter().enumerate().skip(a + 1) {
            let inter = s.iter().filter(|i| t.contains(i)).count();
            let nested_st = inter == s.len();
            let nested_ts = inter == t.len();
            if inter > 0 && !nested_st && !nested_ts {
                return Err(format!("sets {a} and {b} cross"));
            }
            if nested_ts && !nested_st {
                return Err(format!("set {b} is a subset of earlier set {a}"));
            }
        }
    }
    Ok(())
}
