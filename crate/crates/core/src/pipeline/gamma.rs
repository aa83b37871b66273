use std::sync::OnceLock;

/// Right-hand side of the fixed-point equation defining the scaling constant.
pub fn gamma_map(g: f64) -> f64 {
    let e = std::f64::consts::E;
    (1.0 / e + 2.0 / g.exp()) * (1.0 + 1.0 / (g - 1.0))
}

/// The unique root of `g = (1/e + 2/e^g)(1 + 1/(g-1))` on (1, 2), by bisection
/// to absolute tolerance `tol`.
///
/// `g - gamma_map(g)` is strictly increasing on (1, 2), negative near 1 and
/// positive at 2.
pub fn compute_gamma(tol: f64) -> f64 {
    let tol = tol.max(f64::EPSILON);
    let h = |g: f64| g - gamma_map(g);
    let (mut lo, mut hi) = (1.0 + 1e-9, 2.0);
    while hi - lo > tol / 4.0 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The scaling constant at tolerance 1e-12, computed once per process.
pub fn gamma0() -> f64 {
    static GAMMA: OnceLock<f64> = OnceLock::new();
    *GAMMA.get_or_init(|| compute_gamma(1e-12))
}
