//! Brute-force references for checking the solvers.
//!
//! Nothing here calls into [`crate::equilibrium`] or [`crate::numerics`]:
//! expectations are midpoint Riemann sums, maximisation is exhaustive search
//! and root finding is plain bisection.

use crate::error::{Error, Result};
use crate::model::{Interval, ModelParams};

/// Number of midpoint samples in each Riemann sum.
pub const RIEMANN_POINTS: usize = 10_000;

/// Resolution of a brute-force grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 10 {
            return Err(Error::Domain(format!(
                "grid resolution must be at least 10, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Exhaustive argmax over `a ∈ {0, 1/n, …, 1}` of the cell-averaged
/// aggregator payoff, the average being a midpoint Riemann sum.
///
/// The sum over states is accumulated once as the first two sample moments,
/// so each candidate costs O(1). Ties resolve to the smallest action.
pub fn grid_best_action(p: &ModelParams, cell: &Interval, g: GridSpec) -> f64 {
    let (lo, width) = (cell.lo(), cell.width());
    let h = width / RIEMANN_POINTS as f64;
    let (mut m1, mut m2) = (0.0, 0.0);
    for i in 0..RIEMANN_POINTS {
        let s = lo + (i as f64 + 0.5) * h;
        m1 += s;
        m2 += s * s;
    }
    m1 /= RIEMANN_POINTS as f64;
    m2 /= RIEMANN_POINTS as f64;

    // mean over samples of −(s − a)² + K − b·eᵃ
    let value = |a: f64| -(m2 - 2.0 * a * m1 + a * a) + p.k - p.b * a.exp();

    let mut best = (0.0, value(0.0));
    for j in 1..=g.n {
        let a = j as f64 / g.n as f64;
        let v = value(a);
        if v > best.1 {
            best = (a, v);
        }
    }
    best.0
}

/// The consumer's preferred message: the index of the nearest action,
/// ties to the lowest index.
///
/// # Panics
///
/// If `actions` is empty.
pub fn grid_best_message(s: f64, actions: &[f64]) -> usize {
    assert!(!actions.is_empty(), "need at least one action");
    let mut best = (0, (s - actions[0]).powi(2));
    for (m, &a) in actions.iter().enumerate().skip(1) {
        let d = (s - a).powi(2);
        if d < best.1 {
            best = (m, d);
        }
    }
    best.0
}

/// Bias above which only the one-cell equilibrium exists, as the root of
/// `3b + b·e^{2b} = 1` on `[0, 1]`.
///
/// Starting the recursion at `s_1 = b` gives `a_0 = 0`, `a_1 = 2b` and
/// `s_2 = 3b + b·e^{2b}`; two cells fit exactly when that equals 1.
pub fn threshold_beta(tol: f64) -> f64 {
    let h = |b: f64| 3.0 * b + b * (2.0 * b).exp() - 1.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let tol = tol.max(f64::EPSILON);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
