//! Partition equilibria: the aggregator's best response, the boundary
//! recursion, the maximal message count and an ε-Nash verifier.
//!
//! With `φ_b(x) = 2x + b·eˣ`, an interior best response on a cell
//! `[s_m, s_{m+1}]` satisfies `φ_b(a_m) = s_m + s_{m+1}`. Consumer
//! indifference at a boundary gives `a_{m−1} + a_m = 2·s_m`. Chaining the two
//! yields the forward recursion
//!
//! ```text
//! s_{m+1} = φ_b(2·s_m − φ_b⁻¹(s_{m−1} + s_m)) − s_m
//! ```
//!
//! started from `s_0 = 0` and a free `s_1`. An `L`-cell equilibrium is the
//! solution of the two-point problem `s_0 = 0, s_L = 1`, found by shooting on
//! `s_1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{consumer_payoff, interval_integral_aggregator, Interval, ModelParams};
use crate::numerics::{lambert_w0, solve_increasing, Tolerance};

/// Offset of the shooting start `s_1 = b + ε` above the interior threshold.
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Upper bound on the number of cells; `b = 0` admits arbitrarily many.
pub const DEFAULT_CELL_CAP: usize = 64;

/// The forward recursion stops once a boundary exceeds this value.
const FORWARD_CAP: f64 = 2.0;
/// Accuracy of the shooting solution `|s_L − 1|`.
const SHOOTING_TOL: f64 = 1e-10;

/// Ordered boundaries `0 = s_0 < s_1 < … < s_L = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Partition {
    boundaries: Vec<f64>,
}

impl Partition {
    pub fn new(boundaries: Vec<f64>) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(Error::Domain(
                "a partition needs at least two boundaries".into(),
            ));
        }
        if boundaries[0] != 0.0 || *boundaries.last().unwrap() != 1.0 {
            return Err(Error::Domain(format!(
                "partition must start at 0 and end at 1, got {boundaries:?}"
            )));
        }
        if boundaries.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain(format!(
                "partition boundaries must be strictly increasing, got {boundaries:?}"
            )));
        }
        Ok(Self { boundaries })
    }

    /// `L` equal cells.
    pub fn uniform(cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::Domain("a partition needs at least one cell".into()));
        }
        let mut b: Vec<f64> = (0..=cells).map(|m| m as f64 / cells as f64).collect();
        b[cells] = 1.0;
        Self::new(b)
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn cells(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn cell(&self, m: usize) -> Interval {
        Interval::new(self.boundaries[m], self.boundaries[m + 1])
            .expect("partition boundaries lie in [0, 1] and increase")
    }

    pub fn intervals(&self) -> impl Iterator<Item = Interval> + '_ {
        (0..self.cells()).map(move |m| self.cell(m))
    }

    /// Index of the cell containing `s`; a state on an interior boundary is
    /// assigned to the lower cell.
    pub fn cell_of(&self, s: f64) -> usize {
        let interior = &self.boundaries[1..self.boundaries.len() - 1];
        interior.partition_point(|&x| x < s)
    }
}

impl TryFrom<Vec<f64>> for Partition {
    type Error = Error;

    fn try_from(boundaries: Vec<f64>) -> Result<Self> {
        Self::new(boundaries)
    }
}

impl From<Partition> for Vec<f64> {
    fn from(p: Partition) -> Self {
        p.boundaries
    }
}

/// A partition together with one allocation per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumProfile {
    #[serde(rename = "boundaries")]
    partition: Partition,
    actions: Vec<f64>,
}

impl EquilibriumProfile {
    /// Checks that there is one action per cell, each in `[0, 1]`, and that
    /// actions are nondecreasing.
    pub fn new(partition: Partition, actions: Vec<f64>) -> Result<Self> {
        if actions.len() != partition.cells() {
            return Err(Error::Domain(format!(
                "{} actions for {} cells",
                actions.len(),
                partition.cells()
            )));
        }
        if actions.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::Domain(format!(
                "actions must lie in [0, 1], got {actions:?}"
            )));
        }
        if actions.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain(format!(
                "actions must be nondecreasing, got {actions:?}"
            )));
        }
        Ok(Self { partition, actions })
    }

    /// The aggregator's best response on every cell of `partition`.
    pub fn best_response_to(p: &ModelParams, partition: Partition) -> Self {
        let actions = partition
            .intervals()
            .map(|c| best_response_action(p, &c))
            .collect();
        Self { partition, actions }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn boundaries(&self) -> &[f64] {
        self.partition.boundaries()
    }

    pub fn actions(&self) -> &[f64] {
        &self.actions
    }

    pub fn cells(&self) -> usize {
        self.actions.len()
    }

    /// Largest `|a_{m−1} + a_m − 2·s_m|` over interior boundaries.
    pub fn arbitrage_gap(&self) -> f64 {
        let s = self.boundaries();
        self.actions
            .windows(2)
            .enumerate()
            .map(|(i, a)| (a[0] + a[1] - 2.0 * s[i + 1]).abs())
            .fold(0.0, f64::max)
    }

    /// Ex-ante consumer payoff under the uniform prior.
    pub fn consumer_ex_ante(&self, p: &ModelParams) -> f64 {
        self.partition
            .intervals()
            .zip(&self.actions)
            .map(|(c, &a)| crate::model::interval_integral_consumer(p, &c, a))
            .sum()
    }

    /// Ex-ante aggregator payoff under the uniform prior.
    pub fn aggregator_ex_ante(&self, p: &ModelParams) -> f64 {
        self.partition
            .intervals()
            .zip(&self.actions)
            .map(|(c, &a)| interval_integral_aggregator(p, &c, a))
            .sum()
    }
}

/// Residuals of an ε-Nash check; see [`verify_equilibrium`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub max_action_residual: f64,
    pub max_message_residual: f64,
    pub arbitrage_residual: f64,
    pub passed: bool,
}

fn w0(x: f64) -> f64 {
    lambert_w0(x).expect("Lambert W argument is nonnegative")
}

/// `φ_b(x) = 2x + b·eˣ`.
pub fn phi(p: &ModelParams, x: f64) -> f64 {
    2.0 * x + p.b * x.exp()
}

fn check_interior(p: &ModelParams, y: f64) -> Result<()> {
    if y.is_nan() || y < p.b {
        return Err(Error::InteriorAction {
            value: y,
            bias: p.b,
        });
    }
    Ok(())
}

/// `φ_b⁻¹(y)` for `y ≥ b`, by bracketed root finding on `[0, y/2]`.
pub fn phi_inverse(p: &ModelParams, y: f64) -> Result<f64> {
    check_interior(p, y)?;
    if y == p.b {
        return Ok(0.0);
    }
    solve_increasing(|x| phi(p, x), 0.0, 0.5 * y, y, Tolerance::default())
}

/// `φ_b⁻¹(y) = y/2 − W(b·e^{y/2}/2)`, the closed-form counterpart of
/// [`phi_inverse`].
pub fn phi_inverse_lambert(p: &ModelParams, y: f64) -> Result<f64> {
    check_interior(p, y)?;
    Ok(0.5 * y - w0(0.5 * p.b * (0.5 * y).exp()))
}

/// The aggregator's best allocation on a cell under a uniform belief:
/// `s̄ − W(b·e^{s̄}/2)` when the midpoint `s̄` exceeds `b/2`, else `0`.
pub fn best_response_action(p: &ModelParams, cell: &Interval) -> f64 {
    pointwise_best_action(p, cell.midpoint())
}

/// Best allocation when the aggregator knows the need `s` exactly.
pub fn pointwise_best_action(p: &ModelParams, s: f64) -> f64 {
    if s > 0.5 * p.b {
        (s - w0(0.5 * p.b * s.exp())).max(0.0)
    } else {
        0.0
    }
}

/// Runs the boundary recursion from `s_0 = 0`, `s_1 = s1`.
///
/// Stops after `max_cells + 1` boundaries or right after the first boundary
/// above 2, whichever comes first.
pub fn forward_partition(p: &ModelParams, s1: f64, max_cells: usize) -> Result<Vec<f64>> {
    if !(s1 > p.b) {
        return Err(Error::InteriorAction {
            value: s1,
            bias: p.b,
        });
    }
    if s1 > 1.0 {
        return Err(Error::Domain(format!("s1 must not exceed 1, got {s1}")));
    }
    let mut s = Vec::with_capacity(max_cells.min(DEFAULT_CELL_CAP) + 1);
    s.push(0.0);
    s.push(s1);
    while s.len() < max_cells + 1 {
        let n = s.len();
        let (prev, cur) = (s[n - 2], s[n - 1]);
        if cur > FORWARD_CAP {
            break;
        }
        let a_prev = phi_inverse(p, prev + cur)?;
        let a_cur = 2.0 * cur - a_prev;
        s.push(phi(p, a_cur) - cur);
    }
    if max_cells == 0 {
        s.truncate(1);
    }
    Ok(s)
}

/// `s_L` reached from `s1`, or the first boundary past the forward cap when
/// the recursion stops early. Either way the result is on the correct side
/// of 1, which is all the shooting solver needs.
fn shoot(p: &ModelParams, s1: f64, cells: usize) -> Result<f64> {
    let s = forward_partition(p, s1, cells)?;
    Ok(*s.last().unwrap())
}

/// Number of cells supportable in an interior-action equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageCount {
    pub count: usize,
    /// `true` when `count` hit the cap and the true maximum may be larger.
    pub saturated: bool,
}

/// `M* = max{L ≥ 1 : s_L(b + ε) ≤ 1}`, clamped to `cap`, with a saturation
/// flag.
pub fn max_messages_detail(p: &ModelParams, epsilon: f64, cap: usize) -> MessageCount {
    let cap = cap.max(1);
    let s1 = p.b + epsilon;
    if p.b >= 1.0 || !(epsilon > 0.0) || s1 > 1.0 {
        return MessageCount {
            count: 1,
            saturated: cap == 1,
        };
    }
    let s = forward_partition(p, s1, cap).expect("s1 = b + ε lies in the interior regime");
    let count = s
        .iter()
        .skip(1)
        .take_while(|&&x| x <= 1.0)
        .count()
        .clamp(1, cap);
    MessageCount {
        count,
        saturated: count == cap,
    }
}

/// Maximal number of messages in equilibrium at bias `b`; `1` means only
/// the uninformative (babbling) equilibrium exists.
pub fn max_messages(p: &ModelParams, epsilon: f64, cap: usize) -> usize {
    max_messages_detail(p, epsilon, cap).count
}

/// Solves `s_0 = 0, s_L = 1` for the `L`-cell equilibrium partition by
/// shooting on `s_1 ∈ [b + ε, 1]`.
pub fn solve_partition(p: &ModelParams, cells: usize, epsilon: f64) -> Result<Partition> {
    if cells == 0 {
        return Err(Error::Domain("cells must be at least 1".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if cells == 1 {
        return Partition::new(vec![0.0, 1.0]);
    }
    let infeasible = || Error::Infeasible {
        requested: cells,
        max: max_messages(p, epsilon, cells),
        bias: p.b,
    };
    let s_lo = p.b + epsilon;
    if s_lo >= 1.0 {
        return Err(infeasible());
    }
    let reach_lo = shoot(p, s_lo, cells)?;
    if reach_lo > 1.0 {
        return Err(infeasible());
    }
    let reach_hi = shoot(p, 1.0, cells)?;
    if !(reach_lo <= reach_hi) {
        return Err(Error::Bracket {
            lo: s_lo,
            hi: 1.0,
            f_lo: reach_lo,
            f_hi: reach_hi,
            target: 1.0,
        });
    }

    let s1 = solve_increasing(
        |x| shoot(p, x, cells).unwrap_or(f64::NAN),
        s_lo,
        1.0,
        1.0,
        Tolerance::default(),
    )?;
    let mut boundaries = forward_partition(p, s1, cells)?;
    let last = *boundaries.last().unwrap();
    if boundaries.len() != cells + 1 || (last - 1.0).abs() > SHOOTING_TOL {
        return Err(Error::Convergence {
            what: "shooting on s1",
            iterations: Tolerance::DEFAULT_MAX_ITER,
        });
    }
    boundaries[cells] = 1.0;
    Partition::new(boundaries)
}

/// The `L`-cell partition with the aggregator's best response on each cell.
pub fn equilibrium_profile(
    p: &ModelParams,
    cells: usize,
    epsilon: f64,
) -> Result<EquilibriumProfile> {
    let partition = solve_partition(p, cells, epsilon)?;
    Ok(EquilibriumProfile::best_response_to(p, partition))
}

/// Checks that neither player gains by a unilateral deviation.
///
/// 1. Per cell, the prescribed action against the best of `grid_n` equally
///    spaced actions in `[0, 1]` (cell-integrated aggregator payoff).
/// 2. At `grid_n` midpoint-sampled states, the consumer's payoff from its
///    prescribed message against the best available message.
/// 3. Consumer indifference `|u_C(s_m, a_{m−1}) − u_C(s_m, a_m)|` at each
///    interior boundary.
///
/// Residuals are clipped at zero. `grid_n` should be at least 100.
pub fn verify_equilibrium(
    p: &ModelParams,
    profile: &EquilibriumProfile,
    grid_n: usize,
    tol: f64,
) -> VerificationReport {
    let n = grid_n.max(2);
    let actions = profile.actions();
    let u_c = |s: f64, a: f64| consumer_payoff(p, s, a).expect("states and actions lie in [0, 1]");

    let max_action_residual = profile
        .partition()
        .intervals()
        .zip(actions)
        .map(|(cell, &a)| {
            let prescribed = interval_integral_aggregator(p, &cell, a);
            let best = (0..n)
                .map(|j| interval_integral_aggregator(p, &cell, j as f64 / (n - 1) as f64))
                .fold(f64::NEG_INFINITY, f64::max);
            (best - prescribed).max(0.0)
        })
        .fold(0.0, f64::max);

    let max_message_residual = (0..n)
        .map(|i| {
            let s = (i as f64 + 0.5) / n as f64;
            let prescribed = u_c(s, actions[profile.partition().cell_of(s)]);
            let best = actions
                .iter()
                .map(|&a| u_c(s, a))
                .fold(f64::NEG_INFINITY, f64::max);
            (best - prescribed).max(0.0)
        })
        .fold(0.0, f64::max);

    let s = profile.boundaries();
    let arbitrage_residual = actions
        .windows(2)
        .enumerate()
        .map(|(i, a)| (u_c(s[i + 1], a[0]) - u_c(s[i + 1], a[1])).abs())
        .fold(0.0, f64::max);

    VerificationReport {
        max_action_residual,
        max_message_residual,
        arbitrage_residual,
        passed: max_action_residual <= tol
            && max_message_residual <= tol
            && arbitrage_residual <= tol,
    }
}
