//! Alternating best-response dynamics between consumer and aggregator.
//!
//! At `b = 0` both players share the payoff `−(s − a)²` and the iteration
//! is the Lloyd-Max algorithm for the uniform source: centroids, then
//! midpoints, repeated. Common payoffs make this a potential game, so the
//! distortion never increases. For `b > 0` nothing guarantees convergence;
//! the result reports what happened instead of failing.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{best_response_action, EquilibriumProfile, Partition};
use crate::error::{Error, Result};
use crate::model::{Interval, ModelParams};

/// Cells narrower than this are considered merged.
const MERGE_WIDTH: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrDynamicsResult {
    pub profile: EquilibriumProfile,
    pub iterations: usize,
    pub converged: bool,
    pub merged_cells: bool,
}

/// The consumer's best partition against fixed allocations: under the
/// quadratic payoff each interior boundary is the midpoint of the two
/// adjacent actions.
pub fn consumer_boundaries_br(actions: &[f64]) -> Result<Vec<f64>> {
    if actions.is_empty() {
        return Err(Error::Domain("need at least one action".into()));
    }
    if actions.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::Domain(format!(
            "actions must lie in [0, 1], got {actions:?}"
        )));
    }
    if actions.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain(format!(
            "actions must be strictly increasing, got {actions:?}"
        )));
    }
    Ok(midpoint_boundaries(actions))
}

fn midpoint_boundaries(actions: &[f64]) -> Vec<f64> {
    let mut s = Vec::with_capacity(actions.len() + 1);
    s.push(0.0);
    s.extend(
        actions
            .windows(2)
            .map(|w| (0.5 * (w[0] + w[1])).clamp(0.0, 1.0)),
    );
    s.push(1.0);
    s
}

fn cell_actions(p: &ModelParams, boundaries: &[f64]) -> Vec<f64> {
    boundaries
        .windows(2)
        .map(|w| {
            let cell = Interval::new(w[0], w[1].max(w[0])).expect("boundaries lie in [0, 1]");
            best_response_action(p, &cell)
        })
        .collect()
}

fn sup_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// [`br_dynamics_traced`] without an observer.
pub fn br_dynamics(
    p: &ModelParams,
    cells: usize,
    init: &Partition,
    max_iter: usize,
    tol: f64,
) -> Result<BrDynamicsResult> {
    br_dynamics_traced(p, cells, init, max_iter, tol, |_, _| {})
}

/// Runs best-response dynamics from `init`.
///
/// Each round sets every cell's action to the aggregator's best response,
/// then moves every boundary to the consumer's indifference point. After
/// each round `observe(boundaries, actions)` sees the new boundaries and the
/// actions they were computed from. Stops when neither boundaries nor
/// actions move by more than `tol` (sup norm), when a cell collapses, or
/// after `max_iter` rounds. Collapsed cells are removed from the returned
/// profile.
pub fn br_dynamics_traced<F>(
    p: &ModelParams,
    cells: usize,
    init: &Partition,
    max_iter: usize,
    tol: f64,
    mut observe: F,
) -> Result<BrDynamicsResult>
where
    F: FnMut(&[f64], &[f64]),
{
    if cells == 0 || init.cells() != cells {
        return Err(Error::Domain(format!(
            "initial partition has {} cells, expected {cells}",
            init.cells()
        )));
    }

    let mut boundaries = init.boundaries().to_vec();
    let mut actions = cell_actions(p, &boundaries);
    let mut iterations = 0;
    let mut converged = false;
    let mut merged_cells = false;

    while iterations < max_iter {
        iterations += 1;
        let next_actions = cell_actions(p, &boundaries);
        let next_boundaries = midpoint_boundaries(&next_actions);
        let change = sup_diff(&next_boundaries, &boundaries).max(sup_diff(&next_actions, &actions));
        boundaries = next_boundaries;
        actions = next_actions;
        observe(&boundaries, &actions);

        if boundaries.windows(2).any(|w| w[1] - w[0] < MERGE_WIDTH) {
            merged_cells = true;
            break;
        }
        if change <= tol {
            converged = true;
            break;
        }
    }

    if merged_cells {
        let mut kept = vec![0.0];
        for &s in &boundaries[1..] {
            if s - kept.last().unwrap() >= MERGE_WIDTH {
                kept.push(s);
            }
        }
        *kept.last_mut().unwrap() = 1.0;
        boundaries = kept;
    }
    let partition = Partition::new(boundaries)?;
    let profile = EquilibriumProfile::best_response_to(p, partition);

    Ok(BrDynamicsResult {
        profile,
        iterations,
        converged,
        merged_cells,
    })
}
