//! Ex-ante payoffs under six information scenarios, and sweeps over the bias.
//!
//! Aggregator scenarios: no message (one cell), equilibrium signaling, and
//! full knowledge of the need. Consumer scenarios: self-serve (`a = s`),
//! full knowledge on the aggregator's side, and equilibrium signaling.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    equilibrium_profile, max_messages, pointwise_best_action, EquilibriumProfile,
};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::{integrate_split, Tolerance};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPayoffs {
    pub b: f64,
    pub m_star: usize,
    pub agg_no_message: f64,
    pub agg_equilibrium: f64,
    pub agg_full_info: f64,
    pub cons_self_serve: f64,
    pub cons_full_info: f64,
    pub cons_equilibrium: f64,
}

/// Scenario payoffs at the most informative equilibrium, `L = M*`.
pub fn scenario_payoffs(
    p: &ModelParams,
    epsilon: f64,
    cap: usize,
    quad_tol: f64,
) -> Result<ScenarioPayoffs> {
    scenario_payoffs_at(p, None, epsilon, cap, quad_tol)
}

/// Scenario payoffs with the equilibrium scenario evaluated at `cells`
/// (default `M*`).
pub fn scenario_payoffs_at(
    p: &ModelParams,
    cells: Option<usize>,
    epsilon: f64,
    cap: usize,
    quad_tol: f64,
) -> Result<ScenarioPayoffs> {
    let m_star = max_messages(p, epsilon, cap);
    let cells = cells.unwrap_or(m_star);

    let babble = equilibrium_profile(p, 1, epsilon)?;
    let eq = equilibrium_profile(p, cells, epsilon)?;
    let (cons_full_info, agg_full_info) = full_information(p, quad_tol)?;

    Ok(ScenarioPayoffs {
        b: p.b,
        m_star,
        agg_no_message: babble.aggregator_ex_ante(p),
        agg_equilibrium: eq.aggregator_ex_ante(p),
        agg_full_info,
        cons_self_serve: p.k,
        cons_full_info,
        cons_equilibrium: eq.consumer_ex_ante(p),
    })
}

/// `(consumer, aggregator)` ex-ante payoffs when the aggregator observes `s`.
/// The allocation rule has a kink at `s = b/2`, which is used as a split.
fn full_information(p: &ModelParams, quad_tol: f64) -> Result<(f64, f64)> {
    let tol = Tolerance::default().with_abs_tol(quad_tol)?;
    let splits = [0.5 * p.b];
    let cons = integrate_split(
        |s| {
            let a = pointwise_best_action(p, s);
            p.k - (s - a) * (s - a)
        },
        0.0,
        1.0,
        &splits,
        tol,
    )?;
    let agg = integrate_split(
        |s| {
            let a = pointwise_best_action(p, s);
            p.k - (s - a) * (s - a) - p.b * a.exp()
        },
        0.0,
        1.0,
        &splits,
        tol,
    )?;
    Ok((cons, agg))
}

/// Ex-ante `(consumer, aggregator)` payoffs of every equilibrium
/// `L = 1 … M*`.
pub fn welfare_by_cells(p: &ModelParams, epsilon: f64, cap: usize) -> Result<Vec<(f64, f64)>> {
    (1..=max_messages(p, epsilon, cap))
        .map(|cells| {
            let e: EquilibriumProfile = equilibrium_profile(p, cells, epsilon)?;
            Ok((e.consumer_ex_ante(p), e.aggregator_ex_ante(p)))
        })
        .collect()
}

/// Rows of a bias sweep, in strictly increasing `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SweepRecord {
    rows: Vec<ScenarioPayoffs>,
}

impl SweepRecord {
    pub fn rows(&self) -> &[ScenarioPayoffs] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<ScenarioPayoffs> {
        self.rows
    }
}

/// Evenly spaced bias grid with both endpoints.
pub fn bias_grid(b_min: f64, b_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(0.0 <= b_min && b_min < b_max && b_max.is_finite()) {
        return Err(Error::Domain(format!(
            "sweep requires 0 <= b_min < b_max, got [{b_min}, {b_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::Domain(format!(
            "sweep requires at least 2 steps, got {steps}"
        )));
    }
    let last = steps - 1;
    Ok((0..steps)
        .map(|i| {
            if i == last {
                b_max
            } else {
                b_min + (b_max - b_min) * i as f64 / last as f64
            }
        })
        .collect())
}

/// [`scenario_payoffs`] on every point of [`bias_grid`], keeping `K` from
/// `p_template`.
pub fn sweep(
    p_template: &ModelParams,
    b_min: f64,
    b_max: f64,
    steps: usize,
    epsilon: f64,
    cap: usize,
) -> Result<SweepRecord> {
    let rows = bias_grid(b_min, b_max, steps)?
        .into_iter()
        .map(|b| {
            let p = ModelParams::new(b, p_template.k)?;
            scenario_payoffs(&p, epsilon, cap, DEFAULT_QUAD_TOL)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepRecord { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{DEFAULT_CELL_CAP, DEFAULT_EPSILON};
    use approx::assert_abs_diff_eq;

    fn run(b: f64) -> ScenarioPayoffs {
        let p = ModelParams::with_bias(b).unwrap();
        scenario_payoffs(&p, DEFAULT_EPSILON, DEFAULT_CELL_CAP, DEFAULT_QUAD_TOL).unwrap()
    }

    #[test]
    fn zero_bias_scenarios() {
        let r = run(0.0);
        assert_eq!(r.m_star, 64);
        assert_abs_diff_eq!(r.agg_no_message, 1.0 - 1.0 / 12.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.agg_full_info, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.cons_full_info, 1.0, epsilon = 1e-12);
        assert_eq!(r.cons_self_serve, 1.0);
        let uniform = 1.0 - 1.0 / (12.0 * 64.0 * 64.0);
        assert_abs_diff_eq!(r.agg_equilibrium, uniform, epsilon = 1e-9);
        assert_abs_diff_eq!(r.cons_equilibrium, uniform, epsilon = 1e-9);
    }

    #[test]
    fn babbling_regime_collapses_scenarios() {
        let r = run(0.5);
        assert_eq!(r.m_star, 1);
        assert_eq!(r.agg_equilibrium, r.agg_no_message);
    }

    #[test]
    fn orderings_hold() {
        for &b in &[0.0, 0.01, 0.05, 0.1, 0.2, 0.3, 0.7, 1.5] {
            let r = run(b);
            assert!(r.agg_no_message <= r.agg_equilibrium + 1e-9, "{r:?}");
            assert!(r.agg_equilibrium <= r.agg_full_info + 1e-9, "{r:?}");
            assert!(r.cons_equilibrium <= r.cons_full_info + 1e-9, "{r:?}");
            assert!(r.cons_full_info <= r.cons_self_serve + 1e-9, "{r:?}");
        }
    }

    #[test]
    fn explicit_cells_override() {
        let p = ModelParams::with_bias(0.05).unwrap();
        let r = scenario_payoffs_at(
            &p,
            Some(1),
            DEFAULT_EPSILON,
            DEFAULT_CELL_CAP,
            DEFAULT_QUAD_TOL,
        )
        .unwrap();
        assert_eq!(r.m_star, 4);
        assert_eq!(r.agg_equilibrium, r.agg_no_message);
        assert!(scenario_payoffs_at(
            &p,
            Some(5),
            DEFAULT_EPSILON,
            DEFAULT_CELL_CAP,
            DEFAULT_QUAD_TOL
        )
        .is_err());
    }

    #[test]
    fn welfare_increases_with_cells() {
        for &b in &[0.02, 0.05, 0.1] {
            let p = ModelParams::with_bias(b).unwrap();
            let w = welfare_by_cells(&p, DEFAULT_EPSILON, DEFAULT_CELL_CAP).unwrap();
            assert!(w.len() >= 2);
            for pair in w.windows(2) {
                assert!(
                    pair[1].0 > pair[0].0 && pair[1].1 > pair[0].1,
                    "b = {b}: {w:?}"
                );
            }
        }
    }

    #[test]
    fn sweep_grid_and_threshold() {
        let template = ModelParams::with_bias(0.0).unwrap();
        let rec = sweep(&template, 0.0, 0.25, 6, DEFAULT_EPSILON, DEFAULT_CELL_CAP).unwrap();
        let bs: Vec<f64> = rec.rows().iter().map(|r| r.b).collect();
        assert_eq!(bs.len(), 6);
        assert!(bs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(bs[5], 0.25);
        let at = |b: f64| {
            rec.rows()
                .iter()
                .find(|r| (r.b - b).abs() < 1e-12)
                .unwrap()
                .m_star
        };
        assert_eq!(at(0.2), 2);
        assert_eq!(at(0.25), 1);
        assert_eq!(rec.rows()[0], run(0.0));

        assert!(sweep(&template, 0.1, 0.1, 5, DEFAULT_EPSILON, DEFAULT_CELL_CAP).is_err());
        assert!(sweep(&template, 0.0, 0.1, 1, DEFAULT_EPSILON, DEFAULT_CELL_CAP).is_err());
        assert!(sweep(&template, -0.1, 0.1, 3, DEFAULT_EPSILON, DEFAULT_CELL_CAP).is_err());
    }
}
