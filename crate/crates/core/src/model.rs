//! Payoffs of the signaling game and their integrals over cells of `[0, 1]`.
//!
//! The prior on the power need is uniform on `[0, 1]` with unit density, so
//! the cell integrals below are already ex-ante contributions; summing them
//! over a partition gives the ex-ante payoff with no reweighting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bias `b` on the grid cost and the additive payoff constant `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub b: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl ModelParams {
    pub const DEFAULT_K: f64 = 1.0;

    pub fn new(b: f64, k: f64) -> Result<Self> {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::Domain(format!(
                "bias b must be finite and >= 0, got {b}"
            )));
        }
        if !k.is_finite() {
            return Err(Error::Domain(format!("K must be finite, got {k}")));
        }
        Ok(Self { b, k })
    }

    /// `K = 1`, the constant used for the reported payoff studies.
    pub fn with_bias(b: f64) -> Result<Self> {
        Self::new(b, Self::DEFAULT_K)
    }
}

/// A cell `[lo, hi] ⊆ [0, 1]` of the power-need space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub const fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in [0, 1], got {x}")))
    }
}

/// `u_C(s, a) = −(s − a)² + K`.
pub fn consumer_payoff(p: &ModelParams, s: f64, a: f64) -> Result<f64> {
    check_unit("s", s)?;
    check_unit("a", a)?;
    Ok(-(s - a) * (s - a) + p.k)
}

/// `u_A(s, a) = u_C(s, a) − b·eᵃ`.
pub fn aggregator_payoff(p: &ModelParams, s: f64, a: f64) -> Result<f64> {
    Ok(consumer_payoff(p, s, a)? - p.b * a.exp())
}

/// `∫_I u_C(s, a) ds` in closed form.
pub fn interval_integral_consumer(p: &ModelParams, cell: &Interval, a: f64) -> f64 {
    let (lo, hi) = (cell.lo, cell.hi);
    p.k * (hi - lo) - ((hi - a).powi(3) - (lo - a).powi(3)) / 3.0
}

/// `∫_I u_A(s, a) ds` in closed form.
pub fn interval_integral_aggregator(p: &ModelParams, cell: &Interval, a: f64) -> f64 {
    interval_integral_consumer(p, cell, a) - p.b * a.exp() * cell.width()
}

type Payoff = fn(&ModelParams, f64, f64) -> Result<f64>;

const FD_STEP: f64 = 1e-4;
const GRID_LO: f64 = 0.01;
const GRID_HI: f64 = 0.99;
const STATIONARY_SCAN: usize = 10_000;
const STATIONARY_TOL: f64 = 1e-3;

/// Finite-difference check of the single-crossing conditions for both
/// payoffs on a `grid_n × grid_n` grid over `[0.01, 0.99]²`:
/// `∂²u/∂s² < 0`, `∂²u/∂s∂a > 0`, and for every `s` some `a` in a scan of
/// `[0, 1]` with `|∂u/∂s| ≤ 1e−3`.
pub fn single_crossing_check(p: &ModelParams, grid_n: usize) -> bool {
    if grid_n < 3 {
        return false;
    }
    let h = FD_STEP;
    let node = |i: usize| GRID_LO + (GRID_HI - GRID_LO) * i as f64 / (grid_n - 1) as f64;
    let payoffs: [Payoff; 2] = [consumer_payoff, aggregator_payoff];

    for u in payoffs {
        let eval = |s: f64, a: f64| u(p, s, a).unwrap_or(f64::NAN);
        let d_s = |s: f64, a: f64| (eval(s + h, a) - eval(s - h, a)) / (2.0 * h);

        for i in 0..grid_n {
            let s = node(i);
            for j in 0..grid_n {
                let a = node(j);
                let d_ss = (eval(s + h, a) - 2.0 * eval(s, a) + eval(s - h, a)) / (h * h);
                let d_sa = (eval(s + h, a + h) - eval(s + h, a - h) - eval(s - h, a + h)
                    + eval(s - h, a - h))
                    / (4.0 * h * h);
                if !(d_ss < 0.0 && d_sa > 0.0) {
                    return false;
                }
            }
            let stationary = (0..=STATIONARY_SCAN)
                .map(|k| k as f64 / STATIONARY_SCAN as f64)
                .any(|a| d_s(s, a).abs() <= STATIONARY_TOL);
            if !stationary {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, Tolerance};
    use approx::assert_abs_diff_eq;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn params(b: f64, k: f64) -> ModelParams {
        ModelParams::new(b, k).unwrap()
    }

    #[test]
    fn params_and_interval_validation() {
        assert!(ModelParams::new(-0.1, 1.0).is_err());
        assert!(ModelParams::new(0.1, f64::INFINITY).is_err());
        assert!(Interval::new(0.6, 0.5).is_err());
        assert!(Interval::new(-0.1, 0.5).is_err());
        assert!(Interval::new(0.2, 1.1).is_err());
        assert!(Interval::new(0.3, 0.3).is_ok());
    }

    #[test]
    fn consumer_payoff_examples() {
        assert_eq!(consumer_payoff(&params(0.0, 1.0), 0.5, 0.5).unwrap(), 1.0);
        assert_eq!(consumer_payoff(&params(0.0, 1.0), 0.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            consumer_payoff(&params(0.0, 0.0), 0.3, 0.7).unwrap(),
            -0.16,
            epsilon = 1e-15
        );
        assert!(consumer_payoff(&params(0.0, 1.0), 1.2, 0.5).is_err());
        assert!(aggregator_payoff(&params(0.0, 1.0), 0.5, -0.1).is_err());
    }

    #[test]
    fn aggregator_payoff_examples() {
        let p0 = params(0.0, 1.0);
        assert_eq!(
            aggregator_payoff(&p0, 0.2, 0.9).unwrap(),
            consumer_payoff(&p0, 0.2, 0.9).unwrap()
        );
        assert_eq!(aggregator_payoff(&params(1.0, 1.0), 0.0, 0.0).unwrap(), 0.0);
        let v = aggregator_payoff(&params(0.1, 1.0), 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(v, 1.0 - 0.1 * 0.5_f64.exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(v, 0.83513, epsilon = 1e-5);
    }

    #[test]
    fn interval_integral_examples() {
        let p = params(0.0, 1.0);
        assert_abs_diff_eq!(
            interval_integral_consumer(&p, &Interval::unit(), 0.5),
            1.0 - 1.0 / 12.0,
            epsilon = 1e-15
        );
        let point = Interval::new(0.4, 0.4).unwrap();
        assert_eq!(interval_integral_consumer(&p, &point, 0.9), 0.0);
        assert_eq!(
            interval_integral_aggregator(&params(0.3, 1.0), &point, 0.9),
            0.0
        );

        let half = Interval::new(0.0, 0.5).unwrap();
        assert_abs_diff_eq!(
            interval_integral_consumer(&p, &half, 0.25),
            0.489_583_333_333,
            epsilon = 1e-12
        );

        let p1 = params(0.1, 1.0);
        let v = interval_integral_aggregator(&p1, &Interval::unit(), 0.5);
        assert_abs_diff_eq!(v, 0.751_795, epsilon = 1e-6);
        assert_eq!(
            interval_integral_aggregator(&p, &half, 0.1),
            interval_integral_consumer(&p, &half, 0.1)
        );
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let mut rng = StdRng::seed_from_u64(7);
        let tol = Tolerance::default();
        for _ in 0..100 {
            let b = rng.gen_range(0.0..2.0);
            let k = rng.gen_range(-2.0..2.0);
            let p = params(b, k);
            let (x, y): (f64, f64) = (rng.gen(), rng.gen());
            let cell = Interval::new(x.min(y), x.max(y)).unwrap();
            let a: f64 = rng.gen();
            let qc = integrate(
                |s| consumer_payoff(&p, s, a).unwrap(),
                cell.lo(),
                cell.hi(),
                tol,
            )
            .unwrap();
            let qa = integrate(
                |s| aggregator_payoff(&p, s, a).unwrap(),
                cell.lo(),
                cell.hi(),
                tol,
            )
            .unwrap();
            assert_abs_diff_eq!(
                interval_integral_consumer(&p, &cell, a),
                qc,
                epsilon = 1e-10
            );
            assert_abs_diff_eq!(
                interval_integral_aggregator(&p, &cell, a),
                qa,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn aggregator_never_exceeds_consumer() {
        for &b in &[0.0, 0.05, 1.0] {
            let p = params(b, 1.0);
            for i in 0..=20 {
                for j in 0..=20 {
                    let (s, a) = (i as f64 / 20.0, j as f64 / 20.0);
                    let (uc, ua) = (
                        consumer_payoff(&p, s, a).unwrap(),
                        aggregator_payoff(&p, s, a).unwrap(),
                    );
                    if b == 0.0 {
                        assert_eq!(ua, uc);
                    } else {
                        assert!(ua < uc);
                    }
                }
            }
        }
    }

    #[test]
    fn payoffs_concave_in_action() {
        let h = 1e-4;
        for &b in &[0.0, 0.2, 3.0] {
            let p = params(b, 1.0);
            for i in 0..=10 {
                for j in 1..=98 {
                    let (s, a) = (i as f64 / 10.0, j as f64 / 100.0);
                    for u in [consumer_payoff, aggregator_payoff] {
                        let d2 = (u(&p, s, a + h).unwrap() - 2.0 * u(&p, s, a).unwrap()
                            + u(&p, s, a - h).unwrap())
                            / (h * h);
                        assert!(d2 <= 0.0, "b = {b}, s = {s}, a = {a}");
                    }
                }
            }
        }
    }

    #[test]
    fn single_crossing_examples() {
        assert!(single_crossing_check(&params(0.1, 1.0), 50));
        assert!(single_crossing_check(&params(0.0, 0.0), 10));
        assert!(single_crossing_check(&params(5.0, 1.0), 50));
        assert!(!single_crossing_check(&params(0.1, 1.0), 2));
    }
}
