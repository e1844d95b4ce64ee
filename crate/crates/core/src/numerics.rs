//! Special functions, bracketed root finding and adaptive quadrature.
//!
//! Everything here is a pure function of its inputs.

use crate::error::{Error, Result};

/// Stopping rule shared by the iterative routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub const DEFAULT_ABS_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_ITER: usize = 200;

    pub fn new(abs_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::Domain(format!(
                "abs_tol must be positive, got {abs_tol}"
            )));
        }
        if max_iter == 0 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        Ok(Self { abs_tol, max_iter })
    }

    /// Same iteration budget, different absolute tolerance.
    pub fn with_abs_tol(self, abs_tol: f64) -> Result<Self> {
        Self::new(abs_tol, self.max_iter)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: Self::DEFAULT_ABS_TOL,
            max_iter: Self::DEFAULT_MAX_ITER,
        }
    }
}

const HALLEY_MAX_ITER: usize = 64;

/// Principal branch of the Lambert W function on `[0, ∞)`.
///
/// Solves `w·eʷ = x` by Halley iteration. The seed is a truncated power
/// series for small `x`, `ln(1 + x)` in the middle range and the two-term
/// asymptotic expansion `ln x − ln ln x` above `e`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!(
            "lambert_w0 requires x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let mut w = if x < 0.25 {
        x * (1.0 - x * (1.0 - x * (1.5 - x * 8.0 / 3.0)))
    } else if x <= std::f64::consts::E {
        x.ln_1p()
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..HALLEY_MAX_ITER {
        let ew = w.exp();
        let residual = w * ew - x;
        let wp1 = w + 1.0;
        let step = residual / (ew * wp1 - (w + 2.0) * residual / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w.max(0.0))
}

/// Finds `x ∈ [lo, hi]` with `f(x) = target` for nondecreasing `f`.
///
/// Regula falsi with the Illinois modification, falling back to a
/// bisection step whenever three consecutive updates fail to halve the
/// bracket. The result is accepted once `|f(x) − target| ≤ abs_tol`, or when
/// the bracket has shrunk to adjacent floats (the better endpoint is
/// returned).
pub fn solve_increasing<F>(mut f: F, lo: f64, hi: f64, target: f64, tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo <= hi) {
        return Err(Error::Domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo <= target && target <= f_hi) {
        return Err(Error::Bracket {
            lo,
            hi,
            f_lo,
            f_hi,
            target,
        });
    }
    let (mut a, mut c) = (lo, hi);
    let (mut ra, mut rc) = (f_lo - target, f_hi - target);
    if ra.abs() <= tol.abs_tol {
        return Ok(lo);
    }
    if rc.abs() <= tol.abs_tol {
        return Ok(hi);
    }

    // Interpolation weights; halved by the Illinois rule, distinct from the
    // true residuals `ra` and `rc`.
    let (mut wa, mut wc) = (ra, rc);
    let mut last_side = 0i8;
    let mut checkpoint_width = c - a;

    for iter in 1..=tol.max_iter {
        let force_bisect = iter % 3 == 0 && (c - a) > 0.5 * checkpoint_width;
        if iter % 3 == 0 {
            checkpoint_width = c - a;
        }
        let mut x = if !force_bisect && wc - wa > 0.0 {
            (a * wc - c * wa) / (wc - wa)
        } else {
            0.5 * (a + c)
        };
        if !(x > a && x < c) {
            x = 0.5 * (a + c);
        }
        if !(x > a && x < c) {
            // Bracket exhausted at floating-point resolution.
            return Ok(if ra.abs() <= rc.abs() { a } else { c });
        }

        let r = f(x) - target;
        if r.is_nan() {
            return Err(Error::Domain(format!("function returned NaN at {x}")));
        }
        if r.abs() <= tol.abs_tol {
            return Ok(x);
        }
        if r < 0.0 {
            a = x;
            ra = r;
            wa = r;
            if last_side == -1 {
                wc *= 0.5;
            }
            last_side = -1;
        } else {
            c = x;
            rc = r;
            wc = r;
            if last_side == 1 {
                wa *= 0.5;
            }
            last_side = 1;
        }
    }
    Err(Error::Convergence {
        what: "solve_increasing",
        iterations: tol.max_iter,
    })
}

const MAX_QUAD_DEPTH: usize = 50;
const MIN_QUAD_DEPTH: usize = 3;

/// Adaptive Simpson quadrature of `f` over `[lo, hi]`.
///
/// Functions with a kink must be integrated piecewise by the caller, with
/// the kink as a subinterval boundary (see [`integrate_split`]). Recursion
/// depth is bounded by `min(tol.max_iter, 50)`.
pub fn integrate<F>(f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo <= hi) {
        return Err(Error::Domain(format!(
            "integrate requires lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let mid = 0.5 * (lo + hi);
    let (f_lo, f_mid, f_hi) = (f(lo), f(mid), f(hi));
    let whole = simpson(lo, hi, f_lo, f_mid, f_hi);
    let depth = tol.max_iter.min(MAX_QUAD_DEPTH);
    adaptive_simpson(&f, lo, hi, f_lo, f_mid, f_hi, whole, tol.abs_tol, depth, 0)
}

/// [`integrate`] over `[lo, hi]` split at every point of `splits` that lies
/// strictly inside the interval.
pub fn integrate_split<F>(f: F, lo: f64, hi: f64, splits: &[f64], tol: Tolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo <= hi) {
        return Err(Error::Domain(format!(
            "integrate requires lo <= hi, got [{lo}, {hi}]"
        )));
    }
    let mut knots: Vec<f64> = splits
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    knots.insert(0, lo);
    knots.push(hi);

    let pieces = (knots.len() - 1) as f64;
    let piece_tol = tol.with_abs_tol(tol.abs_tol / pieces)?;
    knots
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], piece_tol))
        .sum()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth_left: usize,
    level: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;

    let exhausted = !(lm > a && rm < b);
    if level >= MIN_QUAD_DEPTH && (delta.abs() <= 15.0 * tol || exhausted) {
        return Ok(left + right + delta / 15.0);
    }
    if !delta.is_finite() {
        return Err(Error::Domain(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    if depth_left == 0 {
        return Err(Error::Convergence {
            what: "adaptive Simpson quadrature",
            iterations: level,
        });
    }
    let l = adaptive_simpson(
        f,
        a,
        m,
        fa,
        flm,
        fm,
        left,
        0.5 * tol,
        depth_left - 1,
        level + 1,
    )?;
    let r = adaptive_simpson(
        f,
        m,
        b,
        fm,
        frm,
        fb,
        right,
        0.5 * tol,
        depth_left - 1,
        level + 1,
    )?;
    Ok(l + r)
}
