//! One-dimensional bracketing root finding and maximization.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Root of `f` on `[lo, hi]` by bisection. The bracket is checked first: the
/// endpoint values must have opposite signs (a zero endpoint is returned
/// as is). Stops when the bracket is narrower than `tol` or can no longer
/// be split in floating point.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.signum() != f_hi.signum()) || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest `x` in `[lo, hi]` with `pred(x)` true, assuming `pred` holds on
/// a prefix of the interval. `pred(lo)` must hold.
pub fn bisect_predicate(pred: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    if pred(hi) {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(x, f(x))`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
    }
    if fa >= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Index of the largest value; ties go to the smallest index. NaNs lose.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] || values[best].is_nan() {
            best = i;
        }
    }
    best
}

/// Maximizes `f` over `points` (ascending), then refines between the
/// neighbours of the best grid point by golden section. The grid is
/// evaluated in parallel.
pub fn grid_then_golden_max(
    f: impl Fn(f64) -> f64 + Sync,
    points: &[f64],
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    let values: Vec<f64> = points.par_iter().map(|&x| f(x)).collect();
    refine_max(&f, points, &values, lo, hi, tol)
}

/// Sequential variant of [`grid_then_golden_max`].
pub fn grid_then_golden_max_seq(
    f: impl Fn(f64) -> f64,
    points: &[f64],
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    let values: Vec<f64> = points.iter().map(|&x| f(x)).collect();
    refine_max(&f, points, &values, lo, hi, tol)
}

fn refine_max(
    f: &impl Fn(f64) -> f64,
    points: &[f64],
    values: &[f64],
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    let i = argmax(values);
    let left = if i == 0 { lo } else { points[i - 1] };
    let right = if i + 1 == points.len() {
        hi
    } else {
        points[i + 1]
    };
    let (x, v) = golden_max(f, left, right, tol);
    if v >= values[i] {
        (x, v)
    } else {
        (points[i], values[i])
    }
}

/// `n` evenly spaced points strictly inside `(lo, hi)`.
pub fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64)
        .collect()
}

/// `n >= 2` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn closed_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    g[n - 1] = hi;
    g
}
