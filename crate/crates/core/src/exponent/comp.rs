//! Random-coding exponent of the COMP rule and the rates derived from it.

use rayon::prelude::*;

use super::scalar::{
    argmax, bisect_predicate, closed_grid, golden_max, grid_then_golden_max, interior_grid,
};
use super::{entropy_bits, positive_part, union_exponent_closed, wdr_exponent, zero_point};
use crate::error::{Error, Result};

const GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompExponentResult {
    pub s: usize,
    pub rate: f64,
    pub exponent: f64,
    /// Maximizing relative column weight.
    pub q_opt: f64,
    /// Minimizing relative union weight at `q_opt`.
    pub union_opt: f64,
}

// h(Q) - q h(Q/q): the rate headroom left when s columns cover weight q
fn headroom(rel_weight: f64, rel_union: f64) -> f64 {
    entropy_bits(rel_weight) - rel_union * entropy_bits((rel_weight / rel_union).min(1.0))
}

fn objective(s: usize, rel_weight: f64, rel_union: f64, rate: f64) -> f64 {
    union_exponent_closed(s, rel_weight, rel_union)
        + positive_part(headroom(rel_weight, rel_union) - rate)
}

/// `min_{Q <= q <= min(1, sQ)}` of the COMP objective, by a closed grid and
/// golden-section refinement around the best grid point.
fn inner_min(s: usize, rel_weight: f64, rate: f64) -> (f64, f64) {
    let top = (s as f64 * rel_weight).min(1.0);
    let grid = closed_grid(rel_weight, top, GRID);
    let neg: Vec<f64> = grid
        .iter()
        .map(|&q| -objective(s, rel_weight, q, rate))
        .collect();
    let i = argmax(&neg);
    let left = grid[i.saturating_sub(1)];
    let right = grid[(i + 1).min(GRID - 1)];
    let (q, v) = golden_max(
        |q| -objective(s, rel_weight, q, rate),
        left,
        right,
        1e-12 * top.max(1e-3),
    );
    if v >= neg[i] {
        (q, -v)
    } else {
        (grid[i], -neg[i])
    }
}

fn check_s(s: usize) -> Result<()> {
    if s < 2 {
        return Err(Error::Domain(format!(
            "COMP exponents need s >= 2, got s = {s}"
        )));
    }
    Ok(())
}

/// `E_comp(s, R) = max_Q min_q { A(s, Q, q) + [h(Q) - q h(Q/q) - R]+ }`.
/// `R = 0` gives the limit `E_comp(s, 0)`.
pub fn comp_exponent(s: usize, rate: f64) -> Result<CompExponentResult> {
    check_s(s)?;
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::Domain(format!(
            "rate must lie in [0, 1), got {rate}"
        )));
    }
    let grid = interior_grid(0.0, 1.0, GRID);
    let (q_opt, exponent) =
        grid_then_golden_max(|w| inner_min(s, w, rate).1, &grid, 0.0, 1.0, 1e-9);
    Ok(CompExponentResult {
        s,
        rate,
        exponent,
        q_opt,
        union_opt: inner_min(s, q_opt, rate).0,
    })
}

/// `C_comp(s) = sup{R : E_comp(s, R) > 0}`.
///
/// `A(s, Q, .)` vanishes only at `q0 = 1 - (1-Q)^s`, so the exponent is
/// positive exactly when the headroom at `q0` exceeds `R`; the supremum is
/// `max_Q h(Q) - q0 h(Q/q0)`.
pub fn comp_capacity(s: usize) -> Result<f64> {
    check_s(s)?;
    let grid = interior_grid(0.0, 1.0, GRID);
    let (_, c) = grid_then_golden_max(|w| headroom(w, zero_point(s, w)), &grid, 0.0, 1.0, 1e-12);
    Ok(c)
}

/// `C_comp(s)` by bisection on the predicate `E_comp(s, R) > 1e-9`, to
/// `R`-tolerance 1e-5. Slower and slightly biased low near the threshold,
/// where the exponent is quadratically small.
pub fn comp_capacity_by_bisection(s: usize) -> Result<f64> {
    check_s(s)?;
    Ok(bisect_predicate(
        |r| {
            comp_exponent(s, r)
                .map(|e| e.exponent > 1e-9)
                .unwrap_or(false)
        },
        0.0,
        1.0 - 1e-9,
        1e-5,
    ))
}

/// `R_wdr(s) = sup{R : E_comp(s, R) > E_wdr(s)}`, by bisection to 1e-5.
pub fn wdr_crossover_rate(s: usize) -> Result<f64> {
    let target = wdr_exponent(s)?.exponent;
    let hi = comp_capacity(s)?;
    let above = |r: f64| {
        comp_exponent(s, r)
            .map(|e| e.exponent > target)
            .unwrap_or(false)
    };
    if !above(0.0) {
        return Ok(0.0);
    }
    Ok(bisect_predicate(above, 0.0, hi, 1e-5))
}

/// `E_comp(s, R)` along a rate grid, evaluated in parallel.
pub fn comp_exponent_curve(s: usize, rates: &[f64]) -> Result<Vec<CompExponentResult>> {
    rates.par_iter().map(|&r| comp_exponent(s, r)).collect()
}
