//! Exponent of the weight decision rule over the constant-weight ensemble.
//!
//! For threshold `tau` and relative column weight `Q`, the two conditional
//! errors decay with exponents `A(s, Q, tau)` (an `s`-set looks too heavy)
//! and `A(s+1, Q, tau)` (an `(s+1)`-set looks too light). The admissible
//! range of `Q` is
//!
//! ```text
//! max{1 - (1-tau)^(1/(s+1)), tau/s} <= Q < 1 - (1-tau)^(1/s).
//! ```
//!
//! Inside it `A(s, Q, tau)` decreases and `A(s+1, Q, tau)` increases, so the
//! best `Q` either balances the two (a crossing) or, when no crossing exists,
//! sits at `Q = tau/s`: there `s` columns of weight `floor(QN)` can never
//! exceed `floor(tau N)` positives, the first error vanishes and only
//! `A(s+1, tau/s, tau)` remains.

use super::scalar::{bisect, grid_then_golden_max_seq, interior_grid};
use super::union_exponent_closed;
use crate::error::{Error, Result};

/// Which side of the admissible `Q` range determines the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `A(s, Q*, tau) = A(s+1, Q*, tau)` at an interior `Q*`.
    Crossing,
    /// `Q* = tau/s`; the rule never rejects an `s`-set.
    Disjoint,
}

/// The exponent `E(s, tau)` for a fixed threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauExponent {
    pub s: usize,
    pub tau: f64,
    pub q_star: f64,
    pub value: f64,
    pub regime: Regime,
}

/// The weight rule's exponent `E_wdr(s)` and its optimal parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WdrExponentResult {
    pub s: usize,
    pub tau_star: f64,
    pub q_star: f64,
    pub exponent: f64,
    pub regime: Regime,
}

/// Lower end of the admissible `Q` range (zero point of `A(s+1, ., tau)`
/// and the disjointness bound `tau/s`), and the upper end.
pub(crate) fn q_range(s: usize, tau: f64) -> (f64, f64, f64) {
    let zero_s1 = -((-tau).ln_1p() / (s + 1) as f64).exp_m1();
    let zero_s = -((-tau).ln_1p() / s as f64).exp_m1();
    (zero_s1, tau / s as f64, zero_s)
}

/// `E(s, tau)` and the optimal relative column weight `Q*`.
pub fn tau_exponent(s: usize, tau: f64) -> Result<TauExponent> {
    if s < 2 {
        return Err(Error::Domain(format!(
            "the weight-rule exponent needs s >= 2, got s = {s}"
        )));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!("tau must lie in (0, 1), got {tau}")));
    }
    let (zero_s1, disjoint, upper) = q_range(s, tau);
    let lower = zero_s1.max(disjoint);
    if lower >= upper {
        return Err(Error::Domain(format!(
            "empty Q range ({lower}, {upper}) for s = {s}, tau = {tau}"
        )));
    }
    let gap = |q: f64| union_exponent_closed(s, q, tau) - union_exponent_closed(s + 1, q, tau);

    if disjoint >= zero_s1 && gap(disjoint) <= 0.0 {
        return Ok(TauExponent {
            s,
            tau,
            q_star: disjoint,
            value: union_exponent_closed(s + 1, disjoint, tau),
            regime: Regime::Disjoint,
        });
    }
    let q_star = bisect(gap, lower, upper, 1e-12)?;
    Ok(TauExponent {
        s,
        tau,
        q_star,
        value: union_exponent_closed(s, q_star, tau),
        regime: Regime::Crossing,
    })
}

/// `E_wdr(s) = max_tau E(s, tau)`: a 512-point grid over `(0, 1)` refined by
/// golden section to `tau`-tolerance 1e-8.
pub fn wdr_exponent(s: usize) -> Result<WdrExponentResult> {
    let grid = interior_grid(0.0, 1.0, 512);
    // surface domain errors before searching
    tau_exponent(s, grid[0])?;
    let value = |tau: f64| {
        tau_exponent(s, tau)
            .map(|e| e.value)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (tau_star, _) = grid_then_golden_max_seq(value, &grid, 0.0, 1.0, 1e-8);
    let best = tau_exponent(s, tau_star)?;
    Ok(WdrExponentResult {
        s,
        tau_star,
        q_star: best.q_star,
        exponent: best.value,
        regime: best.regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::union_exponent;

    #[test]
    fn s_one_is_degenerate() {
        assert!(matches!(tau_exponent(1, 0.3), Err(Error::Domain(_))));
        assert!(matches!(wdr_exponent(1), Err(Error::Domain(_))));
        assert!(matches!(tau_exponent(2, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn table_threshold_uses_disjoint_boundary() {
        let e = tau_exponent(2, 0.2065).unwrap();
        assert_eq!(e.regime, Regime::Disjoint);
        assert!((e.q_star - 0.1033).abs() < 1e-4);
        assert!((e.value - 0.1380).abs() < 5e-4);
    }

    #[test]
    fn large_threshold_balances_exponents() {
        // for large tau the zero point of A(s+1, ., tau) exceeds tau/s
        let e = tau_exponent(2, 0.8).unwrap();
        assert_eq!(e.regime, Regime::Crossing);
        let a = union_exponent(2, e.q_star, 0.8).unwrap();
        let b = union_exponent(3, e.q_star, 0.8).unwrap();
        assert!((a - b).abs() <= 1e-8, "{a} {b}");
        let (lo1, lo2, hi) = q_range(2, 0.8);
        assert!(e.q_star > lo1.max(lo2) && e.q_star < hi);
    }

    #[test]
    fn crossing_is_never_worse_than_boundary() {
        for s in 2..=5 {
            for i in 1..40 {
                let tau = i as f64 / 40.0;
                let e = tau_exponent(s, tau).unwrap();
                let (zero_s1, disjoint, _) = q_range(s, tau);
                if disjoint > zero_s1 {
                    let boundary = union_exponent_closed(s + 1, disjoint, tau);
                    assert!(e.value >= boundary - 1e-12, "s={s} tau={tau}");
                }
            }
        }
    }

    #[test]
    fn gap_changes_sign_in_crossing_regime() {
        // at the lower end the heavy-s exponent dominates, at the upper end
        // it vanishes
        let (s, tau) = (3, 0.7);
        let (zero_s1, disjoint, upper) = q_range(s, tau);
        let lower = zero_s1.max(disjoint);
        assert!(zero_s1 > disjoint);
        assert!(union_exponent_closed(s, lower, tau) > union_exponent_closed(s + 1, lower, tau));
        assert!(union_exponent_closed(s, upper, tau).abs() < 1e-12);
    }
}
