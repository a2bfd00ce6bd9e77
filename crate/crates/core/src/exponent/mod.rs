//! Error exponents, in bits per test.
//!
//! The central quantity is the exponent `A(k, Q, q)` of the probability that
//! `k` independent columns of relative weight `Q` have a union of relative
//! weight `q`:
//!
//! ```text
//! A = (1-q) log(1-q) + q log(Q y^k / (1-y)) + kQ log((1-y)/y) + k h(Q),
//! q = Q (1 - y^k) / (1 - y),   0 < y < 1.
//! ```
//!
//! The weight rule's exponent [`wdr_exponent`], the COMP exponent
//! [`comp_exponent`] and the rates derived from them are built on it.

mod bound;
mod comp;
pub mod scalar;
mod wdr;

pub use bound::lower_bound_error;
pub use comp::{
    comp_capacity, comp_capacity_by_bisection, comp_exponent, comp_exponent_curve,
    wdr_crossover_rate, CompExponentResult,
};
pub use wdr::{tau_exponent, wdr_exponent, Regime, TauExponent, WdrExponentResult};

use crate::error::{input, Result};

const LN2: f64 = std::f64::consts::LN_2;

/// Binary entropy `h(Q)` in bits, with `0 log 0 = 0`.
pub fn entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return input(format!("entropy argument must lie in [0, 1], got {q}"));
    }
    Ok(entropy_nats(q) / LN2)
}

pub(crate) fn entropy_nats(q: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        return 0.0;
    }
    -q * q.ln() - (1.0 - q) * (-q).ln_1p()
}

pub(crate) fn entropy_bits(q: f64) -> f64 {
    entropy_nats(q) / LN2
}

/// `[x]+ = max(x, 0)`.
pub fn positive_part(x: f64) -> f64 {
    x.max(0.0)
}

fn check_region(k: usize, rel_weight: f64, rel_union: f64) -> Result<()> {
    if k == 0 {
        return input("k must be at least 1");
    }
    if !(rel_weight > 0.0 && rel_weight < 1.0) {
        return input(format!("Q must lie in (0, 1), got {rel_weight}"));
    }
    let top = (k as f64 * rel_weight).min(1.0);
    if !(rel_union > rel_weight && rel_union < top) {
        return input(format!(
            "q must lie in (Q, min(1, kQ)) = ({rel_weight}, {top}), got {rel_union}"
        ));
    }
    Ok(())
}

// Q (1 + y + ... + y^{k-1})
fn union_fraction(k: usize, rel_weight: f64, y: f64) -> f64 {
    let mut acc = 0.0;
    for _ in 0..k {
        acc = acc * y + 1.0;
    }
    rel_weight * acc
}

/// The unique `y` in `(0, 1)` with `q = Q (1 - y^k) / (1 - y)`.
///
/// `q(y)` increases from `Q` at `0+` to `kQ` at `1-`; bisection runs until
/// the bracket collapses in floating point (well below 1e-13).
pub fn solve_y(k: usize, rel_weight: f64, rel_union: f64) -> Result<f64> {
    check_region(k, rel_weight, rel_union)?;
    Ok(solve_y_unchecked(k, rel_weight, rel_union))
}

fn solve_y_unchecked(k: usize, rel_weight: f64, rel_union: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if union_fraction(k, rel_weight, mid) < rel_union {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `A(k, Q, q)` in bits, for `Q < q < min(1, kQ)`.
pub fn union_exponent(k: usize, rel_weight: f64, rel_union: f64) -> Result<f64> {
    Ok(ExponentQuery::new(k, rel_weight, rel_union)?.value)
}

/// `A(k, Q, q)` on the closed range `Q <= q <= min(1, kQ)`, with the
/// endpoints taken as limits. Returns NaN outside the range.
pub(crate) fn union_exponent_closed(k: usize, rel_weight: f64, rel_union: f64) -> f64 {
    let kq = k as f64 * rel_weight;
    // absorb the rounding of products such as s * (tau / s)
    let slack = 4.0 * f64::EPSILON * kq;
    if !(rel_weight > 0.0 && rel_weight < 1.0)
        || rel_union < rel_weight
        || rel_union > kq.min(1.0) + slack
    {
        return f64::NAN;
    }
    if rel_union == rel_weight {
        // all k columns coincide
        return (k - 1) as f64 * entropy_bits(rel_weight);
    }
    if rel_union >= kq - slack && kq <= 1.0 {
        // pairwise disjoint columns, y -> 1
        return exponent_terms(k, rel_weight, kq, 1.0);
    }
    let y = solve_y_unchecked(k, rel_weight, rel_union);
    exponent_terms(k, rel_weight, rel_union, y)
}

/// Regrouped so that each term stays bounded as `y -> 0` or `y -> 1`:
/// `(1-q) ln(1-q) + q ln Q + k(q-Q) ln y + (kQ-q) ln(1-y) + k h(Q)`.
fn exponent_terms(k: usize, rel_weight: f64, rel_union: f64, y: f64) -> f64 {
    let (q, w) = (rel_union, rel_weight);
    let kf = k as f64;
    let xlogx = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * b };
    let nats = xlogx(1.0 - q, (-q).ln_1p())
        + q * w.ln()
        + xlogx(kf * (q - w), y.ln())
        + xlogx(kf * w - q, (-y).ln_1p())
        + kf * entropy_nats(w);
    nats / LN2
}

/// A point `(k, Q, q)` of the admissible region together with its root `y`
/// and value `A(k, Q, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentQuery {
    pub k: usize,
    pub rel_weight: f64,
    pub rel_union: f64,
    pub y: f64,
    /// `A(k, Q, q)` in bits.
    pub value: f64,
}

impl ExponentQuery {
    pub fn new(k: usize, rel_weight: f64, rel_union: f64) -> Result<Self> {
        let y = solve_y(k, rel_weight, rel_union)?;
        Ok(Self {
            k,
            rel_weight,
            rel_union,
            y,
            value: exponent_terms(k, rel_weight, rel_union, y),
        })
    }

    /// `|q - Q (1 - y^k) / (1 - y)|`.
    pub fn residual(&self) -> f64 {
        (self.rel_union - union_fraction(self.k, self.rel_weight, self.y)).abs()
    }
}

/// The point `1 - (1 - Q)^k` at which `A(k, Q, .)` vanishes.
pub fn zero_point(k: usize, rel_weight: f64) -> f64 {
    -(k as f64 * (-rel_weight).ln_1p()).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(0.5).unwrap(), 1.0);
        assert_eq!(entropy(0.0).unwrap(), 0.0);
        assert_eq!(entropy(1.0).unwrap(), 0.0);
        assert!(entropy(1.5).is_err());
        assert!(entropy(-0.1).is_err());
        for q in [0.01, 0.1, 0.3, 0.45] {
            assert!((entropy(q).unwrap() - entropy(1.0 - q).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn positive_part_values() {
        assert_eq!(positive_part(-1.0), 0.0);
        assert_eq!(positive_part(0.0), 0.0);
        assert_eq!(positive_part(2.5), 2.5);
    }

    #[test]
    fn y_at_zero_point_is_one_minus_q() {
        for k in 2..=8 {
            for q in [0.01, 0.1, 0.3, 0.6] {
                let y = solve_y(k, q, zero_point(k, q)).unwrap();
                assert!((y - (1.0 - q)).abs() < 1e-12, "k={k} Q={q} y={y}");
            }
        }
    }

    #[test]
    fn y_closed_form_for_pairs() {
        for (q, u) in [(0.1, 0.15), (0.2, 0.39), (0.4, 0.41), (0.3, 0.599)] {
            let y = solve_y(2, q, u).unwrap();
            assert!((y - (u / q - 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn solve_y_rejects_outside_region() {
        assert!(solve_y(2, 0.2, 0.2).is_err());
        assert!(solve_y(2, 0.2, 0.4).is_err());
        assert!(solve_y(3, 0.5, 1.0).is_err());
        assert!(solve_y(1, 0.2, 0.3).is_err());
        assert!(solve_y(2, 0.0, 0.3).is_err());
    }

    #[test]
    fn table_point_value() {
        // at Q = 0.1033, q = 0.2065 the pair exponent is small while the
        // triple exponent carries the weight-rule value
        let a3 = union_exponent(3, 0.1033, 0.2065).unwrap();
        assert!((a3 - 0.1380).abs() < 5e-4, "{a3}");
        let a2 = union_exponent(2, 0.1033, 0.2065).unwrap();
        assert!(a2 > 0.0 && a2 < 0.02, "{a2}");
    }

    #[test]
    fn closed_endpoints_match_limits() {
        let (k, w) = (3, 0.2);
        let lo = union_exponent_closed(k, w, w);
        let near_lo = union_exponent(k, w, w + 1e-9).unwrap();
        assert!((lo - near_lo).abs() < 1e-6, "{lo} {near_lo}");
        let hi = union_exponent_closed(k, w, 0.6);
        let near_hi = union_exponent(k, w, 0.6 - 1e-10).unwrap();
        assert!((hi - near_hi).abs() < 1e-6, "{hi} {near_hi}");
        // q -> 1 with kQ > 1
        let one = union_exponent_closed(3, 0.5, 1.0);
        let near_one = union_exponent(3, 0.5, 1.0 - 1e-12).unwrap();
        assert!((one - near_one).abs() < 1e-8);
        assert!(union_exponent_closed(3, 0.2, 0.7).is_nan());
    }

    proptest! {
        #[test]
        fn defining_equation_residual(k in 2usize..9, w in 0.001f64..0.95, frac in 0.001f64..0.999) {
            let top = (k as f64 * w).min(1.0);
            let q = w + frac * (top - w);
            let e = ExponentQuery::new(k, w, q).unwrap();
            prop_assert!(e.residual() <= 1e-12, "residual {}", e.residual());
            prop_assert!(e.y > 0.0 && e.y < 1.0);
            prop_assert!(e.value >= -1e-12);
        }
    }
}
