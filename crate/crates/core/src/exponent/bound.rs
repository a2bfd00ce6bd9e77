use crate::error::{input, Result};

/// Lower bound on the maximal error of any rule on any `N x t` design at the
/// worst-case size law `p_s, p_{s+1} > 0`:
/// `(2^{-N/s} t - s) / (2 (t - s))`, clamped at 0.
pub fn lower_bound_error(n_tests: usize, n_items: usize, s: usize) -> Result<f64> {
    if s == 0 || n_tests == 0 {
        return input("need N >= 1 and s >= 1");
    }
    if n_items <= s {
        return input(format!("need t > s, got t = {n_items}, s = {s}"));
    }
    let scale = (-(n_tests as f64) / s as f64).exp2();
    let v = (scale * n_items as f64 - s as f64) / (2.0 * (n_items - s) as f64);
    Ok(v.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn vanishes_at_critical_size() {
        // t = s 2^{N/s}
        assert_eq!(lower_bound_error(4, 8, 2).unwrap(), 0.0);
        assert_eq!(lower_bound_error(6, 12, 3).unwrap(), 0.0);
        assert_eq!(lower_bound_error(10, 64, 2).unwrap(), 0.0);
        // and stays clamped below it
        assert_eq!(lower_bound_error(10, 20, 2).unwrap(), 0.0);
        assert!(lower_bound_error(6, 13, 3).unwrap() > 0.0);
    }

    #[test]
    fn exact_rational_value() {
        // N = 10, s = 2: 2^{-5} is exact, so the bound is the rational
        // (1000/32 - 2) / (2 * 998)
        let exact =
            (Ratio::new(1000i64, 32) - Ratio::from_integer(2)) / Ratio::from_integer(2 * 998);
        let expect = *exact.numer() as f64 / *exact.denom() as f64;
        let got = lower_bound_error(10, 1000, 2).unwrap();
        assert!((got - expect).abs() < 1e-15);
        assert!((got - 0.014_654_3).abs() < 1e-7);
    }

    #[test]
    fn small_table_size() {
        let b = lower_bound_error(5, 15, 2).unwrap();
        assert!((b - 0.025_06).abs() < 1e-4, "{b}");
        assert!(b < 0.2571);
    }

    #[test]
    fn rejects_small_t() {
        assert!(lower_bound_error(5, 2, 2).is_err());
        assert!(lower_bound_error(5, 10, 0).is_err());
    }
}
