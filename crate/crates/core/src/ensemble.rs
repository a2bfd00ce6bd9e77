//! The constant-column-weight ensemble and the exact distribution of the
//! weight of a union of its columns.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::combin::sample_subset;
use crate::error::{input, Result};
use crate::matrix::TestMatrix;
use crate::rng;

/// Random `N x t` matrices whose columns are independent and uniform among
/// the `C(N, w)` columns of weight `w = column_weight`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    n_tests: usize,
    n_items: usize,
    column_weight: usize,
}

impl EnsembleSpec {
    pub fn new(n_tests: usize, n_items: usize, column_weight: usize) -> Result<Self> {
        if n_tests == 0 || n_items == 0 {
            return input(format!(
                "ensemble dimensions must be positive, got {n_tests}x{n_items}"
            ));
        }
        if column_weight == 0 || column_weight > n_tests {
            return input(format!(
                "column weight must lie in 1..={n_tests}, got {column_weight}"
            ));
        }
        Ok(Self {
            n_tests,
            n_items,
            column_weight,
        })
    }

    /// The ensemble with column weight `max(1, floor(Q N))`.
    pub fn from_relative_weight(n_tests: usize, n_items: usize, q: f64) -> Result<Self> {
        Self::new(n_tests, n_items, weight_from_q(n_tests, q)?)
    }

    pub fn n_tests(&self) -> usize {
        self.n_tests
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn column_weight(&self) -> usize {
        self.column_weight
    }
}

/// Integer column weight for relative weight `q`: `max(1, floor(q n))`.
///
/// The product is nudged by 1e-9 before flooring so that values such as
/// `0.29 * 100` land on the intended integer.
pub fn weight_from_q(n: usize, q: f64) -> Result<usize> {
    if n == 0 {
        return input("number of tests must be positive");
    }
    if !(q > 0.0 && q < 1.0) {
        return input(format!("relative weight must lie in (0, 1), got {q}"));
    }
    let w = (q * n as f64 + 1e-9).floor() as usize;
    Ok(w.clamp(1, n))
}

/// Draws a matrix from the ensemble. Column `j` uses its own stream keyed by
/// `(seed, j)`; the same `(spec, seed)` always yields the same matrix.
pub fn sample_matrix(spec: &EnsembleSpec, seed: u64) -> TestMatrix {
    let mut x = TestMatrix::zeros(spec.n_tests, spec.n_items).expect("validated spec");
    let mut pool: Vec<usize> = (0..spec.n_tests).collect();
    for j in 0..spec.n_items {
        let mut r = rng::stream(seed, &[j as u64]);
        let rows = sample_subset(&mut pool, spec.column_weight, &mut r);
        let col = x.column_words_mut(j);
        for &i in rows {
            col[i / 64] |= 1 << (i % 64);
        }
    }
    x
}

/// Exact distribution of the weight of the OR of `k` independent uniform
/// weight-`w̄` columns of length `N`.
///
/// Stored as big-integer numerators over the common denominator
/// `C(N, w̄)^k`, so sums and comparisons against brute force are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionWeightPmf {
    n_tests: usize,
    k: usize,
    column_weight: usize,
    // numerators[w - column_weight]
    numerators: Vec<BigUint>,
    denominator: BigUint,
}

fn big_binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Computes the union-weight distribution by inclusion–exclusion:
/// the number of ordered `k`-tuples of `w̄`-subsets of a fixed `w`-set whose
/// union is the whole set is `sum_i (-1)^i C(w, i) C(w - i, w̄)^k`.
pub fn union_weight_pmf(n_tests: usize, k: usize, column_weight: usize) -> Result<UnionWeightPmf> {
    if k == 0 {
        return input("number of columns k must be at least 1");
    }
    if column_weight == 0 || column_weight > n_tests {
        return input(format!(
            "column weight must lie in 1..={n_tests}, got {column_weight}"
        ));
    }
    let k32 = u32::try_from(k).map_err(|_| crate::Error::Input("k too large".into()))?;
    let top = n_tests.min(k.saturating_mul(column_weight));
    let mut numerators = Vec::with_capacity(top - column_weight + 1);
    for w in column_weight..=top {
        let mut onto = BigInt::zero();
        for i in 0..=(w - column_weight) {
            let term =
                BigInt::from(big_binomial(w, i) * big_binomial(w - i, column_weight).pow(k32));
            if i % 2 == 0 {
                onto += term;
            } else {
                onto -= term;
            }
        }
        let onto = onto
            .to_biguint()
            .expect("inclusion-exclusion count is nonnegative");
        numerators.push(big_binomial(n_tests, w) * onto);
    }
    Ok(UnionWeightPmf {
        n_tests,
        k,
        column_weight,
        numerators,
        denominator: big_binomial(n_tests, column_weight).pow(k32),
    })
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits") as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("fits");
    (top as f64).log2() + shift as f64
}

impl UnionWeightPmf {
    pub fn n_tests(&self) -> usize {
        self.n_tests
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn column_weight(&self) -> usize {
        self.column_weight
    }

    /// Weights with (possibly) nonzero mass: `w̄ ..= min(N, k w̄)`.
    pub fn support(&self) -> std::ops::RangeInclusive<usize> {
        self.column_weight..=self.column_weight + self.numerators.len() - 1
    }

    pub fn numerator(&self, w: usize) -> BigUint {
        if self.support().contains(&w) {
            self.numerators[w - self.column_weight].clone()
        } else {
            BigUint::zero()
        }
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    /// `Pr{weight = w}` as an exact rational.
    pub fn exact(&self, w: usize) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerator(w)),
            BigInt::from(self.denominator.clone()),
        )
    }

    pub fn prob(&self, w: usize) -> f64 {
        if !self.support().contains(&w) {
            return 0.0;
        }
        (self.log2_prob(w)).exp2()
    }

    /// `log2 Pr{weight = w}`, `-inf` off the support.
    pub fn log2_prob(&self, w: usize) -> f64 {
        let num = self.numerator(w);
        if num.is_zero() {
            return f64::NEG_INFINITY;
        }
        log2_big(&num) - log2_big(&self.denominator)
    }

    /// Whether the numerators add up to the denominator exactly.
    pub fn sums_to_one(&self) -> bool {
        let total: BigUint = self.numerators.iter().sum();
        total == self.denominator
    }
}

/// `-log2 P / N` with `P` the probability that `k` columns of weight
/// `max(1, floor(Q N))` have union weight exactly `floor(q N)`.
pub fn finite_union_rate(n_tests: usize, k: usize, rel_weight: f64, rel_union: f64) -> Result<f64> {
    let wbar = weight_from_q(n_tests, rel_weight)?;
    if !(rel_union > 0.0 && rel_union < 1.0) {
        return input(format!(
            "relative union weight must lie in (0, 1), got {rel_union}"
        ));
    }
    let w = (rel_union * n_tests as f64 + 1e-9).floor() as usize;
    let pmf = union_weight_pmf(n_tests, k, wbar)?;
    Ok(-pmf.log2_prob(w) / n_tests as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_from_q_examples() {
        assert_eq!(weight_from_q(10, 0.25).unwrap(), 2);
        assert_eq!(weight_from_q(10, 0.05).unwrap(), 1);
        assert_eq!(weight_from_q(14, 0.1033).unwrap(), 1);
        assert_eq!(weight_from_q(100, 0.29).unwrap(), 29);
        assert!(weight_from_q(10, 0.0).is_err());
        assert!(weight_from_q(10, 1.0).is_err());
        assert!(weight_from_q(10, f64::NAN).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(EnsembleSpec::new(4, 3, 0).is_err());
        assert!(EnsembleSpec::new(4, 3, 5).is_err());
        assert!(EnsembleSpec::new(0, 3, 1).is_err());
        assert_eq!(
            EnsembleSpec::from_relative_weight(10, 3, 0.25)
                .unwrap()
                .column_weight(),
            2
        );
    }

    #[test]
    fn full_weight_columns_are_all_ones() {
        let spec = EnsembleSpec::new(3, 5, 3).unwrap();
        for seed in [0, 1, 99] {
            let x = sample_matrix(&spec, seed);
            assert_eq!(x, TestMatrix::from_fn(3, 5, |_, _| true).unwrap());
        }
    }

    #[test]
    fn columns_have_requested_weight_and_are_deterministic() {
        let spec = EnsembleSpec::new(10, 15, 2).unwrap();
        let a = sample_matrix(&spec, 42);
        assert_eq!(a.to_text(), sample_matrix(&spec, 42).to_text());
        assert_ne!(a, sample_matrix(&spec, 43));
        assert!((0..15).all(|j| a.column_weight(j) == 2));
        let wide = sample_matrix(&EnsembleSpec::new(150, 4, 70).unwrap(), 5);
        assert!((0..4).all(|j| wide.column_weight(j) == 70));
    }

    #[test]
    fn two_row_column_is_fair() {
        let spec = EnsembleSpec::new(2, 1, 1).unwrap();
        let n = 20_000;
        let top = (0..n)
            .filter(|&seed| sample_matrix(&spec, seed).get(0, 0))
            .count();
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((top as f64 - n as f64 / 2.0).abs() < 3.0 * sigma, "{top}");
    }

    #[test]
    fn pmf_single_column() {
        let pmf = union_weight_pmf(9, 1, 4).unwrap();
        assert_eq!(pmf.support(), 4..=4);
        assert_eq!(pmf.prob(4), 1.0);
        assert!(pmf.sums_to_one());
    }

    #[test]
    fn pmf_two_of_two() {
        let pmf = union_weight_pmf(2, 2, 1).unwrap();
        assert_eq!(pmf.prob(1), 0.5);
        assert_eq!(pmf.prob(2), 0.5);
        assert_eq!(pmf.prob(0), 0.0);
    }

    #[test]
    fn pmf_rejects_bad_parameters() {
        assert!(union_weight_pmf(5, 0, 2).is_err());
        assert!(union_weight_pmf(5, 2, 0).is_err());
        assert!(union_weight_pmf(5, 2, 6).is_err());
    }

    #[test]
    fn log2_of_huge_probabilities() {
        let pmf = union_weight_pmf(400, 3, 80).unwrap();
        assert!(pmf.sums_to_one());
        let total: f64 = pmf.support().map(|w| pmf.prob(w)).sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(pmf.log2_prob(240).is_finite());
    }
}
