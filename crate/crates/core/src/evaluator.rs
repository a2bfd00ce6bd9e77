//! Exact and Monte Carlo error probabilities of decision rules.
//!
//! For the defective-set law where all sets of one size are equiprobable,
//! the error of a rule at size `k` is the fraction of `k`-subsets it
//! misclassifies. Both threshold sizes `s` and `s + 1` are evaluated by full
//! colex enumeration (exact) or by uniform subset sampling (Monte Carlo).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combin::{binomial, sample_subset, walk_colex};
use crate::error::{input, Error, Result};
use crate::matrix::TestMatrix;
use crate::rng;
use crate::rule::{DecisionRule, Hypothesis, SizeDistribution};

/// Default budget for exact enumeration, in subset evaluations.
pub const DEFAULT_CAP: u128 = 100_000_000;

// below this many subsets the enumeration runs on the calling thread
const PAR_MIN_SUBSETS: u128 = 20_000;

const MC_BLOCK: usize = 1024;

/// The two conditional error probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorPair {
    /// `Pr{accept H1 | H0}`.
    pub err_h0: f64,
    /// `Pr{accept H0 | H1}`.
    pub err_h1: f64,
}

impl ErrorPair {
    /// The maximal error probability.
    pub fn eps(&self) -> f64 {
        self.err_h0.max(self.err_h1)
    }
}

/// Misclassified-subset counts of a weight threshold at sizes `s`, `s + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactCounts {
    /// `s`-subsets with response weight `> T`.
    pub b1_s: u128,
    /// `(s+1)`-subsets with response weight `<= T`.
    pub b2_s1: u128,
    pub denom_s: u128,
    pub denom_s1: u128,
}

impl ExactCounts {
    pub fn errors(&self) -> ErrorPair {
        ErrorPair {
            err_h0: self.b1_s as f64 / self.denom_s as f64,
            err_h1: self.b2_s1 as f64 / self.denom_s1 as f64,
        }
    }
}

/// Response-weight histograms of all (or sampled) subsets of sizes `s` and
/// `s + 1`. Any weight threshold can be scored from these in `O(N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightHistograms {
    pub s: usize,
    /// `at_s[w]`: number of `s`-subsets with response weight `w`.
    pub at_s: Vec<u128>,
    pub at_s1: Vec<u128>,
}

impl WeightHistograms {
    pub fn counts(&self, threshold: usize) -> ExactCounts {
        let cut = (threshold + 1).min(self.at_s.len());
        ExactCounts {
            b1_s: self.at_s[cut..].iter().sum(),
            b2_s1: self.at_s1[..cut].iter().sum(),
            denom_s: self.at_s.iter().sum(),
            denom_s1: self.at_s1.iter().sum(),
        }
    }
}

/// Monte Carlo estimate with normal-approximation 95% half-widths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub point: ErrorPair,
    pub half_width: ErrorPair,
    /// Samples drawn per hypothesis.
    pub trials: usize,
}

impl McEstimate {
    fn from_counts(miss_h0: u64, miss_h1: u64, trials: usize) -> Self {
        let n = trials as f64;
        let (p0, p1) = (miss_h0 as f64 / n, miss_h1 as f64 / n);
        let hw = |p: f64| 1.96 * (p * (1.0 - p) / n).sqrt();
        Self {
            point: ErrorPair {
                err_h0: p0,
                err_h1: p1,
            },
            half_width: ErrorPair {
                err_h0: hw(p0),
                err_h1: hw(p1),
            },
            trials,
        }
    }
}

/// Enumeration settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluator {
    /// Maximum number of subsets an exact evaluation may visit.
    pub cap: u128,
}

impl Default for Evaluator {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP }
    }
}

fn check_sizes(x: &TestMatrix, s: usize) -> Result<()> {
    if s == 0 || s + 1 > x.n_items() {
        return input(format!(
            "need 1 <= s and s + 1 <= t, got s = {s}, t = {}",
            x.n_items()
        ));
    }
    Ok(())
}

/// Folds over all `k`-subsets, splitting on the largest member when the
/// enumeration is large. Partial results are merged in index order.
fn fold_subsets<T, F, M>(
    x: &TestMatrix,
    k: usize,
    init: impl Fn() -> T + Sync,
    visit: F,
    merge: M,
) -> T
where
    T: Send,
    F: Fn(&mut T, &[usize], &[u64]) + Sync,
    M: Fn(T, T) -> T + Sync,
{
    let t = x.n_items();
    let words = x.words();
    let run = |top: std::ops::Range<usize>| {
        let mut acc = init();
        walk_colex(
            t,
            k,
            words,
            top,
            |j| x.column_words(j),
            |m, y| visit(&mut acc, m, y),
        );
        acc
    };
    if k == 0 || binomial(t, k) < PAR_MIN_SUBSETS {
        return run(0..t);
    }
    (k - 1..t)
        .into_par_iter()
        .map(|top| run(top..top + 1))
        .reduce(&init, &merge)
}

fn popcount(y: &[u64]) -> usize {
    y.iter().map(|w| w.count_ones() as usize).sum()
}

fn add_hist(mut a: Vec<u128>, b: Vec<u128>) -> Vec<u128> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

impl Evaluator {
    pub fn with_cap(cap: u128) -> Self {
        Self { cap }
    }

    fn budget(&self, t: usize, sizes: &[usize]) -> Result<()> {
        let needed = sizes
            .iter()
            .fold(0u128, |acc, &k| acc.saturating_add(binomial(t, k)));
        if needed > self.cap {
            return Err(Error::Budget {
                needed,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Histogram of response weights over all `k`-subsets.
    pub fn weight_histogram(&self, x: &TestMatrix, k: usize) -> Result<Vec<u128>> {
        if k > x.n_items() {
            return input(format!("subset size {k} exceeds t = {}", x.n_items()));
        }
        self.budget(x.n_items(), &[k])?;
        let n = x.n_tests();
        Ok(fold_subsets(
            x,
            k,
            || vec![0u128; n + 1],
            |h, _, y| h[popcount(y)] += 1,
            add_hist,
        ))
    }

    /// Exhaustive weight histograms at sizes `s` and `s + 1`.
    pub fn weight_histograms(&self, x: &TestMatrix, s: usize) -> Result<WeightHistograms> {
        check_sizes(x, s)?;
        self.budget(x.n_items(), &[s, s + 1])?;
        Ok(WeightHistograms {
            s,
            at_s: self.weight_histogram(x, s)?,
            at_s1: self.weight_histogram(x, s + 1)?,
        })
    }

    /// The counts `|B¹_s(T, X)|` and `|B²_{s+1}(T, X)|`.
    pub fn exact_wdr_counts(
        &self,
        x: &TestMatrix,
        s: usize,
        threshold: usize,
    ) -> Result<ExactCounts> {
        DecisionRule::wdr(threshold).validate(x.n_tests())?;
        Ok(self.weight_histograms(x, s)?.counts(threshold))
    }

    /// Universal error pair of the weight rule with threshold `T`; the
    /// universal error itself is `eps()` of the result.
    pub fn universal_error_wdr(
        &self,
        x: &TestMatrix,
        s: usize,
        threshold: usize,
    ) -> Result<ErrorPair> {
        Ok(self.exact_wdr_counts(x, s, threshold)?.errors())
    }

    /// Number of `k`-subsets for which COMP(`s`) accepts `H0`.
    fn comp_h0_count(&self, x: &TestMatrix, s: usize, k: usize) -> u128 {
        fold_subsets(
            x,
            k,
            || 0u128,
            |c, _, y| {
                if x.count_covered(y, s + 1) <= s {
                    *c += 1;
                }
            },
            |a, b| a + b,
        )
    }

    /// Exact conditional errors of COMP(`s`) at sizes `s` and `s + 1`.
    pub fn exact_comp_error(&self, x: &TestMatrix, s: usize) -> Result<ErrorPair> {
        check_sizes(x, s)?;
        self.budget(x.n_items(), &[s, s + 1])?;
        let t = x.n_items();
        let (d0, d1) = (binomial(t, s), binomial(t, s + 1));
        let h0_at_s = self.comp_h0_count(x, s, s);
        let h0_at_s1 = self.comp_h0_count(x, s, s + 1);
        Ok(ErrorPair {
            err_h0: (d0 - h0_at_s) as f64 / d0 as f64,
            err_h1: h0_at_s1 as f64 / d1 as f64,
        })
    }

    /// Universal error pair of any rule: the errors at `p_s = p_{s+1} = 1/2`.
    pub fn universal_error(
        &self,
        x: &TestMatrix,
        rule: &DecisionRule,
        s: usize,
    ) -> Result<ErrorPair> {
        rule.validate(x.n_tests())?;
        match *rule {
            DecisionRule::Wdr { threshold } => self.universal_error_wdr(x, s, threshold),
            DecisionRule::Comp { s: param } => {
                check_sizes(x, s)?;
                self.budget(x.n_items(), &[s, s + 1])?;
                let t = x.n_items();
                let (d0, d1) = (binomial(t, s), binomial(t, s + 1));
                Ok(ErrorPair {
                    err_h0: (d0 - self.comp_h0_count(x, param, s)) as f64 / d0 as f64,
                    err_h1: self.comp_h0_count(x, param, s + 1) as f64 / d1 as f64,
                })
            }
        }
    }

    /// Fraction of `k`-subsets on which `rule` accepts `H0`.
    fn accept_h0_fraction(&self, x: &TestMatrix, rule: &DecisionRule, k: usize) -> f64 {
        let total = binomial(x.n_items(), k);
        let accepted = match *rule {
            DecisionRule::Wdr { threshold } => {
                let n = x.n_tests();
                let h = fold_subsets(
                    x,
                    k,
                    || vec![0u128; n + 1],
                    |h, _, y| h[popcount(y)] += 1,
                    add_hist,
                );
                h[..=threshold.min(n)].iter().sum::<u128>()
            }
            DecisionRule::Comp { s } => self.comp_h0_count(x, s, k),
        };
        accepted as f64 / total as f64
    }

    /// Conditional errors under the size distribution `p`, as
    /// `p`-weighted mixtures of the per-size error fractions. A hypothesis
    /// with zero prior mass contributes error 0.
    pub fn general_error(
        &self,
        x: &TestMatrix,
        rule: &DecisionRule,
        p: &SizeDistribution,
        s: usize,
    ) -> Result<ErrorPair> {
        rule.validate(x.n_tests())?;
        let t = x.n_items();
        if p.max_size() > t {
            let spill: f64 = p.probs()[t + 1..].iter().sum();
            if spill > 0.0 {
                return input(format!(
                    "size distribution puts mass on sizes above t = {t}"
                ));
            }
        }
        let support: Vec<usize> = (0..=p.max_size().min(t))
            .filter(|&k| p.prob(k) > 0.0)
            .collect();
        self.budget(t, &support)?;
        let (mut mass0, mut err0, mut mass1, mut err1) = (0.0, 0.0, 0.0, 0.0);
        for &k in &support {
            let pk = p.prob(k);
            let h0 = self.accept_h0_fraction(x, rule, k);
            if k <= s {
                mass0 += pk;
                err0 += pk * (1.0 - h0);
            } else {
                mass1 += pk;
                err1 += pk * h0;
            }
        }
        Ok(ErrorPair {
            err_h0: if mass0 > 0.0 { err0 / mass0 } else { 0.0 },
            err_h1: if mass1 > 0.0 { err1 / mass1 } else { 0.0 },
        })
    }

    /// Monte Carlo estimate from `trials` uniform `s`-subsets and `trials`
    /// uniform `(s+1)`-subsets. Deterministic in its inputs and `seed`.
    pub fn mc_error(
        &self,
        x: &TestMatrix,
        rule: &DecisionRule,
        s: usize,
        trials: usize,
        seed: u64,
    ) -> Result<McEstimate> {
        rule.validate(x.n_tests())?;
        check_sizes(x, s)?;
        if trials == 0 {
            return input("trials must be at least 1");
        }
        let miss = |h: usize| -> u64 {
            let k = s + h;
            mc_blocks(trials)
                .into_par_iter()
                .map(|(b, len)| {
                    let mut r = rng::stream(seed, &[h as u64, b as u64]);
                    let mut pool: Vec<usize> = (0..x.n_items()).collect();
                    let mut y = vec![0u64; x.words()];
                    let mut miss = 0u64;
                    for _ in 0..len {
                        let w = sampled_response(x, &mut pool, k, &mut r, &mut y);
                        let got = rule.decide_words(x, &y, w);
                        let wrong = if h == 0 {
                            Hypothesis::H1
                        } else {
                            Hypothesis::H0
                        };
                        if got == wrong {
                            miss += 1;
                        }
                    }
                    miss
                })
                .sum()
        };
        Ok(McEstimate::from_counts(miss(0), miss(1), trials))
    }

    /// Weight histograms of the subsets `mc_error` would draw with the same
    /// `seed`; scoring these at threshold `T` reproduces `mc_error` for
    /// WDR(`T`).
    pub fn mc_weight_histograms(
        &self,
        x: &TestMatrix,
        s: usize,
        trials: usize,
        seed: u64,
    ) -> Result<WeightHistograms> {
        check_sizes(x, s)?;
        if trials == 0 {
            return input("trials must be at least 1");
        }
        let n = x.n_tests();
        let hist = |h: usize| -> Vec<u128> {
            mc_blocks(trials)
                .into_par_iter()
                .map(|(b, len)| {
                    let mut r = rng::stream(seed, &[h as u64, b as u64]);
                    let mut pool: Vec<usize> = (0..x.n_items()).collect();
                    let mut y = vec![0u64; x.words()];
                    let mut hist = vec![0u128; n + 1];
                    for _ in 0..len {
                        hist[sampled_response(x, &mut pool, s + h, &mut r, &mut y)] += 1;
                    }
                    hist
                })
                .reduce(|| vec![0u128; n + 1], add_hist)
        };
        Ok(WeightHistograms {
            s,
            at_s: hist(0),
            at_s1: hist(1),
        })
    }
}

fn mc_blocks(trials: usize) -> Vec<(usize, usize)> {
    (0..trials.div_ceil(MC_BLOCK))
        .map(|b| (b, MC_BLOCK.min(trials - b * MC_BLOCK)))
        .collect()
}

fn sampled_response<R: rand::Rng>(
    x: &TestMatrix,
    pool: &mut [usize],
    k: usize,
    r: &mut R,
    y: &mut [u64],
) -> usize {
    y.fill(0);
    for &j in sample_subset(pool, k, r) {
        for (a, c) in y.iter_mut().zip(x.column_words(j)) {
            *a |= c;
        }
    }
    popcount(y)
}
