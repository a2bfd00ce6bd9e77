//! Decision rules for `H0: |S| <= s` against `H1: |S| >= s + 1`, and the
//! size distribution of the random defective set.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::matrix::{covered_columns, ResponseVector, TestMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    /// At most `s` defectives.
    H0,
    /// At least `s + 1` defectives.
    H1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecisionRule {
    /// Accept `H0` iff the response covers at most `s` columns.
    Comp { s: usize },
    /// Accept `H0` iff the response has at most `threshold` positive tests.
    Wdr { threshold: usize },
}

impl DecisionRule {
    pub fn comp(s: usize) -> Result<Self> {
        if s == 0 {
            return input("COMP parameter s must be at least 1");
        }
        Ok(Self::Comp { s })
    }

    pub fn wdr(threshold: usize) -> Self {
        Self::Wdr { threshold }
    }

    /// Checks the rule against a design with `n_tests` rows.
    pub fn validate(&self, n_tests: usize) -> Result<()> {
        match *self {
            Self::Comp { s: 0 } => input("COMP parameter s must be at least 1"),
            Self::Wdr { threshold } if threshold > n_tests => input(format!(
                "threshold T = {threshold} exceeds the number of tests {n_tests}"
            )),
            _ => Ok(()),
        }
    }

    pub fn kind(&self) -> RuleKind {
        match self {
            Self::Comp { .. } => RuleKind::Comp,
            Self::Wdr { .. } => RuleKind::Wdr,
        }
    }

    /// Decision for a packed response of known weight.
    pub(crate) fn decide_words(&self, x: &TestMatrix, y: &[u64], weight: usize) -> Hypothesis {
        match *self {
            Self::Wdr { threshold } => {
                if weight <= threshold {
                    Hypothesis::H0
                } else {
                    Hypothesis::H1
                }
            }
            Self::Comp { s } => {
                if x.count_covered(y, s + 1) <= s {
                    Hypothesis::H0
                } else {
                    Hypothesis::H1
                }
            }
        }
    }
}

impl fmt::Display for DecisionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Comp { s } => write!(f, "COMP(s={s})"),
            Self::Wdr { threshold } => write!(f, "WDR(T={threshold})"),
        }
    }
}

/// Rule family without its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleKind {
    #[serde(rename = "wdr")]
    Wdr,
    #[serde(rename = "comp")]
    Comp,
}

impl RuleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Wdr => "wdr",
            Self::Comp => "comp",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RuleKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wdr" => Ok(Self::Wdr),
            "comp" => Ok(Self::Comp),
            other => input(format!("unknown rule {other:?}, expected wdr or comp")),
        }
    }
}

/// Applies `rule` to the response `y`. WDR ignores the matrix.
pub fn decide(rule: &DecisionRule, x: &TestMatrix, y: &ResponseVector) -> Result<Hypothesis> {
    match *rule {
        DecisionRule::Wdr { .. } => Ok(rule.decide_words(x, y.words(), y.weight())),
        DecisionRule::Comp { s } => {
            if s == 0 {
                return input("COMP parameter s must be at least 1");
            }
            let covered = covered_columns(x, y)?;
            Ok(if covered.len() <= s {
                Hypothesis::H0
            } else {
                Hypothesis::H1
            })
        }
    }
}

/// Distribution `(p_0, ..., p_t)` of the defective-set size; sets of equal
/// size are equiprobable.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeDistribution {
    probs: Vec<f64>,
}

impl SizeDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return input("empty size distribution");
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return input("size probabilities must be finite and nonnegative");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return input(format!("size probabilities sum to {total}, not 1"));
        }
        Ok(Self { probs })
    }

    /// The worst-case distribution `p_s = p_{s+1} = 1/2` over `0..=t`.
    pub fn worst_case(s: usize, t: usize) -> Result<Self> {
        if s + 1 > t {
            return input(format!("need s + 1 <= t, got s = {s}, t = {t}"));
        }
        let mut probs = vec![0.0; t + 1];
        probs[s] = 0.5;
        probs[s + 1] = 0.5;
        Self::new(probs)
    }

    /// `p_k`, zero beyond the stored support.
    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_size(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}
