//! Experiment protocols: the best-matrix search over the constant-weight
//! ensemble and the two result tables.
//!
//! A search samples `repeats` matrices for every candidate column weight,
//! scores every candidate threshold on each, and keeps the design with the
//! smallest maximal error. Repetition `r` at weight `w` draws its matrix from
//! the seed `derive_seed(master_seed, [w, r])`, so any single candidate can
//! be regenerated from its provenance alone, independently of thread count
//! and of which other candidates were searched.

mod config;
mod tables;

pub use config::{parse_config, SimulationConfig};
pub use tables::{
    parse_table1_csv, parse_table2_csv, table1, table1_row, table2, write_table1_csv,
    write_table2_csv, RunManifest, Table1Row, Table2Row,
};

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combin::binomial;
use crate::ensemble::{sample_matrix, EnsembleSpec};
use crate::error::{input, Error, Result};
use crate::evaluator::{ErrorPair, Evaluator, WeightHistograms, DEFAULT_CAP};
use crate::matrix::TestMatrix;
use crate::rng::derive_seed;
use crate::rule::{DecisionRule, RuleKind};

/// Default number of matrices sampled per candidate weight.
pub const DEFAULT_REPEATS: usize = 1000;

// last key of the Monte Carlo seed path, distinguishing it from the matrix seed
const MC_KEY: u64 = 0x6d63;

/// How candidate matrices are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo { trials: usize },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo { .. } => "mc",
        }
    }

    pub fn trials(&self) -> Option<usize> {
        match *self {
            Method::Exact => None,
            Method::MonteCarlo { trials } => Some(trials),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub s: usize,
    pub n_items: usize,
    pub n_tests: usize,
    pub rule: RuleKind,
    /// Candidate column weights, searched in this order.
    pub weights: Vec<usize>,
    /// Candidate thresholds `T` (weight rule only), searched in this order.
    pub thresholds: Vec<usize>,
    pub repeats: usize,
    pub master_seed: u64,
    pub method: Method,
    /// Enumeration budget for exact scoring.
    pub cap: u128,
}

impl SearchConfig {
    /// All weights `1..N` and, for the weight rule, all thresholds `0..=N`,
    /// with [`DEFAULT_REPEATS`] exact repetitions.
    pub fn new(s: usize, n_items: usize, n_tests: usize, rule: RuleKind, master_seed: u64) -> Self {
        let thresholds = match rule {
            RuleKind::Wdr => (0..=n_tests).collect(),
            RuleKind::Comp => Vec::new(),
        };
        Self {
            s,
            n_items,
            n_tests,
            rule,
            weights: default_weights(n_tests),
            thresholds,
            repeats: DEFAULT_REPEATS,
            master_seed,
            method: Method::Exact,
            cap: DEFAULT_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.s + 1 > self.n_items {
            return input(format!(
                "need 1 <= s < t, got s = {}, t = {}",
                self.s, self.n_items
            ));
        }
        if self.n_tests == 0 {
            return input("need N >= 1");
        }
        if self.repeats == 0 {
            return input("repeats must be at least 1");
        }
        if self.weights.is_empty() {
            return input("no candidate weights");
        }
        if let Some(&w) = self.weights.iter().find(|&&w| w == 0 || w > self.n_tests) {
            return input(format!(
                "candidate weight {w} outside [1, {}]",
                self.n_tests
            ));
        }
        if self.rule == RuleKind::Wdr && self.thresholds.is_empty() {
            return input("the weight rule needs at least one candidate threshold");
        }
        if let Method::MonteCarlo { trials: 0 } = self.method {
            return input("trials must be at least 1");
        }
        Ok(())
    }

    /// Seed of the matrix drawn at repetition `r` with column weight `w`.
    pub fn matrix_seed(&self, weight: usize, repetition: usize) -> u64 {
        derive_seed(self.master_seed, &[weight as u64, repetition as u64])
    }

    fn mc_seed(&self, weight: usize, repetition: usize) -> u64 {
        derive_seed(
            self.master_seed,
            &[weight as u64, repetition as u64, MC_KEY],
        )
    }

    fn evaluator(&self) -> Evaluator {
        Evaluator::with_cap(self.cap)
    }
}

pub(crate) fn default_weights(n_tests: usize) -> Vec<usize> {
    (1..n_tests.max(2)).collect()
}

/// Where the winning matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub weight: usize,
    pub repetition: usize,
    /// `derive_seed(master_seed, [weight, repetition])`.
    pub matrix_seed: u64,
}

/// A candidate that could not be evaluated, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub weight: usize,
    pub threshold: Option<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_matrix: TestMatrix,
    pub best_w: usize,
    /// The winning threshold, for the weight rule.
    pub best_threshold: Option<usize>,
    pub errors: ErrorPair,
    pub eps: f64,
    pub provenance: Provenance,
    pub method: Method,
    pub skipped: Vec<Skipped>,
}

/// Scores of one sampled matrix: one error pair per candidate threshold
/// (a single entry for COMP).
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateScores {
    pub matrix: TestMatrix,
    pub scores: Vec<(Option<usize>, ErrorPair)>,
}

/// Samples and scores the matrix of repetition `r` at weight `w`.
pub fn evaluate_candidate(
    config: &SearchConfig,
    weight: usize,
    repetition: usize,
) -> Result<CandidateScores> {
    let spec = EnsembleSpec::new(config.n_tests, config.n_items, weight)?;
    let matrix = sample_matrix(&spec, config.matrix_seed(weight, repetition));
    let thresholds: Vec<usize> = config
        .thresholds
        .iter()
        .copied()
        .filter(|&t| t <= config.n_tests)
        .collect();
    let scores = score(
        config,
        &matrix,
        &thresholds,
        config.mc_seed(weight, repetition),
    )?;
    Ok(CandidateScores { matrix, scores })
}

fn score(
    config: &SearchConfig,
    x: &TestMatrix,
    thresholds: &[usize],
    mc_seed: u64,
) -> Result<Vec<(Option<usize>, ErrorPair)>> {
    let ev = config.evaluator();
    let s = config.s;
    match config.rule {
        RuleKind::Wdr => {
            let hist: WeightHistograms = match config.method {
                Method::Exact => ev.weight_histograms(x, s)?,
                Method::MonteCarlo { trials } => ev.mc_weight_histograms(x, s, trials, mc_seed)?,
            };
            Ok(thresholds
                .iter()
                .map(|&t| (Some(t), hist.counts(t).errors()))
                .collect())
        }
        RuleKind::Comp => {
            let rule = DecisionRule::comp(s)?;
            let pair = match config.method {
                Method::Exact => ev.universal_error(x, &rule, s)?,
                Method::MonteCarlo { trials } => ev.mc_error(x, &rule, s, trials, mc_seed)?.point,
            };
            Ok(vec![(None, pair)])
        }
    }
}

// ordering key of a candidate: (eps, weight index, threshold index, repetition)
#[derive(Debug, Clone, Copy)]
struct Best {
    eps: f64,
    w_idx: usize,
    t_idx: usize,
    rep: usize,
    errors: ErrorPair,
}

impl Best {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.eps
            .total_cmp(&other.eps)
            .then(self.w_idx.cmp(&other.w_idx))
            .then(self.t_idx.cmp(&other.t_idx))
            .then(self.rep.cmp(&other.rep))
    }

    fn min(a: Self, b: Self) -> Self {
        if b.cmp_key(&a) == Ordering::Less {
            b
        } else {
            a
        }
    }
}

fn check_budget(config: &SearchConfig) -> Result<()> {
    if config.method == Method::Exact {
        let t = config.n_items;
        let needed = binomial(t, config.s).saturating_add(binomial(t, config.s + 1));
        if needed > config.cap {
            return Err(Error::Budget {
                needed,
                cap: config.cap,
            });
        }
    }
    Ok(())
}

/// Best design over all candidate weights, thresholds and repetitions.
///
/// Candidates that cannot be evaluated are skipped and listed in the
/// result; the search fails only if nothing is feasible. Ties are broken
/// by the earliest `(weight, threshold, repetition)` in candidate order, so
/// the result does not depend on the thread schedule.
pub fn best_matrix_search(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let mut skipped: Vec<Skipped> = config
        .thresholds
        .iter()
        .filter(|&&t| t > config.n_tests)
        .flat_map(|&t| {
            config.weights.iter().map(move |&w| Skipped {
                weight: w,
                threshold: Some(t),
                reason: format!("threshold {t} exceeds N = {}", config.n_tests),
            })
        })
        .collect();
    if let Err(e) = check_budget(config) {
        skipped.extend(config.weights.iter().map(|&w| Skipped {
            weight: w,
            threshold: None,
            reason: e.to_string(),
        }));
        return Err(no_candidates(config, &skipped));
    }

    let t_index: Vec<usize> = config
        .thresholds
        .iter()
        .enumerate()
        .filter(|(_, &t)| t <= config.n_tests)
        .map(|(i, _)| i)
        .collect();

    let mut best: Option<Best> = None;
    for (w_idx, &w) in config.weights.iter().enumerate() {
        let per_rep: Vec<Result<Best>> = (0..config.repeats)
            .into_par_iter()
            .map(|rep| {
                let cand = evaluate_candidate(config, w, rep)?;
                let local = cand
                    .scores
                    .iter()
                    .enumerate()
                    .map(|(j, &(_, errors))| Best {
                        eps: errors.eps(),
                        w_idx,
                        t_idx: if config.rule == RuleKind::Wdr {
                            t_index[j]
                        } else {
                            0
                        },
                        rep,
                        errors,
                    })
                    .reduce(Best::min);
                local.ok_or_else(|| Error::Input("no admissible threshold".into()))
            })
            .collect();
        match per_rep.into_iter().collect::<Result<Vec<Best>>>() {
            Ok(v) => {
                let here = v.into_iter().reduce(Best::min);
                best = match (best, here) {
                    (Some(a), Some(b)) => Some(Best::min(a, b)),
                    (a, b) => a.or(b),
                };
            }
            Err(e) => skipped.push(Skipped {
                weight: w,
                threshold: None,
                reason: e.to_string(),
            }),
        }
    }

    let best = best.ok_or_else(|| no_candidates(config, &skipped))?;
    let weight = config.weights[best.w_idx];
    let threshold = (config.rule == RuleKind::Wdr).then(|| config.thresholds[best.t_idx]);
    let spec = EnsembleSpec::new(config.n_tests, config.n_items, weight)?;
    let matrix_seed = config.matrix_seed(weight, best.rep);
    Ok(SearchResult {
        best_matrix: sample_matrix(&spec, matrix_seed),
        best_w: weight,
        best_threshold: threshold,
        errors: best.errors,
        eps: best.eps,
        provenance: Provenance {
            master_seed: config.master_seed,
            weight,
            repetition: best.rep,
            matrix_seed,
        },
        method: config.method,
        skipped,
    })
}

fn no_candidates(config: &SearchConfig, skipped: &[Skipped]) -> Error {
    let reasons: Vec<String> = skipped
        .iter()
        .take(3)
        .map(|s| format!("w = {}: {}", s.weight, s.reason))
        .collect();
    Error::Input(format!(
        "no feasible candidate for s = {}, t = {}, N = {} ({})",
        config.s,
        config.n_items,
        config.n_tests,
        reasons.join("; ")
    ))
}
