//! Nonadaptive group testing as a hypothesis test on the number of
//! defectives.
//!
//! Given an `N x t` binary test design and the outcome of its pooled tests,
//! decide between `H0: |S| <= s` and `H1: |S| > s`. The crate provides
//!
//! - test designs, defective sets and responses ([`matrix`]);
//! - the COMP and weight-threshold decision rules ([`rule`]);
//! - exact and Monte Carlo error probabilities of a rule on a design
//!   ([`evaluator`]) and disjunctive-code verification ([`disjunct`]);
//! - the constant-column-weight random ensemble with its exact union-weight
//!   law ([`ensemble`]);
//! - error exponents and the converse bound ([`exponent`]);
//! - the best-design search and result tables ([`harness`]).
//!
//! ```
//! use grouptest::{Evaluator, TestMatrix};
//!
//! let x = TestMatrix::identity(5).unwrap();
//! let e = Evaluator::default().universal_error_wdr(&x, 2, 2).unwrap();
//! assert_eq!(e.eps(), 0.0);
//! ```

mod combin;
pub mod disjunct;
pub mod ensemble;
mod error;
pub mod evaluator;
pub mod exponent;
pub mod harness;
pub mod matrix;
pub mod rng;
pub mod rule;

pub use combin::binomial;
pub use disjunct::{find_violation, is_disjunctive_code, Witness};
pub use ensemble::{sample_matrix, union_weight_pmf, EnsembleSpec, UnionWeightPmf};
pub use error::{Error, Result};
pub use evaluator::{ErrorPair, Evaluator, ExactCounts, McEstimate, WeightHistograms};
pub use matrix::{covered_columns, covers, response, DefectiveSet, ResponseVector, TestMatrix};
pub use rule::{decide, DecisionRule, Hypothesis, RuleKind, SizeDistribution};
