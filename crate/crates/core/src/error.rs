use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),

    /// The matrix text format could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A combinatorial enumeration would exceed the configured budget.
    #[error("enumeration budget exceeded: {needed} evaluations requested, cap is {cap}; use Monte Carlo instead")]
    Budget { needed: u128, cap: u128 },

    /// The analytic parameter region is empty.
    #[error("empty parameter domain: {0}")]
    Domain(String),

    /// A bracketing solver found no sign change on its bracket.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
