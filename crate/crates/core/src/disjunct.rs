//! Exhaustive verification of disjunctive (superimposed) codes.

use rayon::prelude::*;

use crate::combin::{binomial, walk_colex};
use crate::error::{input, Error, Result};
use crate::matrix::{covers_words, DefectiveSet, TestMatrix};

/// A violation of the disjunctive property: the response of `set` covers
/// `item`, which is not a member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub set: DefectiveSet,
    pub item: usize,
}

/// Searches for the first `s`-subset (in colex order) whose response covers
/// an outside column. `Ok(None)` means `x` is a disjunctive `s`-code.
///
/// The work is `C(t, s) * t` column checks, refused above `cap`.
pub fn find_violation(x: &TestMatrix, s: usize, cap: u128) -> Result<Option<Witness>> {
    let t = x.n_items();
    if s == 0 || s >= t {
        return input(format!("need 1 <= s <= t - 1, got s = {s}, t = {t}"));
    }
    let needed = binomial(t, s).saturating_mul(t as u128);
    if needed > cap {
        return Err(Error::Budget { needed, cap });
    }
    let words = x.words();
    let found = (s - 1..t).into_par_iter().find_map_first(|top| {
        let mut hit: Option<Witness> = None;
        walk_colex(
            t,
            s,
            words,
            top..top + 1,
            |j| x.column_words(j),
            |members, y| {
                if hit.is_some() {
                    return;
                }
                for j in 0..t {
                    if members.binary_search(&j).is_err() && covers_words(y, x.column_words(j)) {
                        hit = Some(Witness {
                            set: DefectiveSet::new(members.to_vec()).expect("distinct members"),
                            item: j,
                        });
                        return;
                    }
                }
            },
        );
        hit
    });
    Ok(found)
}

/// Whether `x` is a disjunctive `s`-code (default enumeration budget).
pub fn is_disjunctive_code(x: &TestMatrix, s: usize) -> Result<bool> {
    Ok(find_violation(x, s, crate::evaluator::DEFAULT_CAP)?.is_none())
}
