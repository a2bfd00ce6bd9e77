//! Counting and enumeration helpers shared by the evaluators.

use std::ops::Range;

use rand::Rng;

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1); dividing out the gcd first
        // keeps the intermediate product as small as possible
        let den = (i + 1) as u128;
        let g = gcd(acc, den);
        let d = den / g;
        match (acc / g).checked_mul((n - i) as u128 / d) {
            Some(v) => acc = v,
            None => return u128::MAX,
        }
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Visits every `k`-subset of `0..n` whose largest element lies in `top`, in
/// colexicographic order. The visitor receives the sorted members and the OR
/// of their packed columns.
///
/// `column(j)` must return exactly `words` words. For `k == 0` the empty
/// subset is visited once, provided `top` contains 0.
pub(crate) fn walk_colex<'a, C, F>(
    n: usize,
    k: usize,
    words: usize,
    top: Range<usize>,
    column: C,
    mut visit: F,
) where
    C: Fn(usize) -> &'a [u64],
    F: FnMut(&[usize], &[u64]),
{
    if k == 0 {
        if top.contains(&0) {
            visit(&[], &vec![0u64; words]);
        }
        return;
    }
    // slot l holds the OR of members[l..]; slot k stays zero
    let mut acc = vec![0u64; (k + 1) * words];
    let mut members = vec![0usize; k];
    let mut walker = Walker {
        words,
        column: &column,
        members: &mut members,
        acc: &mut acc,
        visit: &mut visit,
    };
    for e in top.start.max(k - 1)..top.end.min(n) {
        walker.pick(k - 1, e);
        walker.descend(k - 1, e);
    }
}

struct Walker<'w, C, F> {
    words: usize,
    column: &'w C,
    members: &'w mut [usize],
    acc: &'w mut [u64],
    visit: &'w mut F,
}

impl<'a, C, F> Walker<'_, C, F>
where
    C: Fn(usize) -> &'a [u64],
    F: FnMut(&[usize], &[u64]),
{
    fn pick(&mut self, pos: usize, e: usize) {
        self.members[pos] = e;
        let w = self.words;
        let (head, tail) = self.acc.split_at_mut((pos + 1) * w);
        let dst = &mut head[pos * w..];
        let col = (self.column)(e);
        for ((d, s), c) in dst.iter_mut().zip(&tail[..w]).zip(col) {
            *d = *s | *c;
        }
    }

    fn descend(&mut self, level: usize, upper: usize) {
        if level == 0 {
            (self.visit)(self.members, &self.acc[..self.words]);
            return;
        }
        for e in (level - 1)..upper {
            self.pick(level - 1, e);
            self.descend(level - 1, e);
        }
    }
}

/// Draws a uniform `k`-subset of `0..pool.len()` by a partial Fisher–Yates
/// shuffle of `pool`, which must hold a permutation of `0..pool.len()`.
/// Returns the chosen prefix, unsorted.
pub(crate) fn sample_subset<'p, R: Rng + ?Sized>(
    pool: &'p mut [usize],
    k: usize,
    rng: &mut R,
) -> &'p [usize] {
    let n = pool.len();
    debug_assert!(k <= n);
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    &pool[..k]
}
