//! Test matrices, defective sets and response vectors.
//!
//! Columns are stored as packed 64-bit words so that the OR of a set of
//! columns and its weight cost `O(N / 64)`. Item and test indices are
//! 0-based here; the text formats used by the command line are 1-based.

use std::fmt;

use crate::error::{input, Error, Result};

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// A binary `N x t` test design: row `i` is a test, column `j` an item, and
/// bit `(i, j)` is set iff item `j` takes part in test `i`.
#[derive(Clone, PartialEq, Eq)]
pub struct TestMatrix {
    n_tests: usize,
    n_items: usize,
    words: usize,
    // column-major, `words` words per column
    data: Vec<u64>,
}

impl TestMatrix {
    /// The all-zero `n_tests x n_items` matrix.
    pub fn zeros(n_tests: usize, n_items: usize) -> Result<Self> {
        if n_tests == 0 || n_items == 0 {
            return input(format!(
                "matrix dimensions must be positive, got {n_tests}x{n_items}"
            ));
        }
        let words = words_for(n_tests);
        Ok(Self {
            n_tests,
            n_items,
            words,
            data: vec![0; words * n_items],
        })
    }

    /// Builds a matrix from a predicate on `(test, item)`.
    pub fn from_fn(
        n_tests: usize,
        n_items: usize,
        mut bit: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut m = Self::zeros(n_tests, n_items)?;
        for j in 0..n_items {
            for i in 0..n_tests {
                if bit(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from its columns, each a slice of `N` booleans.
    pub fn from_columns<C: AsRef<[bool]>>(columns: &[C]) -> Result<Self> {
        let n = columns.first().map(|c| c.as_ref().len()).unwrap_or(0);
        if columns.iter().any(|c| c.as_ref().len() != n) {
            return input("columns have different lengths");
        }
        Self::from_fn(n, columns.len(), |i, j| columns[j].as_ref()[i])
    }

    /// The `n x n` identity design: item `j` is tested alone in test `j`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| i == j)
    }

    pub fn n_tests(&self) -> usize {
        self.n_tests
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub(crate) fn words(&self) -> usize {
        self.words
    }

    pub fn get(&self, test: usize, item: usize) -> bool {
        assert!(test < self.n_tests && item < self.n_items);
        self.data[item * self.words + test / 64] >> (test % 64) & 1 == 1
    }

    pub fn set(&mut self, test: usize, item: usize, value: bool) {
        assert!(test < self.n_tests && item < self.n_items);
        let w = &mut self.data[item * self.words + test / 64];
        let mask = 1u64 << (test % 64);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// Packed words of column `item`.
    pub fn column_words(&self, item: usize) -> &[u64] {
        &self.data[item * self.words..(item + 1) * self.words]
    }

    pub(crate) fn column_words_mut(&mut self, item: usize) -> &mut [u64] {
        &mut self.data[item * self.words..(item + 1) * self.words]
    }

    /// Column `item` as a response vector.
    pub fn column(&self, item: usize) -> ResponseVector {
        ResponseVector::from_words(self.column_words(item).to_vec(), self.n_tests)
    }

    pub fn column_weight(&self, item: usize) -> usize {
        popcount(self.column_words(item))
    }

    /// Number of columns covered by the packed response `y`, counting at most
    /// `limit` of them.
    pub(crate) fn count_covered(&self, y: &[u64], limit: usize) -> usize {
        let mut n = 0;
        for j in 0..self.n_items {
            if covers_words(y, self.column_words(j)) {
                n += 1;
                if n >= limit {
                    break;
                }
            }
        }
        n
    }

    /// Serializes to the matrix text format: a header line `"N t"` followed
    /// by `N` rows of `t` characters from `{0,1}`, each line `\n`-terminated.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity((self.n_items + 1) * (self.n_tests + 1) + 16);
        out.push_str(&format!("{} {}\n", self.n_tests, self.n_items));
        for i in 0..self.n_tests {
            for j in 0..self.n_items {
                out.push(if self.get(i, j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Parses the matrix text format. Line numbers in errors are 1-based.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.split('\n');
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let header = lines
            .next()
            .ok_or_else(|| perr(1, "missing header".into()))?;
        let dims: Vec<&str> = header.split(' ').collect();
        if dims.len() != 2 {
            return Err(perr(1, format!("expected \"N t\", got {header:?}")));
        }
        let parse_dim = |s: &str| -> Result<usize> {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(perr(1, format!("invalid dimension {s:?}")));
            }
            s.parse::<usize>()
                .map_err(|e| perr(1, format!("invalid dimension {s:?}: {e}")))
        };
        let n = parse_dim(dims[0])?;
        let t = parse_dim(dims[1])?;
        if n == 0 || t == 0 {
            return Err(perr(1, format!("dimensions must be positive, got {n} {t}")));
        }
        let mut m = Self::zeros(n, t)?;
        for i in 0..n {
            let lineno = i + 2;
            let row = lines
                .next()
                .ok_or_else(|| perr(lineno, format!("missing row {} of {n}", i + 1)))?;
            if row.len() != t {
                return Err(perr(
                    lineno,
                    format!("expected {t} characters, got {}", row.len()),
                ));
            }
            for (j, b) in row.bytes().enumerate() {
                match b {
                    b'0' => {}
                    b'1' => m.set(i, j, true),
                    other => {
                        return Err(perr(
                            lineno,
                            format!("invalid character {:?} in column {}", other as char, j + 1),
                        ))
                    }
                }
            }
        }
        // a single trailing newline is allowed, nothing else
        match (lines.next(), lines.next()) {
            (None, _) | (Some(""), None) => Ok(m),
            _ => Err(perr(n + 2, "unexpected content after last row".into())),
        }
    }
}

impl fmt::Debug for TestMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TestMatrix {}x{}", self.n_tests, self.n_items)?;
        for i in 0..self.n_tests {
            for j in 0..self.n_items {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A set of (0-based) defective item indices, kept sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DefectiveSet {
    members: Vec<usize>,
}

impl DefectiveSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts the indices; repeated indices are rejected.
    pub fn new(mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return input("defective set has repeated indices");
        }
        Ok(Self { members })
    }

    /// Builds a set from 1-based indices.
    pub fn from_one_based(members: &[usize]) -> Result<Self> {
        if members.contains(&0) {
            return input("1-based item index 0");
        }
        Self::new(members.iter().map(|&j| j - 1).collect())
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut m: Vec<usize> = self.members.iter().chain(&other.members).copied().collect();
        m.sort_unstable();
        m.dedup();
        Self { members: m }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.members
            .iter()
            .all(|j| other.members.binary_search(j).is_ok())
    }
}

/// The outcome of the `N` pooled tests for some defective set.
#[derive(Clone, PartialEq, Eq)]
pub struct ResponseVector {
    bits: Vec<u64>,
    len: usize,
    weight: usize,
}

impl ResponseVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![0; words_for(len)],
            len,
            weight: 0,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut words = vec![0u64; words_for(bits.len())];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Self::from_words(words, bits.len())
    }

    pub(crate) fn from_words(mut bits: Vec<u64>, len: usize) -> Self {
        debug_assert_eq!(bits.len(), words_for(len));
        if !len.is_multiple_of(64) {
            if let Some(last) = bits.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        let weight = popcount(&bits);
        Self { bits, len, weight }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of positive tests.
    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.bits
    }

    /// Bitwise OR of two vectors of equal length.
    pub fn or(&self, other: &Self) -> Result<Self> {
        if self.len != other.len {
            return input(format!("length mismatch: {} vs {}", self.len, other.len));
        }
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a | b)
            .collect();
        Ok(Self::from_words(bits, self.len))
    }
}

impl fmt::Debug for ResponseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "ResponseVector({s}, weight {})", self.weight)
    }
}

#[inline]
pub(crate) fn covers_words(u: &[u64], v: &[u64]) -> bool {
    u.iter().zip(v).all(|(a, b)| b & !a == 0)
}

/// The response vector `x(S)`: the OR of the columns in `set`, all zeros for
/// the empty set.
pub fn response(x: &TestMatrix, set: &DefectiveSet) -> Result<ResponseVector> {
    if let Some(&j) = set.members().iter().find(|&&j| j >= x.n_items()) {
        return input(format!(
            "item index {} out of range 1..={}",
            j + 1,
            x.n_items()
        ));
    }
    let mut acc = vec![0u64; x.words()];
    for &j in set.members() {
        for (a, c) in acc.iter_mut().zip(x.column_words(j)) {
            *a |= c;
        }
    }
    Ok(ResponseVector::from_words(acc, x.n_tests()))
}

/// Whether `u` covers `v`, i.e. `u OR v == u`.
pub fn covers(u: &ResponseVector, v: &ResponseVector) -> Result<bool> {
    if u.len() != v.len() {
        return input(format!("length mismatch: {} vs {}", u.len(), v.len()));
    }
    Ok(covers_words(u.words(), v.words()))
}

/// All items whose columns are covered by `y`.
pub fn covered_columns(x: &TestMatrix, y: &ResponseVector) -> Result<Vec<usize>> {
    if y.len() != x.n_tests() {
        return input(format!(
            "response has length {}, matrix has {} tests",
            y.len(),
            x.n_tests()
        ));
    }
    Ok((0..x.n_items())
        .filter(|&j| covers_words(y.words(), x.column_words(j)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    // columns 110, 011, 101, 111
    pub(crate) fn sample_3x4() -> TestMatrix {
        TestMatrix::from_columns(&[
            [true, true, false],
            [false, true, true],
            [true, false, true],
            [true, true, true],
        ])
        .unwrap()
    }

    #[test]
    fn response_of_empty_set_is_zero() {
        let x = sample_3x4();
        let y = response(&x, &DefectiveSet::empty()).unwrap();
        assert_eq!(y, ResponseVector::zeros(3));
        assert_eq!(y.weight(), 0);
    }

    #[test]
    fn response_identity_pair() {
        let x = TestMatrix::identity(2).unwrap();
        let y = response(&x, &DefectiveSet::new(vec![0, 1]).unwrap()).unwrap();
        assert_eq!(y.to_bools(), vec![true, true]);
    }

    #[test]
    fn response_first_two_columns() {
        let y = response(
            &sample_3x4(),
            &DefectiveSet::from_one_based(&[1, 2]).unwrap(),
        )
        .unwrap();
        assert_eq!(y.to_bools(), vec![true, true, true]);
        assert_eq!(y.weight(), 3);
    }

    #[test]
    fn response_rejects_out_of_range() {
        let err = response(&sample_3x4(), &DefectiveSet::new(vec![4]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn defective_set_rejects_repeats() {
        assert!(DefectiveSet::new(vec![1, 1]).is_err());
        assert!(DefectiveSet::from_one_based(&[0]).is_err());
    }

    #[test]
    fn covers_cases() {
        let u = ResponseVector::from_bools(&[true, true, false]);
        let v = ResponseVector::from_bools(&[true, false, false]);
        assert!(covers(&u, &v).unwrap());
        assert!(covers(&u, &u).unwrap());
        let a = ResponseVector::from_bools(&[false, true]);
        let b = ResponseVector::from_bools(&[true, false]);
        assert!(!covers(&a, &b).unwrap());
        assert!(covers(&a, &ResponseVector::zeros(3)).is_err());
    }

    #[test]
    fn covered_columns_cases() {
        let x = sample_3x4();
        let ones = ResponseVector::from_bools(&[true; 3]);
        assert_eq!(covered_columns(&x, &ones).unwrap(), vec![0, 1, 2, 3]);
        assert!(covered_columns(&x, &ResponseVector::zeros(3))
            .unwrap()
            .is_empty());
        let y = ResponseVector::from_bools(&[true, true, false]);
        assert_eq!(covered_columns(&x, &y).unwrap(), vec![0]);
        assert!(covered_columns(&x, &ResponseVector::zeros(4)).is_err());
    }

    #[test]
    fn wide_columns_span_words() {
        let x = TestMatrix::from_fn(130, 3, |i, j| (i + j) % 3 == 0).unwrap();
        assert_eq!(x.words(), 3);
        let y = response(&x, &DefectiveSet::new(vec![0, 1, 2]).unwrap()).unwrap();
        assert_eq!(y.weight(), 130);
        assert_eq!(x.column_weight(0), 44);
    }

    #[test]
    fn text_format_roundtrip_and_layout() {
        let x = sample_3x4();
        let text = x.to_text();
        assert_eq!(text, "3 4\n1011\n1101\n0111\n");
        assert_eq!(TestMatrix::parse_text(&text).unwrap(), x);
        assert_eq!(TestMatrix::parse_text(text.trim_end()).unwrap(), x);
    }

    #[test]
    fn text_format_errors_name_line() {
        let cases = [
            ("3 4\n1011\n11x1\n0111\n", 3),
            ("3 4\n1011\n1101\n", 4),
            ("3 4 \n1011\n1101\n0111\n", 1),
            ("3 4\n1011 \n1101\n0111\n", 2),
            ("0 4\n", 1),
            ("3 4\n1011\n1101\n0111\n\n", 5),
            ("-3 4\n", 1),
        ];
        for (text, line) in cases {
            match TestMatrix::parse_text(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
