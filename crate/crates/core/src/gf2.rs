//! Bit-packed linear algebra over GF(2).
//!
//! Every vector fits in one `u64`, so a matrix is a list of words. Column `q`
//! of a matrix (and position `q` of a vector) is bit `q` of the word, which is
//! also character `q` when the vector is printed as a 0/1 string.
//!
//! Elimination always pivots on columns left to right, so every routine here
//! is deterministic and platform independent.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use crate::error::{Error, Result};

/// Largest vector length that fits in a single word.
pub const MAX_BITS: usize = 64;

#[inline]
pub(crate) fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// A GF(2) vector of length `1..=64` packed into one machine word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: u8,
    bits: u64,
}

impl BitVector {
    /// Builds a vector, rejecting lengths outside `1..=64` and set bits past `len`.
    pub fn new(len: usize, bits: u64) -> Result<Self> {
        if len == 0 || len > MAX_BITS {
            return Err(Error::VectorLength(len));
        }
        if bits & !mask(len) != 0 {
            return Err(Error::BitsPastLength { len, bits });
        }
        Ok(Self {
            len: len as u8,
            bits,
        })
    }

    /// Crate-internal constructor; the caller guarantees the invariants.
    #[inline]
    pub(crate) fn from_raw(len: usize, bits: u64) -> Self {
        debug_assert!((1..=MAX_BITS).contains(&len) && bits & !mask(len) == 0);
        Self {
            len: len as u8,
            bits,
        }
    }

    pub fn zero(len: usize) -> Result<Self> {
        Self::new(len, 0)
    }

    /// The standard basis vector with a single 1 at position `q`.
    pub fn unit(len: usize, q: usize) -> Result<Self> {
        if q >= len {
            return Err(Error::IndexOutOfRange { index: q, bound: len });
        }
        Self::new(len, 1u64 << q)
    }

    /// Parses a 0/1 string where character `q` is coefficient `q`.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        for (q, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' if q < MAX_BITS => bits |= 1u64 << q,
                '1' => return Err(Error::VectorLength(s.len())),
                _ => return Err(Error::BadBitChar(ch)),
            }
        }
        Self::new(s.chars().count(), bits)
    }

    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn get(&self, q: usize) -> bool {
        q < self.len() && (self.bits >> q) & 1 == 1
    }

    #[inline]
    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Positions of the set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> {
        BitIter(self.bits)
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len())
            .map(|q| if self.get(q) { '1' } else { '0' })
            .collect()
    }

    /// XOR that reports a length mismatch instead of panicking.
    pub fn checked_xor(self, other: Self) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Self {
            len: self.len,
            bits: self.bits ^ other.bits,
        })
    }
}

impl BitXor for BitVector {
    type Output = BitVector;

    /// Panics if the lengths differ; use [`BitVector::checked_xor`] otherwise.
    fn bitxor(self, rhs: Self) -> Self {
        assert_eq!(self.len, rhs.len, "xor of vectors with different lengths");
        Self {
            len: self.len,
            bits: self.bits ^ rhs.bits,
        }
    }
}

impl BitXorAssign for BitVector {
    fn bitxor_assign(&mut self, rhs: Self) {
        *self = *self ^ rhs;
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({})", self.to_bit_string())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Iterator over set-bit positions of a word.
pub(crate) struct BitIter(pub(crate) u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let q = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(q)
    }
}

/// A dense GF(2) matrix with at most 64 columns; each row is one word.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<u64>,
}

impl Gf2Matrix {
    pub fn new(cols: usize) -> Result<Self> {
        if cols == 0 || cols > MAX_BITS {
            return Err(Error::VectorLength(cols));
        }
        Ok(Self {
            cols,
            rows: Vec::new(),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        let mut m = Self::new(cols)?;
        m.rows = vec![0; rows];
        Ok(m)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::new(n)?;
        m.rows = (0..n).map(|q| 1u64 << q).collect();
        Ok(m)
    }

    /// Stacks vectors as rows; all must share one length.
    pub fn from_rows(rows: &[BitVector]) -> Result<Self> {
        let cols = rows.first().map(BitVector::len).ok_or(Error::EmptyMatrix)?;
        let mut m = Self::new(cols)?;
        for r in rows {
            m.push_row(*r)?;
        }
        Ok(m)
    }

    /// Parses rows written as 0/1 strings, e.g. `["110", "011"]`.
    pub fn from_bit_strs(rows: &[&str]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|s| BitVector::from_bit_str(s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }

    pub(crate) fn from_words(cols: usize, rows: Vec<u64>) -> Self {
        debug_assert!(rows.iter().all(|&w| w & !mask(cols) == 0));
        Self { cols, rows }
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: row.len(),
            });
        }
        self.rows.push(row.bits());
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector::from_raw(self.cols, self.rows[i])
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.rows
    }

    /// Outer product `u vᵀ` as a `u.len() × v.len()` matrix.
    pub fn outer(u: BitVector, v: BitVector) -> Self {
        let rows = (0..u.len())
            .map(|i| if u.get(i) { v.bits() } else { 0 })
            .collect();
        Self::from_words(v.len(), rows)
    }

    /// Entry-wise sum; panics on a shape mismatch.
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.rows.len(), other.rows.len());
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a ^= *b;
        }
    }

    /// Dimension of the row span.
    pub fn rank(&self) -> usize {
        rank_of_words(&self.rows)
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows()).map(|i| self.row(i).to_bit_string()))
            .finish()
    }
}

/// Rank of a list of row words. Used on the hot path, so it works in place on a
/// small copy and never allocates for up to 64 independent rows.
pub(crate) fn rank_of_words(rows: &[u64]) -> usize {
    // basis[c] holds a row whose lowest set bit is c
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for &r in rows {
        let mut x = r;
        while x != 0 {
            let c = x.trailing_zeros() as usize;
            if basis[c] == 0 {
                basis[c] = x;
                rank += 1;
                break;
            }
            x ^= basis[c];
        }
    }
    rank
}

fn rref_words(mut rows: Vec<u64>, cols: usize) -> Vec<(usize, u64)> {
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let bit = 1u64 << c;
        let Some(found) = (pivot_row..rows.len()).find(|&i| rows[i] & bit != 0) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let p = rows[pivot_row];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != pivot_row && *r & bit != 0 {
                *r ^= p;
            }
        }
        pivots.push(c);
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    pivots
        .into_iter()
        .enumerate()
        .map(|(k, c)| (c, rows[k]))
        .collect()
}

/// Rank of `m` over GF(2).
pub fn gf2_rank(m: &Gf2Matrix) -> usize {
    m.rank()
}

/// Finds coefficients `c` with `XOR_{c_i = 1} row_i == target`.
///
/// Among all solutions the one with the lexicographically smallest coefficient
/// string is returned: row 0 is used only if the target is not reachable
/// without it, then row 1, and so on.
pub fn gf2_solve(basis: &Gf2Matrix, target: BitVector) -> Result<Option<BitVector>> {
    if target.len() != basis.cols() {
        return Err(Error::DimensionMismatch {
            expected: basis.cols(),
            found: target.len(),
        });
    }
    let n = basis.rows();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if n > MAX_BITS {
        return Err(Error::VectorLength(n));
    }

    // suffix[k] = echelon basis of rows k.. (pivot = lowest set bit)
    let mut suffix: Vec<[u64; 64]> = vec![[0u64; 64]; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1];
        insert(&mut suffix[k], basis.words()[k]);
    }
    let mut t = target.bits();
    if reduce(&suffix[0], t) != 0 {
        return Ok(None);
    }
    let mut coeffs = 0u64;
    for k in 0..n {
        if reduce(&suffix[k + 1], t) != 0 {
            coeffs |= 1 << k;
            t ^= basis.words()[k];
        }
    }
    debug_assert_eq!(t, 0);
    Ok(Some(BitVector::from_raw(n, coeffs)))
}

fn insert(basis: &mut [u64; 64], mut x: u64) {
    while x != 0 {
        let c = x.trailing_zeros() as usize;
        if basis[c] == 0 {
            basis[c] = x;
            return;
        }
        x ^= basis[c];
    }
}

fn reduce(basis: &[u64; 64], mut x: u64) -> u64 {
    while x != 0 {
        let c = x.trailing_zeros() as usize;
        if basis[c] == 0 {
            return x;
        }
        x ^= basis[c];
    }
    0
}

/// Writes `m` as a sum of `rank(m)` outer products `col ⊗ row`.
///
/// With `R` the reduced row echelon form of `m` and `P` its pivot columns,
/// `m = m[:, P] · R`, so pair `k` is (column `P[k]` of `m`, row `k` of `R`).
/// Pairs come out in ascending pivot-column order.
///
/// Panics if `m` has more than 64 rows, since each column must fit a word.
pub fn gf2_rank_one_factorization(m: &Gf2Matrix) -> Vec<(BitVector, BitVector)> {
    assert!(m.rows() <= MAX_BITS, "factorization needs at most 64 rows");
    rank_one_factors(m.words(), m.cols())
        .into_iter()
        .map(|(c, r)| {
            (
                BitVector::from_raw(m.rows(), c),
                BitVector::from_raw(m.cols(), r),
            )
        })
        .collect()
}

/// Word-level factorization: `(column word, row word)` pairs.
pub(crate) fn rank_one_factors(rows: &[u64], cols: usize) -> Vec<(u64, u64)> {
    rref_words(rows.to_vec(), cols)
        .into_iter()
        .map(|(pivot, r)| {
            let col = rows
                .iter()
                .enumerate()
                .filter(|(_, w)| (*w >> pivot) & 1 == 1)
                .fold(0u64, |acc, (i, _)| acc | 1 << i);
            (col, r)
        })
        .collect()
}
