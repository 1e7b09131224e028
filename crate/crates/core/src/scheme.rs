//! Rank-one terms, schemes, and the matrix multiplication tensor.
//!
//! Factor matrices are flattened row-major with the index roles of
//! `M = Σ a_{i,j} ⊗ b_{j,k} ⊗ c_{k,i}` (all indices 0-based here):
//!
//! | component | bit                 | basis element |
//! |-----------|---------------------|---------------|
//! | alpha     | `i·m + j`           | `a_{i,j}`     |
//! | beta      | `j·p + k`           | `b_{j,k}`     |
//! | gamma     | `k·n + i`           | `c_{k,i}`     |

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{mask, rank_of_words, BitIter, BitVector, MAX_BITS};

/// Matrix dimensions `(n, m, p)` for multiplying an `n×m` by an `m×p` matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dims {
    pub n: usize,
    pub m: usize,
    pub p: usize,
}

impl Dims {
    /// Each dimension must be at least 2 and every factor must fit in a word.
    pub fn new(n: usize, m: usize, p: usize) -> Result<Self> {
        let err = |reason| Error::Dims { n, m, p, reason };
        if n < 2 || m < 2 || p < 2 {
            return Err(err("every dimension must be at least 2"));
        }
        if n * m > MAX_BITS || m * p > MAX_BITS || p * n > MAX_BITS {
            return Err(err("n·m, m·p and p·n must not exceed 64"));
        }
        Ok(Self { n, m, p })
    }

    /// Component lengths `(n·m, m·p, p·n)`.
    pub fn lens(&self) -> [usize; 3] {
        [self.n * self.m, self.m * self.p, self.p * self.n]
    }

    pub fn len(&self, slot: Slot) -> usize {
        self.lens()[slot.index()]
    }

    pub fn volume(&self) -> usize {
        self.n * self.m * self.p
    }

    pub fn contains(&self, other: &Dims) -> bool {
        other.n <= self.n && other.m <= self.m && other.p <= self.p
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.n, self.m, self.p)
    }
}

impl std::str::FromStr for Dims {
    type Err = Error;

    /// Parses `NxMxP`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<_> = s.split(['x', 'X']).collect();
        let bad = || Error::Params(format!("dimensions must look like 3x3x3, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v = parts
            .iter()
            .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Dims::new(v[0], v[1], v[2])
    }
}

/// Which of the three components a move refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Alpha,
    Beta,
    Gamma,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::Alpha, Slot::Beta, Slot::Gamma];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Slot {
        Self::ALL[i % 3]
    }

    /// Cyclic successor: alpha → beta → gamma → alpha.
    #[inline]
    pub fn next(self) -> Slot {
        Self::from_index(self.index() + 1)
    }

    /// The remaining slot after `self` and `self.next()`.
    #[inline]
    pub fn third(self) -> Slot {
        Self::from_index(self.index() + 2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Slot::Alpha => "alpha",
            Slot::Beta => "beta",
            Slot::Gamma => "gamma",
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Slot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(Slot::Alpha),
            "beta" => Ok(Slot::Beta),
            "gamma" => Ok(Slot::Gamma),
            _ => Err(Error::Params(format!("unknown slot {s:?}"))),
        }
    }
}

/// A rank-one tensor `alpha ⊗ beta ⊗ gamma`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub alpha: BitVector,
    pub beta: BitVector,
    pub gamma: BitVector,
}

impl Term {
    pub fn new(alpha: BitVector, beta: BitVector, gamma: BitVector) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn component(&self, slot: Slot) -> BitVector {
        match slot {
            Slot::Alpha => self.alpha,
            Slot::Beta => self.beta,
            Slot::Gamma => self.gamma,
        }
    }

    pub fn set_component(&mut self, slot: Slot, v: BitVector) {
        match slot {
            Slot::Alpha => self.alpha = v,
            Slot::Beta => self.beta = v,
            Slot::Gamma => self.gamma = v,
        }
    }

    pub fn has_zero_component(&self) -> bool {
        self.alpha.is_zero() || self.beta.is_zero() || self.gamma.is_zero()
    }

    #[inline]
    pub(crate) fn words(&self) -> [u64; 3] {
        [self.alpha.bits(), self.beta.bits(), self.gamma.bits()]
    }

    #[inline]
    pub(crate) fn from_words(dims: &Dims, w: [u64; 3]) -> Self {
        let [la, lb, lc] = dims.lens();
        Self {
            alpha: BitVector::from_raw(la, w[0]),
            beta: BitVector::from_raw(lb, w[1]),
            gamma: BitVector::from_raw(lc, w[2]),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.alpha, self.beta, self.gamma)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A list of rank-one terms for fixed dimensions.
///
/// Construction only checks well-formedness (component lengths and no zero
/// components). Whether the terms actually sum to the multiplication tensor is
/// answered by [`Scheme::verify`]; every move in this crate preserves the sum.
///
/// Equality ignores term order.
#[derive(Clone)]
pub struct Scheme {
    dims: Dims,
    terms: Vec<Term>,
}

impl Scheme {
    pub fn new(dims: Dims, terms: Vec<Term>) -> Result<Self> {
        let lens = dims.lens();
        for (idx, t) in terms.iter().enumerate() {
            for slot in Slot::ALL {
                let c = t.component(slot);
                if c.len() != lens[slot.index()] {
                    return Err(Error::DimensionMismatch {
                        expected: lens[slot.index()],
                        found: c.len(),
                    });
                }
            }
            if t.has_zero_component() {
                return Err(Error::ZeroComponent(idx));
            }
        }
        Ok(Self { dims, terms })
    }

    /// Like [`Scheme::new`] but additionally requires `verify()`.
    pub fn validated(dims: Dims, terms: Vec<Term>) -> Result<Self> {
        let s = Self::new(dims, terms)?;
        if !s.verify() {
            return Err(Error::NotAScheme);
        }
        Ok(s)
    }

    pub(crate) fn from_words(dims: Dims, words: impl IntoIterator<Item = [u64; 3]>) -> Self {
        let terms = words
            .into_iter()
            .map(|w| Term::from_words(&dims, w))
            .collect();
        Self { dims, terms }
    }

    pub(crate) fn words(&self) -> Vec<[u64; 3]> {
        self.terms.iter().map(Term::words).collect()
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    /// Number of terms, i.e. the number of multiplications the scheme uses.
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn verify(&self) -> bool {
        verify(self)
    }

    pub fn component_ranks(&self) -> (usize, usize, usize) {
        component_ranks(self)
    }

    /// Terms sorted into a canonical order, for multiset comparisons.
    pub fn sorted_terms(&self) -> Vec<Term> {
        let mut t = self.terms.clone();
        t.sort_unstable();
        t
    }
}

impl PartialEq for Scheme {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
            && self.terms.len() == other.terms.len()
            && self.sorted_terms() == other.sorted_terms()
    }
}

impl Eq for Scheme {}

impl fmt::Debug for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scheme")
            .field("dims", &self.dims)
            .field("rank", &self.rank())
            .field("terms", &self.terms)
            .finish()
    }
}

/// Entry `(x, y, z)` of the multiplication tensor for flattened indices
/// `x = (i, j)`, `y = (j', k)`, `z = (k', i')`: one iff `j = j'`, `k = k'`, `i = i'`.
pub fn mul_tensor_entry(dims: Dims, x: usize, y: usize, z: usize) -> Result<bool> {
    let [la, lb, lc] = dims.lens();
    for (index, bound) in [(x, la), (y, lb), (z, lc)] {
        if index >= bound {
            return Err(Error::IndexOutOfRange { index, bound });
        }
    }
    let (i, j) = (x / dims.m, x % dims.m);
    let (j2, k) = (y / dims.p, y % dims.p);
    let (k2, i2) = (z / dims.n, z % dims.n);
    Ok(j == j2 && k == k2 && i == i2)
}

/// The classical `n·m·p`-term scheme, ordered by `i`, then `k`, then `j`.
pub fn standard_scheme(n: usize, m: usize, p: usize) -> Result<Scheme> {
    let dims = Dims::new(n, m, p)?;
    let mut words = Vec::with_capacity(dims.volume());
    for i in 0..n {
        for k in 0..p {
            for j in 0..m {
                words.push([1u64 << (i * m + j), 1u64 << (j * p + k), 1u64 << (k * n + i)]);
            }
        }
    }
    Ok(Scheme::from_words(dims, words))
}

/// Strassen's seven-term `(2,2,2)` scheme with every sign read over GF(2).
pub fn strassen_scheme() -> Scheme {
    let dims = Dims { n: 2, m: 2, p: 2 };
    // (a11 a12 a21 a22), (b11 b12 b21 b22), (c11 c12 c21 c22)
    const TERMS: [[&str; 3]; 7] = [
        ["1001", "1001", "1001"],
        ["0011", "1000", "0101"],
        ["1000", "0101", "0011"],
        ["0001", "1010", "1100"],
        ["1100", "0001", "1010"],
        ["1010", "1100", "0001"],
        ["0101", "0011", "1000"],
    ];
    let terms = TERMS
        .iter()
        .map(|[a, b, c]| {
            Term::new(
                BitVector::from_bit_str(a).unwrap(),
                BitVector::from_bit_str(b).unwrap(),
                BitVector::from_bit_str(c).unwrap(),
            )
        })
        .collect();
    Scheme { dims, terms }
}

/// Does the sum of all terms equal the multiplication tensor?
pub fn verify(s: &Scheme) -> bool {
    verify_words(s.dims, s.terms.iter().map(Term::words))
}

/// Parity table indexed by `(alpha bit, beta bit)` whose cells are gamma words.
pub(crate) fn verify_words(dims: Dims, terms: impl IntoIterator<Item = [u64; 3]>) -> bool {
    let [la, lb, _] = dims.lens();
    let mut table = vec![0u64; la * lb];
    for [a, b, c] in terms {
        for x in BitIter(a) {
            let row = &mut table[x * lb..(x + 1) * lb];
            for y in BitIter(b) {
                row[y] ^= c;
            }
        }
    }
    // expected: cell ((i,j),(j,k)) = c_{k,i}, all others zero
    for x in 0..la {
        let (i, j) = (x / dims.m, x % dims.m);
        for y in 0..lb {
            let (j2, k) = (y / dims.p, y % dims.p);
            let want = if j == j2 { 1u64 << (k * dims.n + i) } else { 0 };
            if table[x * lb + y] != want {
                return false;
            }
        }
    }
    true
}

/// GF(2) ranks of the stacked alpha, beta and gamma vectors. For any valid
/// scheme these are `(n·m, m·p, p·n)`.
pub fn component_ranks(s: &Scheme) -> (usize, usize, usize) {
    let r = |slot: Slot| {
        let rows: Vec<u64> = s.terms.iter().map(|t| t.component(slot).bits()).collect();
        rank_of_words(&rows)
    };
    (r(Slot::Alpha), r(Slot::Beta), r(Slot::Gamma))
}

/// Is every support bit of the term inside the leading `box_dims` sub-blocks?
pub(crate) fn box_masks(dims: Dims, box_dims: Dims) -> [u64; 3] {
    let block = |rows: usize, cols: usize, sub_rows: usize, sub_cols: usize| {
        let mut m = 0u64;
        for r in 0..sub_rows {
            m |= mask(sub_cols) << (r * cols);
        }
        debug_assert!(rows >= sub_rows);
        m
    };
    [
        block(dims.n, dims.m, box_dims.n, box_dims.m),
        block(dims.m, dims.p, box_dims.m, box_dims.p),
        block(dims.p, dims.n, box_dims.p, box_dims.n),
    ]
}
