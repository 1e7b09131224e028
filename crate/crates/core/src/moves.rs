//! Edges of the flip graph: flips, reductions, plus transitions and splits.
//!
//! Slot permutations follow one cyclic convention. For a move anchored at slot
//! `s`, "next" is `s.next()` and "third" is `s.third()`; with `s = alpha` that
//! is beta and gamma.
//!
//! All functions take the scheme by reference and return a new one.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{rank_of_words, rank_one_factors, BitVector};
use crate::scheme::{Scheme, Slot, Term};

/// Flip of terms `i` and `j`, which agree on `slot`:
/// `next(i) ← next(i) + next(j)` and `third(j) ← third(j) + third(i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FlipMove {
    pub slot: Slot,
    pub i: usize,
    pub j: usize,
}

/// Plus transition of terms `i` and `j`, which differ in every component.
/// `slot` plays the alpha role of the defining identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PlusMove {
    pub slot: Slot,
    pub i: usize,
    pub j: usize,
}

/// Two terms agreeing on at least two components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionPair {
    pub i: usize,
    pub j: usize,
    pub shared: Vec<Slot>,
}

/// A group of terms sharing `slot` whose summed outer products have rank
/// `rank < group.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralReduction {
    pub slot: Slot,
    pub group: Vec<usize>,
    pub rank: usize,
}

/// Any single edge, with full arguments. This is what move scripts store.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    Flip(FlipMove),
    Reduce { i: usize, j: usize },
    GeneralReduce { slot: Slot, group: Vec<usize> },
    Plus(PlusMove),
    Split { idx: usize, slot: Slot, donor: BitVector },
}

impl Move {
    pub fn apply(&self, s: &Scheme) -> Result<Scheme> {
        match self {
            Move::Flip(mv) => apply_flip(s, *mv),
            Move::Reduce { i, j } => apply_pairwise_reduction(s, *i, *j),
            Move::GeneralReduce { slot, group } => apply_general_reduction(s, *slot, group),
            Move::Plus(mv) => apply_plus(s, *mv),
            Move::Split { idx, slot, donor } => apply_split(s, *idx, *slot, *donor),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Flip(m) => write!(f, "flip {} {} {}", m.slot, m.i, m.j),
            Move::Reduce { i, j } => write!(f, "reduce {i} {j}"),
            Move::GeneralReduce { slot, group } => {
                write!(f, "greduce {slot}")?;
                for g in group {
                    write!(f, " {g}")?;
                }
                Ok(())
            }
            Move::Plus(m) => write!(f, "plus {} {} {}", m.slot, m.i, m.j),
            Move::Split { idx, slot, donor } => write!(f, "split {slot} {idx} {donor}"),
        }
    }
}

fn check_index(s: &Scheme, i: usize) -> Result<()> {
    if i >= s.rank() {
        return Err(Error::IndexOutOfRange {
            index: i,
            bound: s.rank(),
        });
    }
    Ok(())
}

fn illegal(msg: impl Into<String>) -> Error {
    Error::IllegalMove(msg.into())
}

#[inline]
pub(crate) fn flip_is_legal(a: &[u64; 3], b: &[u64; 3], slot: usize) -> bool {
    let (nx, th) = ((slot + 1) % 3, (slot + 2) % 3);
    a[slot] == b[slot] && a[nx] != b[nx] && a[th] != b[th]
}

#[inline]
pub(crate) fn flip_words(terms: &mut [[u64; 3]], slot: usize, i: usize, j: usize) {
    let (nx, th) = ((slot + 1) % 3, (slot + 2) % 3);
    terms[i][nx] ^= terms[j][nx];
    terms[j][th] ^= terms[i][th];
}

#[inline]
pub(crate) fn plus_is_legal(a: &[u64; 3], b: &[u64; 3]) -> bool {
    a[0] != b[0] && a[1] != b[1] && a[2] != b[2]
}

/// Rewrites `i` and `j` in place and returns the new third term.
#[inline]
pub(crate) fn plus_words(terms: &mut [[u64; 3]], slot: usize, i: usize, j: usize) -> [u64; 3] {
    let (nx, th) = ((slot + 1) % 3, (slot + 2) % 3);
    let (ti, tj) = (terms[i], terms[j]);
    let mut extra = tj;
    extra[slot] = tj[slot] ^ ti[slot];
    terms[j][slot] = ti[slot];
    terms[j][th] = tj[th] ^ ti[th];
    terms[i][nx] = ti[nx] ^ tj[nx];
    extra
}

/// Slots on which two terms agree.
#[inline]
pub(crate) fn shared_slots(a: &[u64; 3], b: &[u64; 3]) -> [bool; 3] {
    [a[0] == b[0], a[1] == b[1], a[2] == b[2]]
}

fn sorted_active(s: &Scheme, active: &[usize]) -> Vec<usize> {
    let mut a: Vec<usize> = active.iter().copied().filter(|&i| i < s.rank()).collect();
    a.sort_unstable();
    a.dedup();
    a
}

/// Every legal flip among `active`, ordered by slot, then `i`, then `j`.
pub fn enumerate_flips(s: &Scheme, active: &[usize]) -> Vec<FlipMove> {
    let w = s.words();
    let act = sorted_active(s, active);
    let mut out = Vec::new();
    for slot in Slot::ALL {
        for &i in &act {
            for &j in &act {
                if i != j && flip_is_legal(&w[i], &w[j], slot.index()) {
                    out.push(FlipMove { slot, i, j });
                }
            }
        }
    }
    out
}

/// Applies a flip. Flips that would create a zero component are rejected; those
/// pairs are handled by [`apply_pairwise_reduction`].
pub fn apply_flip(s: &Scheme, mv: FlipMove) -> Result<Scheme> {
    check_index(s, mv.i)?;
    check_index(s, mv.j)?;
    let mut w = s.words();
    if mv.i == mv.j {
        return Err(illegal("flip needs two distinct terms"));
    }
    if !flip_is_legal(&w[mv.i], &w[mv.j], mv.slot.index()) {
        return Err(illegal(format!(
            "terms {} and {} are not flippable on {}",
            mv.i, mv.j, mv.slot
        )));
    }
    flip_words(&mut w, mv.slot.index(), mv.i, mv.j);
    Ok(Scheme::from_words(s.dims(), w))
}

/// Unordered pairs among `active` that agree on at least two components.
pub fn find_pairwise_reductions(s: &Scheme, active: &[usize]) -> Vec<ReductionPair> {
    let w = s.words();
    let act = sorted_active(s, active);
    let mut out = Vec::new();
    for (a, &i) in act.iter().enumerate() {
        for &j in &act[a + 1..] {
            let sh = shared_slots(&w[i], &w[j]);
            if sh.iter().filter(|&&b| b).count() >= 2 {
                let shared = Slot::ALL.into_iter().filter(|s| sh[s.index()]).collect();
                out.push(ReductionPair { i, j, shared });
            }
        }
    }
    out
}

/// Merges two terms that agree on two components into one (or into nothing
/// when they are identical). The merged term takes the lower index; removals
/// keep the relative order of the other terms.
pub fn apply_pairwise_reduction(s: &Scheme, i: usize, j: usize) -> Result<Scheme> {
    check_index(s, i)?;
    check_index(s, j)?;
    if i == j {
        return Err(illegal("reduction needs two distinct terms"));
    }
    let mut w = s.words();
    let sh = shared_slots(&w[i], &w[j]);
    let (lo, hi) = (i.min(j), i.max(j));
    match sh.iter().filter(|&&b| b).count() {
        3 => {
            w.remove(hi);
            w.remove(lo);
        }
        2 => {
            let d = sh.iter().position(|&b| !b).unwrap();
            w[lo][d] ^= w[hi][d];
            w.remove(hi);
        }
        _ => {
            return Err(illegal(format!(
                "terms {i} and {j} share fewer than two components"
            )))
        }
    }
    Ok(Scheme::from_words(s.dims(), w))
}

/// Groups of `active` terms with identical `slot` component, each listed in
/// ascending index order; groups ordered by their smallest member.
fn groups(w: &[[u64; 3]], act: &[usize], slot: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; w.len()];
    let mut out = Vec::new();
    for (a, &i) in act.iter().enumerate() {
        if seen[i] {
            continue;
        }
        let g: Vec<usize> = std::iter::once(i)
            .chain(act[a + 1..].iter().copied().filter(|&j| w[j][slot] == w[i][slot]))
            .collect();
        for &j in &g {
            seen[j] = true;
        }
        out.push(g);
    }
    out
}

/// Rank of `Σ next ⊗ third` over the group, as a matrix whose rows are indexed
/// by the next-slot bits.
pub(crate) fn group_outer_rank(w: &[[u64; 3]], group: &[usize], slot: usize, rows: usize) -> usize {
    rank_of_words(&group_outer_sum(w, group, slot, rows))
}

fn group_outer_sum(w: &[[u64; 3]], group: &[usize], slot: usize, rows: usize) -> Vec<u64> {
    let (nx, th) = ((slot + 1) % 3, (slot + 2) % 3);
    let mut m = vec![0u64; rows];
    for &g in group {
        let mut b = w[g][nx];
        while b != 0 {
            let r = b.trailing_zeros() as usize;
            m[r] ^= w[g][th];
            b &= b - 1;
        }
    }
    m
}

/// First qualifying reduction group, scanning slots alpha, beta, gamma and
/// within a slot the groups by smallest member.
pub fn find_general_reduction(s: &Scheme, active: &[usize]) -> Option<GeneralReduction> {
    Slot::ALL
        .into_iter()
        .find_map(|slot| find_general_reduction_on(s, active, slot))
}

/// Like [`find_general_reduction`], restricted to groups sharing `slot`.
pub fn find_general_reduction_on(s: &Scheme, active: &[usize], slot: Slot) -> Option<GeneralReduction> {
    let w = s.words();
    let act = sorted_active(s, active);
    let rows = s.dims().lens()[slot.next().index()];
    groups(&w, &act, slot.index()).into_iter().find_map(|g| {
        if g.len() < 2 {
            return None;
        }
        let r = group_outer_rank(&w, &g, slot.index(), rows);
        (r < g.len()).then_some(GeneralReduction {
            slot,
            group: g,
            rank: r,
        })
    })
}

/// Replaces a group sharing `slot` by `rank` terms obtained from a rank-one
/// factorization of its summed outer products. New terms occupy the group's
/// lowest positions; the remaining group positions are removed.
pub fn apply_general_reduction(s: &Scheme, slot: Slot, group: &[usize]) -> Result<Scheme> {
    let mut g = group.to_vec();
    g.sort_unstable();
    g.dedup();
    if g.len() != group.len() || g.is_empty() {
        return Err(illegal("reduction group must be non-empty without repeats"));
    }
    for &i in &g {
        check_index(s, i)?;
    }
    let mut w = s.words();
    let si = slot.index();
    let shared = w[g[0]][si];
    if g.iter().any(|&i| w[i][si] != shared) {
        return Err(illegal(format!("group does not share its {slot} component")));
    }
    let lens = s.dims().lens();
    let sum = group_outer_sum(&w, &g, si, lens[slot.next().index()]);
    let factors = rank_one_factors(&sum, lens[slot.third().index()]);
    if factors.len() >= g.len() {
        return Err(illegal("group is not rank deficient"));
    }
    let (nx, th) = (slot.next().index(), slot.third().index());
    for (k, (col, row)) in factors.iter().enumerate() {
        let mut t = [0u64; 3];
        t[si] = shared;
        t[nx] = *col;
        t[th] = *row;
        w[g[k]] = t;
    }
    for &i in g[factors.len()..].iter().rev() {
        w.remove(i);
    }
    Ok(Scheme::from_words(s.dims(), w))
}

/// Finds and applies the first general reduction among `active`, if any.
pub fn general_reduction(s: &Scheme, active: &[usize]) -> Option<Scheme> {
    let red = find_general_reduction(s, active)?;
    Some(apply_general_reduction(s, red.slot, &red.group).expect("found reduction is legal"))
}

/// Every legal plus transition among `active`, ordered by slot, then `i`, then `j`.
pub fn enumerate_plus_pairs(s: &Scheme, active: &[usize]) -> Vec<PlusMove> {
    let w = s.words();
    let act = sorted_active(s, active);
    let mut out = Vec::new();
    for slot in Slot::ALL {
        for &i in &act {
            for &j in &act {
                if i != j && plus_is_legal(&w[i], &w[j]) {
                    out.push(PlusMove { slot, i, j });
                }
            }
        }
    }
    out
}

/// Rank-increasing rewrite of two fully distinct terms (with `a = slot`,
/// `b = next`, `c = third`):
///
/// ```text
/// a_i⊗b_i⊗c_i + a_j⊗b_j⊗c_j
///   → a_i⊗(b_i+b_j)⊗c_i + a_i⊗b_j⊗(c_j+c_i) + (a_j+a_i)⊗b_j⊗c_j
/// ```
///
/// Terms `i` and `j` are rewritten in place and the third term is appended.
pub fn apply_plus(s: &Scheme, mv: PlusMove) -> Result<Scheme> {
    check_index(s, mv.i)?;
    check_index(s, mv.j)?;
    let mut w = s.words();
    if mv.i == mv.j || !plus_is_legal(&w[mv.i], &w[mv.j]) {
        return Err(illegal(format!(
            "terms {} and {} must differ in every component",
            mv.i, mv.j
        )));
    }
    let extra = plus_words(&mut w, mv.slot.index(), mv.i, mv.j);
    w.push(extra);
    Ok(Scheme::from_words(s.dims(), w))
}

/// `x⊗b⊗c → donor⊗b⊗c + (x+donor)⊗b⊗c` on the given slot, where the donor must
/// already occur as that slot's component somewhere in the scheme. The term at
/// `idx` takes the donor and the remainder is appended.
pub fn apply_split(s: &Scheme, idx: usize, slot: Slot, donor: BitVector) -> Result<Scheme> {
    check_index(s, idx)?;
    if donor.len() != s.dims().len(slot) {
        return Err(Error::DimensionMismatch {
            expected: s.dims().len(slot),
            found: donor.len(),
        });
    }
    let cur = s.terms()[idx].component(slot);
    if donor.is_zero() {
        return Err(illegal("split donor is zero"));
    }
    if donor == cur {
        return Err(illegal("split donor equals the component being split"));
    }
    if !s.terms().iter().any(|t| t.component(slot) == donor) {
        return Err(illegal(format!("donor {donor} is not a {slot} component of the scheme")));
    }
    let mut terms: Vec<Term> = s.terms().to_vec();
    let mut rest = terms[idx];
    rest.set_component(slot, cur ^ donor);
    terms[idx].set_component(slot, donor);
    terms.push(rest);
    Ok(Scheme::from_words(s.dims(), terms.iter().map(Term::words)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{standard_scheme, strassen_scheme, Dims};

    fn all(s: &Scheme) -> Vec<usize> {
        (0..s.rank()).collect()
    }

    fn bv(s: &str) -> BitVector {
        BitVector::from_bit_str(s).unwrap()
    }

    /// Independent flip count: for each slot and ordered pair, compare the
    /// printed components.
    fn flip_oracle(s: &Scheme) -> usize {
        let t = s.terms();
        let mut count = 0;
        for slot in Slot::ALL {
            for i in 0..t.len() {
                for j in 0..t.len() {
                    let c = |k: usize, sl: Slot| t[k].component(sl).to_bit_string();
                    if i != j
                        && c(i, slot) == c(j, slot)
                        && c(i, slot.next()) != c(j, slot.next())
                        && c(i, slot.third()) != c(j, slot.third())
                    {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    fn plus_oracle(s: &Scheme) -> usize {
        let t = s.terms();
        let mut count = 0;
        for i in 0..t.len() {
            for j in 0..t.len() {
                if i != j && Slot::ALL.iter().all(|&sl| t[i].component(sl) != t[j].component(sl)) {
                    count += 1;
                }
            }
        }
        3 * count
    }

    #[test]
    fn flip_enumeration_standard_222() {
        let s = standard_scheme(2, 2, 2).unwrap();
        let flips = enumerate_flips(&s, &all(&s));
        assert_eq!(flip_oracle(&s), 24);
        assert_eq!(flips.len(), 24);
        // ordered by slot, then i, then j
        let keys: Vec<_> = flips.iter().map(|f| (f.slot, f.i, f.j)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn flip_enumeration_strassen() {
        let s = strassen_scheme();
        // every slot's seven components are distinct: no flip exists
        let flips = enumerate_flips(&s, &all(&s));
        assert_eq!(flip_oracle(&s), 0);
        assert!(flips.is_empty());
        assert!(!enumerate_plus_pairs(&s, &all(&s)).is_empty());
    }

    #[test]
    fn no_flips_when_components_distinct() {
        let d = Dims::new(2, 2, 2).unwrap();
        let t = |a: &str, b: &str, c: &str| Term::new(bv(a), bv(b), bv(c));
        let s = Scheme::new(d, vec![t("1000", "1000", "1000"), t("0100", "0100", "0100")]).unwrap();
        assert!(enumerate_flips(&s, &all(&s)).is_empty());
    }

    #[test]
    fn flip_on_shared_a11() {
        let s = standard_scheme(2, 2, 2).unwrap();
        // term 0 = a11 b11 c11, term 2 = a11 b12 c21
        assert_eq!(format!("{:?}", s.terms()[2]), "1000 0100 0010");
        let f = apply_flip(&s, FlipMove { slot: Slot::Alpha, i: 0, j: 2 }).unwrap();
        assert_eq!(f.terms()[0].beta.to_bit_string(), "1100");
        assert_eq!(f.terms()[2].gamma.to_bit_string(), "1010");
        assert!(f.verify());
        assert_eq!(f.rank(), 8);
        for k in [1, 3, 4, 5, 6, 7] {
            assert_eq!(f.terms()[k], s.terms()[k]);
        }
    }

    #[test]
    fn flip_then_reverse_orientation_restores() {
        let s = standard_scheme(2, 2, 2).unwrap();
        let f = apply_flip(&s, FlipMove { slot: Slot::Alpha, i: 0, j: 2 }).unwrap();
        // second flip with the same anchor undoes the change in two steps
        let g = apply_flip(&f, FlipMove { slot: Slot::Alpha, i: 0, j: 2 }).unwrap();
        assert!(g.verify());
        let h = apply_flip(&g, FlipMove { slot: Slot::Alpha, i: 2, j: 0 }).unwrap();
        assert!(h.verify());
    }

    #[test]
    fn illegal_flips_rejected() {
        let s = standard_scheme(2, 2, 2).unwrap();
        assert!(apply_flip(&s, FlipMove { slot: Slot::Alpha, i: 0, j: 0 }).is_err());
        assert!(apply_flip(&s, FlipMove { slot: Slot::Alpha, i: 0, j: 1 }).is_err());
        assert!(apply_flip(&s, FlipMove { slot: Slot::Alpha, i: 0, j: 99 }).is_err());
    }

    #[test]
    fn pairwise_reductions() {
        let s = standard_scheme(2, 2, 2).unwrap();
        assert!(find_pairwise_reductions(&s, &all(&s)).is_empty());

        let d = Dims::new(2, 2, 2).unwrap();
        let t = |a: &str, b: &str, c: &str| Term::new(bv(a), bv(b), bv(c));
        let s = Scheme::new(d, vec![t("1000", "1000", "1000"), t("1000", "1000", "0100")]).unwrap();
        let pairs = find_pairwise_reductions(&s, &all(&s));
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].shared, vec![Slot::Alpha, Slot::Beta]);
        let r = apply_pairwise_reduction(&s, 0, 1).unwrap();
        assert_eq!(r.rank(), 1);
        assert_eq!(r.terms()[0].gamma.to_bit_string(), "1100");

        let s = Scheme::new(d, vec![t("1000", "1000", "1000"), t("1000", "1000", "1000")]).unwrap();
        assert_eq!(find_pairwise_reductions(&s, &all(&s)).len(), 1);
        assert_eq!(apply_pairwise_reduction(&s, 1, 0).unwrap().rank(), 0);

        let s = standard_scheme(2, 2, 2).unwrap();
        assert!(apply_pairwise_reduction(&s, 0, 1).is_err());
    }

    #[test]
    fn pairwise_reduction_preserves_sum() {
        // split then merge back: a valid scheme with a reducible pair
        let s = standard_scheme(2, 2, 2).unwrap();
        let donor = s.terms()[7].alpha;
        let sp = apply_split(&s, 0, Slot::Alpha, donor).unwrap();
        let pairs = find_pairwise_reductions(&sp, &all(&sp));
        assert!(!pairs.is_empty());
        for p in pairs {
            let r = apply_pairwise_reduction(&sp, p.i, p.j).unwrap();
            assert!(r.verify());
            assert!(r.rank() < sp.rank());
        }
    }

    #[test]
    fn general_reduction_examples() {
        let s = standard_scheme(2, 2, 2).unwrap();
        assert!(general_reduction(&s, &all(&s)).is_none());

        // a⊗b1⊗c1 + a⊗b2⊗c2 + a⊗(b1+b2)⊗(c1+c2): summed outer products have rank 2
        let d = Dims::new(2, 2, 2).unwrap();
        let a = bv("1000");
        let (b1, b2, c1, c2) = (bv("1000"), bv("0100"), bv("0010"), bv("0001"));
        let s = Scheme::new(
            d,
            vec![
                Term::new(a, b1, c1),
                Term::new(a, b2, c2),
                Term::new(a, b1 ^ b2, c1 ^ c2),
            ],
        )
        .unwrap();
        let m: Vec<u64> = {
            let w = s.words();
            group_outer_sum(&w, &[0, 1, 2], 0, 4)
        };
        assert_eq!(rank_of_words(&m), 2);
        let red = find_general_reduction(&s, &all(&s)).unwrap();
        assert_eq!((red.slot, red.group.clone(), red.rank), (Slot::Alpha, vec![0, 1, 2], 2));
        let r = general_reduction(&s, &all(&s)).unwrap();
        assert_eq!(r.rank(), 2);
        // the summed tensor is unchanged
        let tensor = |s: &Scheme| {
            let mut t = vec![0u64; 16];
            for term in s.terms() {
                for x in term.alpha.ones() {
                    for y in term.beta.ones() {
                        t[x * 4 + y] ^= term.gamma.bits();
                    }
                }
            }
            t
        };
        assert_eq!(tensor(&r), tensor(&s));
    }

    #[test]
    fn general_reduction_fires_on_pairwise_pairs() {
        let s = standard_scheme(2, 2, 2).unwrap();
        let sp = apply_split(&s, 0, Slot::Alpha, s.terms()[7].alpha).unwrap();
        assert!(!find_pairwise_reductions(&sp, &all(&sp)).is_empty());
        let r = general_reduction(&sp, &all(&sp)).unwrap();
        assert!(r.verify());
        assert_eq!(r.rank(), 8);
    }

    #[test]
    fn plus_enumeration_matches_oracle() {
        for s in [standard_scheme(2, 2, 2).unwrap(), strassen_scheme()] {
            assert_eq!(enumerate_plus_pairs(&s, &all(&s)).len(), plus_oracle(&s));
        }
        let d = Dims::new(2, 2, 2).unwrap();
        let t = Term::new(bv("1000"), bv("1000"), bv("1000"));
        let s = Scheme::new(d, vec![t, t]).unwrap();
        assert!(enumerate_plus_pairs(&s, &all(&s)).is_empty());
    }

    #[test]
    fn plus_on_diagonal_terms() {
        let s = standard_scheme(2, 2, 2).unwrap();
        // a11 b11 c11 is term 0; a22 b22 c22 is term 7
        assert_eq!(format!("{:?}", s.terms()[7]), "0001 0001 0001");
        for slot in Slot::ALL {
            let p = apply_plus(&s, PlusMove { slot, i: 0, j: 7 }).unwrap();
            assert_eq!(p.rank(), 9);
            assert!(p.verify());
            assert!(p.terms().iter().all(|t| !t.has_zero_component()));
        }
        assert!(apply_plus(&s, PlusMove { slot: Slot::Alpha, i: 0, j: 2 }).is_err());
    }

    #[test]
    fn plus_is_undone_within_one_flip() {
        let s = strassen_scheme();
        for mv in enumerate_plus_pairs(&s, &all(&s)) {
            let p = apply_plus(&s, mv).unwrap();
            let direct = !find_pairwise_reductions(&p, &all(&p)).is_empty();
            let after_flip = enumerate_flips(&p, &all(&p)).into_iter().any(|f| {
                let q = apply_flip(&p, f).unwrap();
                !find_pairwise_reductions(&q, &all(&q)).is_empty()
            });
            assert!(direct || after_flip, "{mv:?}");
        }
    }

    #[test]
    fn split_examples() {
        let s = standard_scheme(2, 2, 2).unwrap();
        let a22 = s.terms()[7].alpha;
        let sp = apply_split(&s, 0, Slot::Alpha, a22).unwrap();
        assert_eq!(sp.rank(), 9);
        assert!(sp.verify());
        assert_eq!(format!("{:?}", sp.terms()[0]), "0001 1000 1000");
        assert_eq!(format!("{:?}", sp.terms()[8]), "1001 1000 1000");

        assert!(apply_split(&s, 0, Slot::Alpha, s.terms()[0].alpha).is_err());
        assert!(apply_split(&s, 0, Slot::Alpha, BitVector::zero(4).unwrap()).is_err());
        assert!(apply_split(&s, 0, Slot::Alpha, bv("1100")).is_err());
    }

    #[test]
    fn move_display() {
        let m = Move::Split { idx: 3, slot: Slot::Gamma, donor: bv("0110") };
        assert_eq!(m.to_string(), "split gamma 3 0110");
        let m = Move::GeneralReduce { slot: Slot::Beta, group: vec![1, 4, 5] };
        assert_eq!(m.to_string(), "greduce beta 1 4 5");
    }
}
