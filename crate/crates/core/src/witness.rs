//! Independent checks and explicit paths between schemes.
//!
//! [`brute_force_verify`] multiplies every pair of 0/1 matrices and shares no
//! code with the tensor verifier. [`connectivity_path`] builds a move script
//! from one scheme to another by padding with plus transitions, rewriting the
//! terms one component at a time with split chains, and cancelling what is left
//! with rank-zero group reductions.

use crate::error::{Error, Result};
use crate::gf2::{gf2_solve, rank_of_words, BitVector, Gf2Matrix};
use crate::moves::{
    enumerate_plus_pairs, find_general_reduction, find_general_reduction_on, find_pairwise_reductions,
    Move,
};
use crate::scheme::{component_ranks, Dims, Scheme, Slot};

/// Largest `n·m + m·p` accepted by [`brute_force_verify`].
pub const BRUTE_FORCE_MAX_BITS: usize = 20;

/// Largest `n·m·p` accepted by [`connectivity_path`].
pub const PATH_MAX_VOLUME: usize = 12;

const MAX_TAIL_STEPS: usize = 10_000;

/// Checks `s` by evaluating it on every pair of 0/1 matrices.
pub fn brute_force_verify(s: &Scheme) -> Result<bool> {
    let Dims { n, m, p } = s.dims();
    let bits = n * m + m * p;
    if bits > BRUTE_FORCE_MAX_BITS {
        return Err(Error::TooLargeForBruteForce { bits });
    }
    let parity = |x: u64| x.count_ones() & 1 == 1;
    let terms: Vec<(u64, u64, u64)> = s
        .terms()
        .iter()
        .map(|t| (t.alpha.bits(), t.beta.bits(), t.gamma.bits()))
        .collect();
    for a in 0u64..1 << (n * m) {
        let a_at = |i: usize, j: usize| a >> (i * m + j) & 1;
        for b in 0u64..1 << (m * p) {
            let b_at = |j: usize, k: usize| b >> (j * p + k) & 1;
            // C[i][k] stored at bit k*n + i
            let mut direct = 0u64;
            for i in 0..n {
                for k in 0..p {
                    let c = (0..m).fold(0, |acc, j| acc ^ (a_at(i, j) & b_at(j, k)));
                    direct |= c << (k * n + i);
                }
            }
            let mut via = 0u64;
            for &(x, y, z) in &terms {
                if parity(x & a) && parity(y & b) {
                    via ^= z;
                }
            }
            if via != direct {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A start scheme and a list of moves from it.
#[derive(Clone, Debug, PartialEq)]
pub struct MoveScript {
    pub start: Scheme,
    pub moves: Vec<Move>,
}

impl MoveScript {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Applies every move, checking that each intermediate scheme verifies and
    /// keeps full component ranks. Returns the final scheme and the largest
    /// rank seen.
    pub fn replay(&self) -> Result<(Scheme, usize)> {
        let d = self.start.dims();
        let full = (d.n * d.m, d.m * d.p, d.p * d.n);
        let mut cur = self.start.clone();
        let mut peak = cur.rank();
        for (k, mv) in self.moves.iter().enumerate() {
            cur = mv.apply(&cur)?;
            if !cur.verify() || component_ranks(&cur) != full {
                return Err(Error::Path(format!("scheme invalid after move {k} ({mv})")));
            }
            peak = peak.max(cur.rank());
        }
        Ok((cur, peak))
    }
}

/// Loose rank ceiling for [`connectivity_path`].
pub fn path_rank_bound(src: &Scheme, dst: &Scheme) -> usize {
    let d = src.dims();
    let (a, b, c) = (d.n * d.m, d.m * d.p, d.p * d.n);
    dst.rank() + a + b + c + src.rank()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tag {
    Free,
    /// Equal to an already matched target term; never touched again.
    Held,
    /// The term currently being rewritten.
    Holder,
}

/// Scheme under construction with a tag per term, kept aligned with the
/// index effects of every move.
#[derive(Clone)]
struct Builder {
    cur: Scheme,
    tags: Vec<Tag>,
    moves: Vec<Move>,
    peak: usize,
}

impl Builder {
    fn apply(&mut self, mv: Move) -> Result<()> {
        let next = mv.apply(&self.cur)?;
        debug_assert!(next.verify(), "path move broke the scheme: {mv}");
        match &mv {
            Move::Flip(_) => {}
            Move::Reduce { i, j } => {
                let (lo, hi) = ((*i).min(*j), (*i).max(*j));
                self.tags.remove(hi);
                if next.rank() + 2 == self.cur.rank() {
                    self.tags.remove(lo);
                }
            }
            Move::GeneralReduce { group, .. } => {
                let mut g = group.clone();
                g.sort_unstable();
                let r = next.rank() + g.len() - self.cur.rank();
                for &i in g[r..].iter().rev() {
                    self.tags.remove(i);
                }
            }
            Move::Plus(_) | Move::Split { .. } => self.tags.push(Tag::Free),
        }
        self.cur = next;
        self.peak = self.peak.max(self.cur.rank());
        self.moves.push(mv);
        Ok(())
    }

    fn free(&self) -> Vec<usize> {
        (0..self.tags.len()).filter(|&i| self.tags[i] == Tag::Free).collect()
    }

    fn holder(&self) -> usize {
        self.tags.iter().position(|&t| t == Tag::Holder).expect("holder is tagged")
    }

    /// Splits `slot` of term `idx` by `donor`; returns the appended term.
    fn split(&mut self, idx: usize, slot: Slot, donor: u64) -> Result<usize> {
        let donor = BitVector::new(self.cur.dims().len(slot), donor)?;
        self.apply(Move::Split { idx, slot, donor })?;
        Ok(self.cur.rank() - 1)
    }

    /// Pairwise reductions among free terms until none is left. With
    /// `alpha_only`, only pairs sharing their alpha are merged.
    fn merge_free(&mut self, alpha_only: bool) -> Result<()> {
        loop {
            let pair = find_pairwise_reductions(&self.cur, &self.free())
                .into_iter()
                .find(|r| !alpha_only || r.shared.contains(&Slot::Alpha));
            let Some(r) = pair else { return Ok(()) };
            self.apply(Move::Reduce { i: r.i, j: r.j })?;
        }
    }

    /// Pairwise and group reductions among free terms until none applies.
    fn reduce_free(&mut self) -> Result<()> {
        loop {
            self.merge_free(false)?;
            let Some(g) = find_general_reduction(&self.cur, &self.free()) else {
                return Ok(());
            };
            self.apply(Move::GeneralReduce { slot: g.slot, group: g.group })?;
        }
    }

    /// Number of splits [`Self::rewrite`] would need to turn term `i` into
    /// `target`, counting each slot against the current scheme.
    fn rewrite_cost(&self, i: usize, target: &[u64; 3]) -> Result<usize> {
        let w = self.cur.words();
        let mut cost = 0;
        for slot in Slot::ALL {
            let si = slot.index();
            let x = w[i][si];
            if x == target[si] {
                continue;
            }
            let values = distinct_values(&w, si);
            if values.contains(&target[si]) {
                cost += 1;
                continue;
            }
            let len = self.cur.dims().len(slot);
            let basis = Gf2Matrix::from_words(len, values);
            cost += gf2_solve(&basis, BitVector::new(len, x ^ target[si])?)?
                .map_or(usize::MAX / 4, |c| c.count_ones() as usize);
        }
        Ok(cost)
    }

    /// Rewrites `slot` of the holder to `target` with a chain of splits; the
    /// term carrying the result becomes the holder.
    fn rewrite(&mut self, slot: Slot, target: u64) -> Result<()> {
        let h = self.holder();
        let si = slot.index();
        let w = self.cur.words();
        let x = w[h][si];
        if x == target {
            return Ok(());
        }
        let values = distinct_values(&w, si);
        if values.contains(&target) {
            self.split(h, slot, target)?;
            return Ok(());
        }
        let len = self.cur.dims().len(slot);
        let basis = Gf2Matrix::from_words(len, values.clone());
        let coeffs = gf2_solve(&basis, BitVector::new(len, x ^ target)?)?
            .ok_or_else(|| Error::Path(format!("{slot} components do not span the space")))?;
        let mut donors: Vec<u64> = coeffs.ones().map(|k| values[k]).collect();

        let acc = if let Some(pos) = donors.iter().position(|&d| d == x) {
            // target is a sum of other values: seed the sum on h itself, the
            // first split leaving x + donors[0] behind
            donors.remove(pos);
            self.split(h, slot, donors[0])?;
            let mut acc = h;
            for &d in &donors[1..] {
                acc = self.split(acc, slot, d)?;
            }
            acc
        } else {
            // x plus the donors; no prefix sum of the donors may equal x
            if let Some(s) = subset_summing_to(&donors, x) {
                let first = (0..donors.len()).find(|k| !s.contains(k)).expect("target is nonzero");
                donors.swap(0, first);
            }
            let mut acc = h;
            for &d in &donors {
                acc = self.split(acc, slot, d)?;
            }
            acc
        };
        self.tags[h] = Tag::Free;
        self.tags[acc] = Tag::Holder;
        Ok(())
    }
}

/// Distinct values of slot `si`, in order of first occurrence.
fn distinct_values(w: &[[u64; 3]], si: usize) -> Vec<u64> {
    let mut values: Vec<u64> = Vec::new();
    for t in w {
        if !values.contains(&t[si]) {
            values.push(t[si]);
        }
    }
    values
}

/// Indices of a subset of independent `vals` whose XOR is `x`, if any.
fn subset_summing_to(vals: &[u64], x: u64) -> Option<Vec<usize>> {
    let rows: Vec<BitVector> = vals.iter().map(|&v| BitVector::from_raw(64, v)).collect();
    let basis = Gf2Matrix::from_rows(&rows).ok()?;
    let c = gf2_solve(&basis, BitVector::from_raw(64, x)).ok()??;
    Some(c.ones().collect())
}

/// Builds a move script from `src` to `dst` (equal as multisets at the end).
pub fn connectivity_path(src: &Scheme, dst: &Scheme) -> Result<MoveScript> {
    let d = src.dims();
    if dst.dims() != d {
        return Err(Error::Path(format!("{} and {} differ in shape", d, dst.dims())));
    }
    if d.volume() > PATH_MAX_VOLUME {
        return Err(Error::Path(format!(
            "{d} is too large; paths are only built up to n·m·p = {PATH_MAX_VOLUME}"
        )));
    }
    if !src.verify() || !dst.verify() {
        return Err(Error::NotAScheme);
    }
    if src == dst {
        return Ok(MoveScript { start: src.clone(), moves: Vec::new() });
    }
    // a few holder heuristics; keep the path with the lowest peak rank
    let mut best: Option<Builder> = None;
    for pick in [Pick::MostShared, Pick::MostSharedLatest, Pick::Cheapest] {
        let Ok(b) = build(src, dst, pick) else { continue };
        if best.as_ref().is_none_or(|x| b.peak < x.peak) {
            best = Some(b);
        }
    }
    let b = best.ok_or_else(|| Error::Path("construction failed".into()))?;
    if b.cur != *dst {
        return Err(Error::Path("construction did not reach the target".into()));
    }
    Ok(MoveScript { start: src.clone(), moves: b.moves })
}

/// How the free term rewritten into the next target term is chosen.
#[derive(Clone, Copy)]
enum Pick {
    /// Most components already equal to the target, lowest index on ties.
    MostShared,
    /// Same, highest index on ties.
    MostSharedLatest,
    /// Fewest estimated splits.
    Cheapest,
}

fn build(src: &Scheme, dst: &Scheme, pick: Pick) -> Result<Builder> {
    let mut b = Builder {
        cur: src.clone(),
        tags: vec![Tag::Free; src.rank()],
        moves: Vec::new(),
        peak: src.rank(),
    };

    // pad up to the target rank
    while b.cur.rank() < dst.rank() {
        let all: Vec<usize> = (0..b.cur.rank()).collect();
        let mv = enumerate_plus_pairs(&b.cur, &all)
            .into_iter()
            .next()
            .ok_or_else(|| Error::Path("no plus transition available".into()))?;
        b.apply(Move::Plus(mv))?;
    }

    // turn one free term into each target term
    for target in dst.words() {
        let w = b.cur.words();
        let shared = |i: usize| (0..3).filter(|&s| w[i][s] == target[s]).count();
        let free = b.free();
        let h = match pick {
            Pick::MostShared => free.iter().copied().max_by_key(|&i| (shared(i), std::cmp::Reverse(i))),
            Pick::MostSharedLatest => free.iter().copied().max_by_key(|&i| (shared(i), i)),
            Pick::Cheapest => {
                let mut h = None;
                for &i in &free {
                    let c = b.rewrite_cost(i, &target)?;
                    if h.is_none_or(|(_, best)| c < best) {
                        h = Some((i, c));
                    }
                }
                h.map(|(i, _)| i)
            }
        };
        let h = h.ok_or_else(|| Error::Path("ran out of free terms".into()))?;
        b.tags[h] = Tag::Holder;
        for slot in Slot::ALL {
            b.rewrite(slot, target[slot.index()])?;
            b.reduce_free()?;
        }
        let h = b.holder();
        debug_assert_eq!(b.cur.words()[h], target);
        b.tags[h] = Tag::Held;
    }

    b.reduce_free()?;
    let mut best: Option<Builder> = None;
    for slot in Slot::ALL {
        let mut trial = b.clone();
        if cancel_tail(&mut trial, slot).is_err() {
            continue;
        }
        if best.as_ref().is_none_or(|x| trial.peak < x.peak) {
            best = Some(trial);
        }
    }
    best.ok_or_else(|| Error::Path("could not cancel the leftover terms".into()))
}

/// The free terms sum to zero. Rewrite their `slot` values over an
/// independent set of those values; each group sharing a basis value then sums
/// to zero and is removed by a rank-zero group reduction.
fn cancel_tail(b: &mut Builder, slot: Slot) -> Result<()> {
    if b.free().is_empty() {
        return Ok(());
    }
    let si = slot.index();
    let len = b.cur.dims().len(slot);
    let mut basis: Vec<u64> = Vec::new();
    for _ in 0..MAX_TAIL_STEPS {
        let w = b.cur.words();
        let free = b.free();
        // keep basis values that still occur, extend by the most frequent ones
        let mut counts: Vec<(u64, usize)> = Vec::new();
        for &i in &free {
            match counts.iter_mut().find(|(v, _)| *v == w[i][si]) {
                Some((_, c)) => *c += 1,
                None => counts.push((w[i][si], 1)),
            }
        }
        basis.retain(|v| counts.iter().any(|(c, _)| c == v));
        counts.sort_by_key(|&(_, c)| std::cmp::Reverse(c));
        for (v, _) in counts {
            if !basis.contains(&v) {
                basis.push(v);
                if rank_of_words(&basis) < basis.len() {
                    basis.pop();
                }
            }
        }
        let m = Gf2Matrix::from_words(len, basis.clone());

        // cheapest term first: fewest basis parts
        let mut best: Option<(usize, Vec<u64>)> = None;
        for &i in free.iter().filter(|&&i| !basis.contains(&w[i][si])) {
            let c = gf2_solve(&m, BitVector::new(len, w[i][si])?)?
                .ok_or_else(|| Error::Path("tail value outside its own span".into()))?;
            if best.as_ref().is_none_or(|(_, p)| (c.count_ones() as usize) < p.len()) {
                best = Some((i, c.ones().map(|k| basis[k]).collect()));
            }
        }
        let Some((i, parts)) = best else { break };
        let mut acc = i;
        for &d in &parts[..parts.len() - 1] {
            acc = b.split(acc, slot, d)?;
        }
        loop {
            let pair = find_pairwise_reductions(&b.cur, &b.free())
                .into_iter()
                .find(|r| r.shared.contains(&slot));
            if let Some(r) = pair {
                b.apply(Move::Reduce { i: r.i, j: r.j })?;
                continue;
            }
            match find_general_reduction_on(&b.cur, &b.free(), slot) {
                Some(g) => b.apply(Move::GeneralReduce { slot, group: g.group })?,
                None => break,
            }
        }
    }
    loop {
        let w = b.cur.words();
        let f = b.free();
        let Some(&first) = f.first() else { break };
        let group: Vec<usize> = f.into_iter().filter(|&i| w[i][si] == w[first][si]).collect();
        let before = b.cur.rank();
        b.apply(Move::GeneralReduce { slot, group: group.clone() })?;
        if b.cur.rank() + group.len() != before {
            return Err(Error::Path("tail group does not cancel".into()));
        }
    }
    Ok(())
}
