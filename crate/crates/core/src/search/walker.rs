//! Incremental random-walk state for the search loop.
//!
//! Active terms are indexed by component value per slot. Every decision the
//! walker makes depends only on the term list (bucket members are kept sorted
//! by term index), so rebuilding the index from a snapshot reproduces the
//! exact same trajectory.

use rand::Rng;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::gf2::{rank_of_words, rank_one_factors};
use crate::moves::{flip_is_legal, plus_is_legal, shared_slots};
use crate::scheme::{Dims, Scheme};

type Bucket = SmallVec<[u32; 8]>;

/// Rank change caused by one elementary move inside a search iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveEvent {
    Flip,
    /// Two terms sharing two components merged into one.
    Merge,
    /// Two identical terms cancelled.
    Cancel,
    /// A group of `group` terms replaced by `rank` terms.
    GeneralReduction { group: usize, rank: usize },
    Plus,
}

impl MoveEvent {
    pub fn rank_delta(self) -> isize {
        match self {
            MoveEvent::Flip => 0,
            MoveEvent::Merge => -1,
            MoveEvent::Cancel => -2,
            MoveEvent::GeneralReduction { group, rank } => rank as isize - group as isize,
            MoveEvent::Plus => 1,
        }
    }
}

#[derive(Clone)]
pub(crate) struct Walker {
    dims: Dims,
    pub(crate) terms: Vec<[u64; 3]>,
    pub(crate) frozen: Vec<[u64; 3]>,
    buckets: [FxHashMap<u64, Bucket>; 3],
    /// partners[t][s] = (size of t's bucket in slot s) - 1
    partners: Vec<[u32; 3]>,
    /// Σ partners = number of ordered same-component pairs over all slots
    total: u64,
    pub(crate) dirty: Vec<u32>,
}

impl Walker {
    pub(crate) fn new(dims: Dims, active: Vec<[u64; 3]>, frozen: Vec<[u64; 3]>) -> Self {
        let mut w = Self {
            dims,
            terms: Vec::with_capacity(active.len() + 16),
            frozen,
            buckets: Default::default(),
            partners: Vec::with_capacity(active.len() + 16),
            total: 0,
            dirty: Vec::new(),
        };
        for t in active {
            w.push_term(t);
        }
        w.dirty = (0..w.terms.len() as u32).rev().collect();
        w
    }

    /// Splits `all` into terms inside the leading `box_dims` blocks and the rest.
    pub(crate) fn partitioned(dims: Dims, box_dims: Dims, all: &[[u64; 3]]) -> Self {
        let masks = crate::scheme::box_masks(dims, box_dims);
        let inside = |t: &[u64; 3]| (0..3).all(|s| t[s] & !masks[s] == 0);
        let (active, frozen): (Vec<_>, Vec<_>) = all.iter().partition(|t| inside(t));
        Self::new(dims, active, frozen)
    }

    pub(crate) fn rank(&self) -> usize {
        self.terms.len() + self.frozen.len()
    }

    /// Active terms followed by frozen terms.
    pub(crate) fn all_words(&self) -> Vec<[u64; 3]> {
        let mut v = Vec::with_capacity(self.rank());
        v.extend_from_slice(&self.terms);
        v.extend_from_slice(&self.frozen);
        v
    }

    pub(crate) fn scheme(&self) -> Scheme {
        Scheme::from_words(self.dims, self.all_words())
    }

    fn bucket_add(&mut self, t: usize, s: usize) {
        let key = self.terms[t][s];
        let b = self.buckets[s].entry(key).or_default();
        for &u in b.iter() {
            self.partners[u as usize][s] += 1;
        }
        self.partners[t][s] = b.len() as u32;
        self.total += 2 * b.len() as u64;
        let pos = b.partition_point(|&u| u < t as u32);
        b.insert(pos, t as u32);
    }

    fn bucket_remove(&mut self, t: usize, s: usize) {
        let key = self.terms[t][s];
        let b = self.buckets[s].get_mut(&key).expect("term is indexed");
        let pos = b.binary_search(&(t as u32)).expect("term is in its bucket");
        b.remove(pos);
        for &u in b.iter() {
            self.partners[u as usize][s] -= 1;
        }
        self.total -= 2 * b.len() as u64;
        self.partners[t][s] = 0;
        if b.is_empty() {
            self.buckets[s].remove(&key);
        }
    }

    fn set_component(&mut self, t: usize, s: usize, value: u64) {
        debug_assert_ne!(value, 0);
        self.bucket_remove(t, s);
        self.terms[t][s] = value;
        self.bucket_add(t, s);
    }

    fn push_term(&mut self, t: [u64; 3]) -> usize {
        let idx = self.terms.len();
        self.terms.push(t);
        self.partners.push([0; 3]);
        for s in 0..3 {
            self.bucket_add(idx, s);
        }
        idx
    }

    /// Swap-remove: the last active term moves into `t`.
    fn remove_term(&mut self, t: usize) {
        for s in 0..3 {
            self.bucket_remove(t, s);
        }
        let last = self.terms.len() - 1;
        if t != last {
            for s in 0..3 {
                let b = self.buckets[s]
                    .get_mut(&self.terms[last][s])
                    .expect("term is indexed");
                let pos = b.binary_search(&(last as u32)).unwrap();
                b.remove(pos);
                let ins = b.partition_point(|&u| u < t as u32);
                b.insert(ins, t as u32);
            }
            self.terms[t] = self.terms[last];
            self.partners[t] = self.partners[last];
        }
        self.terms.pop();
        self.partners.pop();
        let (t, last) = (t as u32, last as u32);
        self.dirty.retain(|&d| d != t);
        for d in self.dirty.iter_mut() {
            if *d == last {
                *d = t;
            }
        }
    }

    fn bucket(&self, s: usize, key: u64) -> &[u32] {
        self.buckets[s].get(&key).map(|b| b.as_slice()).unwrap_or(&[])
    }

    /// Uniformly random legal flip among active terms, as `(slot, i, j)`.
    pub(crate) fn sample_flip<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(usize, usize, usize)> {
        if self.total == 0 {
            return None;
        }
        // Pairs that would zero a component only exist while a reducible pair
        // is pending; reject them and fall back to enumeration if that persists.
        for _ in 0..64 {
            let mut r = rng.random_range(0..self.total);
            let (t, s) = 'scan: {
                for (t, p) in self.partners.iter().enumerate() {
                    for (s, &k) in p.iter().enumerate() {
                        let k = k as u64;
                        if r < k {
                            break 'scan (t, s);
                        }
                        r -= k;
                    }
                }
                unreachable!("partner counts sum to total");
            };
            let j = self
                .bucket(s, self.terms[t][s])
                .iter()
                .copied()
                .filter(|&u| u as usize != t)
                .nth(r as usize)
                .expect("rank within bucket") as usize;
            if flip_is_legal(&self.terms[t], &self.terms[j], s) {
                return Some((s, t, j));
            }
        }
        let legal = self.legal_flips();
        if legal.is_empty() {
            None
        } else {
            Some(legal[rng.random_range(0..legal.len())])
        }
    }

    fn legal_flips(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for s in 0..3 {
            for t in 0..self.terms.len() {
                for &u in self.bucket(s, self.terms[t][s]) {
                    let u = u as usize;
                    if u != t && flip_is_legal(&self.terms[t], &self.terms[u], s) {
                        out.push((s, t, u));
                    }
                }
            }
        }
        out
    }

    pub(crate) fn apply_flip(&mut self, s: usize, i: usize, j: usize) {
        let (nx, th) = ((s + 1) % 3, (s + 2) % 3);
        let vi = self.terms[i][nx] ^ self.terms[j][nx];
        self.set_component(i, nx, vi);
        let vj = self.terms[j][th] ^ self.terms[i][th];
        self.set_component(j, th, vj);
        self.dirty.push(i as u32);
        self.dirty.push(j as u32);
    }

    fn find_reducible_partner(&self, t: usize) -> Option<usize> {
        let me = &self.terms[t];
        for s in 0..3 {
            let (nx, th) = ((s + 1) % 3, (s + 2) % 3);
            for &u in self.bucket(s, me[s]) {
                let u = u as usize;
                if u != t && (self.terms[u][nx] == me[nx] || self.terms[u][th] == me[th]) {
                    return Some(u);
                }
            }
        }
        None
    }

    /// Merges every pair of active terms that share two components, starting
    /// from the terms touched since the last call.
    pub(crate) fn reduce_pending(&mut self, events: &mut Vec<MoveEvent>) {
        while let Some(t) = self.dirty.pop() {
            let t = t as usize;
            if t >= self.terms.len() {
                continue;
            }
            let Some(u) = self.find_reducible_partner(t) else {
                continue;
            };
            let (lo, hi) = (t.min(u), t.max(u));
            let sh = shared_slots(&self.terms[lo], &self.terms[hi]);
            if sh.iter().all(|&b| b) {
                self.remove_term(hi);
                self.remove_term(lo);
                events.push(MoveEvent::Cancel);
            } else {
                let d = sh.iter().position(|&b| !b).unwrap();
                let v = self.terms[lo][d] ^ self.terms[hi][d];
                self.set_component(lo, d, v);
                self.remove_term(hi);
                self.dirty.push(lo as u32);
                events.push(MoveEvent::Merge);
            }
        }
    }

    /// Number of legal plus transitions (ordered pairs times three slots).
    fn plus_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.terms.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && plus_is_legal(&self.terms[i], &self.terms[j]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Applies a uniformly random plus transition. Returns false if none is legal.
    pub(crate) fn random_plus<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let pairs = self.plus_pairs();
        if pairs.is_empty() {
            return false;
        }
        let k = rng.random_range(0..3 * pairs.len());
        let (s, (i, j)) = (k / pairs.len(), pairs[k % pairs.len()]);
        self.apply_plus(s, i, j);
        true
    }

    pub(crate) fn apply_plus(&mut self, s: usize, i: usize, j: usize) {
        let (nx, th) = ((s + 1) % 3, (s + 2) % 3);
        let (ti, tj) = (self.terms[i], self.terms[j]);
        let mut extra = tj;
        extra[s] = tj[s] ^ ti[s];
        self.set_component(j, s, ti[s]);
        self.set_component(j, th, tj[th] ^ ti[th]);
        self.set_component(i, nx, ti[nx] ^ tj[nx]);
        let e = self.push_term(extra);
        self.dirty.extend([i as u32, j as u32, e as u32]);
    }

    /// Applies the first rank-deficient same-component group, scanning slots in
    /// order and groups by their smallest member.
    pub(crate) fn general_reduction(&mut self) -> Option<MoveEvent> {
        let lens = self.dims.lens();
        for s in 0..3 {
            let (nx, th) = ((s + 1) % 3, (s + 2) % 3);
            for t in 0..self.terms.len() {
                let group = self.bucket(s, self.terms[t][s]);
                if group.len() < 2 || group[0] as usize != t {
                    continue;
                }
                let mut m = vec![0u64; lens[nx]];
                for &g in group {
                    let g = &self.terms[g as usize];
                    let mut b = g[nx];
                    while b != 0 {
                        m[b.trailing_zeros() as usize] ^= g[th];
                        b &= b - 1;
                    }
                }
                if rank_of_words(&m) >= group.len() {
                    continue;
                }
                let group: Vec<usize> = group.iter().map(|&g| g as usize).collect();
                let factors = rank_one_factors(&m, lens[th]);
                for (k, &(col, row)) in factors.iter().enumerate() {
                    self.set_component(group[k], nx, col);
                    self.set_component(group[k], th, row);
                    self.dirty.push(group[k] as u32);
                }
                for &g in group[factors.len()..].iter().rev() {
                    self.remove_term(g);
                }
                return Some(MoveEvent::GeneralReduction {
                    group: group.len(),
                    rank: factors.len(),
                });
            }
        }
        None
    }

    #[cfg(test)]
    fn check_index(&self) {
        let mut total = 0;
        for (t, term) in self.terms.iter().enumerate() {
            for (s, &w) in term.iter().enumerate() {
                let b = self.bucket(s, w);
                assert!(b.windows(2).all(|w| w[0] < w[1]));
                assert!(b.contains(&(t as u32)));
                assert_eq!(self.partners[t][s] as usize, b.len() - 1);
                total += b.len() - 1;
            }
        }
        assert_eq!(total as u64, self.total);
        let indexed: usize = self.buckets.iter().map(|m| m.values().map(|b| b.len()).sum::<usize>()).sum();
        assert_eq!(indexed, 3 * self.terms.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{standard_scheme, verify_words};
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn random_walk_keeps_index_and_sum_consistent() {
        let s = standard_scheme(3, 3, 3).unwrap();
        let mut w = Walker::new(s.dims(), s.words(), vec![]);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
        let mut events = Vec::new();
        for step in 0..3000 {
            let before = w.rank() as isize;
            events.clear();
            if let Some((sl, i, j)) = w.sample_flip(&mut rng) {
                w.apply_flip(sl, i, j);
                events.push(MoveEvent::Flip);
            }
            w.reduce_pending(&mut events);
            if step % 97 == 0 {
                assert!(w.random_plus(&mut rng));
                events.push(MoveEvent::Plus);
            }
            if step % 31 == 0 {
                if let Some(e) = w.general_reduction() {
                    events.push(e);
                    w.reduce_pending(&mut events);
                }
            }
            let delta: isize = events.iter().map(|e| e.rank_delta()).sum();
            assert_eq!(w.rank() as isize - before, delta);
            w.check_index();
            assert!(verify_words(w.dims, w.all_words()));
        }
    }

    #[test]
    fn flip_sampling_is_uniform_over_legal_flips() {
        let s = standard_scheme(2, 2, 2).unwrap();
        let w = Walker::new(s.dims(), s.words(), vec![]);
        let legal = w.legal_flips();
        assert_eq!(legal.len(), 24);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let mut counts = std::collections::HashMap::new();
        let draws = 240_000;
        for _ in 0..draws {
            *counts.entry(w.sample_flip(&mut rng).unwrap()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 24);
        for c in counts.values() {
            // expected 10_000 each; 5 sigma is about 500
            assert!((*c as i64 - 10_000).abs() < 600, "{c}");
        }
    }

    #[test]
    fn partition_by_box() {
        let s = standard_scheme(3, 3, 3).unwrap();
        let w = Walker::partitioned(s.dims(), Dims::new(2, 2, 2).unwrap(), &s.words());
        assert_eq!(w.terms.len(), 8);
        assert_eq!(w.frozen.len(), 19);
    }
}
