#![allow(dead_code)]

use flipgraph::moves::{apply_plus, enumerate_plus_pairs};
use flipgraph::scheme::{Dims, Scheme, Slot};
use flipgraph::BitVector;
use flipgraph::search::random_search_step;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// A valid scheme reached from `start` by `steps` random flips, with a plus
/// transition mixed in now and then.
pub fn random_scheme(start: &Scheme, steps: usize, seed: u64) -> Scheme {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut s = start.clone();
    let dims: Dims = s.dims();
    for _ in 0..steps {
        if rng.random_range(0..10) == 0 {
            let all: Vec<usize> = (0..s.rank()).collect();
            let pairs = enumerate_plus_pairs(&s, &all);
            if !pairs.is_empty() {
                let mv = pairs[rng.random_range(0..pairs.len())];
                s = apply_plus(&s, mv).unwrap();
                continue;
            }
        }
        s = random_search_step(&s, &mut rng, dims).unwrap();
    }
    s
}

/// A copy of `s` with one random defect: a flipped bit, a dropped term, an
/// extra term, or a doubled term (which leaves the tensor unchanged).
pub fn corrupt<R: Rng + ?Sized>(s: &Scheme, rng: &mut R) -> Scheme {
    let mut terms = s.terms().to_vec();
    match rng.random_range(0..4) {
        0 => loop {
            let t = rng.random_range(0..terms.len());
            let slot = Slot::ALL[rng.random_range(0..3)];
            let v = terms[t].component(slot);
            let flipped = BitVector::new(v.len(), v.bits() ^ 1 << rng.random_range(0..v.len())).unwrap();
            if !flipped.is_zero() {
                terms[t].set_component(slot, flipped);
                break;
            }
        },
        1 if terms.len() > 1 => {
            terms.remove(rng.random_range(0..terms.len()));
        }
        2 => {
            let t = terms[rng.random_range(0..terms.len())];
            let slot = Slot::ALL[rng.random_range(0..3)];
            let mut extra = t;
            let v = t.component(slot);
            let other = BitVector::new(v.len(), rng.random_range(1..1u64 << v.len())).unwrap();
            extra.set_component(slot, other);
            terms.push(extra);
        }
        _ => {
            let t = terms[rng.random_range(0..terms.len())];
            terms.push(t);
            terms.push(t);
        }
    }
    Scheme::new(s.dims(), terms).unwrap()
}
