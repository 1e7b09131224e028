//! Plain flip graph walk on 2x2x2 from the standard algorithm down to rank 7.
//!
//! `cargo run --release --example random_walk -- [seed]`

use flipgraph::scheme::Dims;
use flipgraph::search::PlusPolicy;
use flipgraph::{standard_scheme, Search, SearchParams};

fn main() -> flipgraph::Result<()> {
    let seed = std::env::args().nth(1).map_or(Ok(0), |s| s.parse()).expect("seed");
    let mut p = SearchParams::new(Dims::new(2, 2, 2)?, 100_000).with_seed(seed);
    p.plus_policy = PlusPolicy::Off;
    p.target_rank = Some(7);
    let start = standard_scheme(2, 2, 2)?;
    let mut last = start.rank();
    let out = Search::new(p, &start)?.run_observed(|v| {
        if v.rank != last {
            println!("iteration {:>6}: rank {} -> {}", v.iteration, last, v.rank);
            last = v.rank;
        }
    });
    println!("best rank {} after {} iterations", out.best.rank(), out.stats.iterations);
    for t in out.best.terms() {
        println!("  {t}");
    }
    Ok(())
}
