//! 5x5x5 under the growing-box schedule. Terms outside the current box stay frozen.
//!
//! `cargo run --release --example edge_constraints -- [total iterations] [seed]`

use flipgraph::scheme::Dims;
use flipgraph::{standard_scheme, Search, SearchParams};

fn main() -> flipgraph::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("number"));
    let total = args.next().unwrap_or(1_000_000);
    let seed = args.next().unwrap_or(0);
    let p = SearchParams::new(Dims::new(5, 5, 5)?, total)
        .with_default_schedule(total)
        .with_seed(seed);
    for (k, st) in p.schedule.iter().enumerate() {
        println!("stage {k}: box {} for {} iterations", st.constraint, st.budget);
    }
    let mut stage = usize::MAX;
    let out = Search::new(p, &standard_scheme(5, 5, 5)?)?.run_observed(|v| {
        if v.stage != stage {
            stage = v.stage;
            println!("iteration {:>8}: stage {stage}, rank {}, {} frozen terms", v.iteration, v.rank, v.frozen_len());
        }
    });
    println!("best rank {} (from {})", out.best.rank(), out.stats.initial_rank);
    Ok(())
}
