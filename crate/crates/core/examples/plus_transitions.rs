//! 4x4x4 with and without plus transitions.
//!
//! `cargo run --release --example plus_transitions -- [iterations] [seeds]`

use flipgraph::scheme::Dims;
use flipgraph::search::{run_jobs, PlusPolicy};
use flipgraph::{standard_scheme, SearchParams};

fn main() -> flipgraph::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("number"));
    let iters = args.next().unwrap_or(200_000);
    let seeds = args.next().unwrap_or(4) as usize;
    let start = standard_scheme(4, 4, 4)?;
    for policy in [PlusPolicy::Off, PlusPolicy::FinalStage] {
        let mut p = SearchParams::new(Dims::new(4, 4, 4)?, iters).with_seed(1);
        p.plus_policy = policy;
        let outs = run_jobs(&p, &start, seeds)?;
        let ranks: Vec<_> = outs.iter().map(|o| o.best.rank()).collect();
        let plus: u64 = outs.iter().map(|o| o.stats.plus_transitions).sum();
        println!("{policy:?}: best ranks {ranks:?}, {plus} plus transitions");
    }
    Ok(())
}
