//! Independent seeded runs on all cores; the best scheme wins.

use flipgraph::scheme::Dims;
use flipgraph::search::{best_of, job_seed, run_jobs};
use flipgraph::{standard_scheme, SearchParams};

fn main() -> flipgraph::Result<()> {
    let jobs = std::thread::available_parallelism().map_or(4, |n| n.get().max(4));
    let p = SearchParams::new(Dims::new(3, 3, 3)?, 300_000)
        .with_default_schedule(300_000)
        .with_seed(42);
    let outs = run_jobs(&p, &standard_scheme(3, 3, 3)?, jobs)?;
    for (k, o) in outs.iter().enumerate() {
        println!("job {k} seed {:>20}: rank {}", job_seed(42, k as u64), o.best.rank());
    }
    println!("best rank {}", best_of(&outs).expect("jobs").best.rank());
    Ok(())
}
