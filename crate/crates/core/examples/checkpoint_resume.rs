//! Stop a search half way, save it, restore it and finish: the result is the
//! same as an uninterrupted run.

use flipgraph::scheme::Dims;
use flipgraph::search::Checkpoint;
use flipgraph::{standard_scheme, Search, SearchParams};

fn main() -> flipgraph::Result<()> {
    let start = standard_scheme(3, 3, 3)?;
    let p = SearchParams::new(Dims::new(3, 3, 3)?, 200_000)
        .with_default_schedule(200_000)
        .with_seed(5);
    let whole = Search::new(p.clone(), &start)?.run();

    let mut half = Search::new(p, &start)?;
    while half.iteration() < 100_000 {
        half.step();
    }
    let path = std::env::temp_dir().join("flipgraph-example-checkpoint.json");
    half.checkpoint()?.write(&path)?;
    drop(half);
    let resumed = Search::resume(Checkpoint::read(&path)?)?.run();
    std::fs::remove_file(&path)?;

    println!("uninterrupted best rank {}, resumed best rank {}", whole.best.rank(), resumed.best.rank());
    assert_eq!(whole.best, resumed.best);
    assert_eq!(whole.stats, resumed.stats);
    println!("identical trajectories");
    Ok(())
}
