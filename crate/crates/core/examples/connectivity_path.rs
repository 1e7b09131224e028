//! An explicit move sequence from the standard 2x2x2 algorithm to Strassen's scheme.

use flipgraph::io::serialize_script;
use flipgraph::witness::path_rank_bound;
use flipgraph::{connectivity_path, standard_scheme, strassen_scheme};

fn main() -> flipgraph::Result<()> {
    let src = standard_scheme(2, 2, 2)?;
    let dst = strassen_scheme();
    let script = connectivity_path(&src, &dst)?;
    let (end, peak) = script.replay()?;
    assert_eq!(end, dst);
    println!(
        "{} moves, peak rank {peak} (bound {})",
        script.len(),
        path_rank_bound(&src, &dst)
    );
    print!("{}", serialize_script(&script));
    Ok(())
}
