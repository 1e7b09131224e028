//! The standard algorithm and Strassen's scheme, checked two independent ways.

use flipgraph::{brute_force_verify, standard_scheme, strassen_scheme};

fn main() -> flipgraph::Result<()> {
    for (name, s) in [
        ("standard 2x2x2", standard_scheme(2, 2, 2)?),
        ("strassen", strassen_scheme()),
        ("standard 2x3x2", standard_scheme(2, 3, 2)?),
    ] {
        println!(
            "{name}: rank {}, tensor check {}, brute force {}, component ranks {:?}",
            s.rank(),
            s.verify(),
            brute_force_verify(&s)?,
            s.component_ranks()
        );
    }
    Ok(())
}
