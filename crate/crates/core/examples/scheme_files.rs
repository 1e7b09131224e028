//! Scheme file round trip. With a directory argument, writes the standard
//! 2x2x2 and Strassen schemes there.

use flipgraph::io::{parse_scheme, serialize_scheme, write_scheme};
use flipgraph::{standard_scheme, strassen_scheme};

fn main() -> flipgraph::Result<()> {
    let s = strassen_scheme();
    let text = serialize_scheme(&s);
    print!("{text}");
    assert_eq!(parse_scheme(&text)?, s);

    let broken = text.replacen("rank 7", "rank 6", 1);
    println!("tampered file: {}", parse_scheme(&broken).unwrap_err());

    if let Some(dir) = std::env::args().nth(1) {
        let dir = std::path::Path::new(&dir);
        write_scheme(&dir.join("standard222.mms"), &standard_scheme(2, 2, 2)?)?;
        write_scheme(&dir.join("strassen.mms"), &s)?;
        println!("wrote fixtures to {}", dir.display());
    }
    Ok(())
}
