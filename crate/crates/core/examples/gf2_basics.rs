//! Rank, solving and rank-one factorization over GF(2).

use flipgraph::{gf2_rank, gf2_rank_one_factorization, gf2_solve, BitVector, Gf2Matrix};

fn main() -> flipgraph::Result<()> {
    let m = Gf2Matrix::from_bit_strs(&["1100", "0110", "1010", "0001"])?;
    println!("matrix {m:?} has rank {}", gf2_rank(&m));

    // rows 0 and 1 sum to row 2
    let target = BitVector::from_bit_str("1011")?;
    match gf2_solve(&m, target)? {
        Some(x) => println!("{} = combination {} of the rows", target.to_bit_string(), x.to_bit_string()),
        None => println!("{} is not in the row span", target.to_bit_string()),
    }

    let f = gf2_rank_one_factorization(&m);
    let mut sum = Gf2Matrix::zeros(m.rows(), m.cols())?;
    for (u, v) in &f {
        println!("  {} ⊗ {}", u.to_bit_string(), v.to_bit_string());
        sum.xor_assign(&Gf2Matrix::outer(*u, *v));
    }
    assert_eq!(sum, m);
    println!("{} outer products sum back to the matrix", f.len());
    Ok(())
}
