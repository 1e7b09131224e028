//! Matrix multiplication schemes over GF(2) and the adaptive flip graph search.
//!
//! * [`gf2`]: bit-packed vectors and matrices, rank, solving, rank-one
//!   factorization.
//! * [`scheme`]: schemes, the standard and Strassen constructions, verification.
//! * [`moves`]: flips, reductions, plus transitions and splits.
//! * [`search`]: the random walk with plus transitions, edge constraints,
//!   restarts and checkpoints.
//! * [`witness`]: brute-force verification and explicit paths between schemes.
//! * [`io`] and [`cli`]: file formats and the `flipgraph` command.

pub mod cli;
pub mod error;
pub mod gf2;
pub mod io;
pub mod moves;
pub mod scheme;
pub mod search;
pub mod witness;

pub use error::{Error, ParseError, Result};
pub use gf2::{gf2_rank, gf2_rank_one_factorization, gf2_solve, BitVector, Gf2Matrix};
pub use moves::Move;
pub use scheme::{standard_scheme, strassen_scheme, verify, Dims, Scheme, Slot, Term};
pub use search::{Search, SearchOutcome, SearchParams, SearchStats};
pub use witness::{brute_force_verify, connectivity_path, MoveScript};
