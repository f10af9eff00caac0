//! Generalized Zeckendorf decompositions and generalized golden strings.
//!
//! For an order `n >= 2` the crate provides
//!
//! * the sequence `F(n, 1) = ... = F(n, n) = 1`, `F(n, m + 1) = F(n, m) + F(n, m + 1 - n)`
//!   with arbitrary precision and a leftward extension ([`sequence`]),
//! * greedy n-decompositions and a brute-force uniqueness oracle ([`decomposition`]),
//! * the n-string built from `S_m = S_{m-1} S_{m-n}`, with streaming, random access
//!   and closed-form letter counts ([`nstring`]),
//! * the sets of integers having `F(n, k)` as smallest or as any summand ([`fixed_term`]),
//! * a verification harness that re-checks every identity against independent
//!   oracles ([`harness`]).

pub mod decomposition;
pub mod error;
pub mod fixed_term;
pub mod harness;
pub mod nstring;
pub mod sequence;

pub use decomposition::{
    brute_force_decompositions, decompose, recompose, try_decompose, Decomposition,
};
pub use error::{Error, Result};
pub use fixed_term::{
    q_oracle, q_sequence, q_sequence_up_to, table1_rows, telescoping_identity, z_oracle, z_set,
    z_set_blocks, QStream, ZSetSpec,
};
pub use harness::{CheckId, CheckReport, Harness, HarnessConfig};
pub use nstring::{
    block, char_at, count_block, count_prefix, count_prefix_scan, prefix_by_decomposition, stream,
    stream_prefix, Letter, LetterCounts, LetterString, NStream,
};
pub use sequence::{Limits, SequenceTable};
