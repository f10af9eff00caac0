//! The generalized golden string.
//!
//! Blocks are seeded with `S_i = a_i` for `1 <= i <= n` and grow by
//! `S_m = S_{m-1} S_{m-n}`. From `S_n` on every block is a prefix of the next,
//! and the limit `S_inf` is the n-string. Positions are 1-based.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::decomposition::{decompose, try_decompose};
use crate::error::{Error, Result};
use crate::sequence::SequenceTable;

/// The symbol `a_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Letter(u32);

impl Letter {
    pub fn new(i: u32, n: usize) -> Result<Self> {
        if i == 0 || i as usize > n {
            return Err(Error::OutOfRange(format!("letter a{i} outside a1..a{n}")));
        }
        Ok(Letter(i))
    }

    /// The subscript `i` of `a_i`.
    pub fn index(self) -> u32 {
        self.0
    }

    /// Last letter of the block `S_c`, which depends only on `c mod n`.
    pub fn last_of_block(c: i64, n: usize) -> Self {
        let n = n as i64;
        Letter(((c - 1).rem_euclid(n) + 1) as u32)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// A finite word over `a_1..a_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LetterString {
    pub n: usize,
    pub letters: Vec<Letter>,
}

impl LetterString {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn indices(&self) -> Vec<u32> {
        self.letters.iter().map(|l| l.0).collect()
    }

    pub fn counts(&self) -> LetterCounts {
        LetterCounts::tally(self.n, self.letters.iter().copied())
    }

    pub fn starts_with(&self, other: &LetterString) -> bool {
        self.letters.starts_with(&other.letters)
    }

    pub fn concat<'a>(n: usize, parts: impl IntoIterator<Item = &'a LetterString>) -> Self {
        let mut letters = Vec::new();
        for p in parts {
            letters.extend_from_slice(&p.letters);
        }
        LetterString { n, letters }
    }
}

impl fmt::Display for LetterString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Per-letter tallies; entry `i - 1` counts `a_i`.
///
/// Serializes as `{"a1": "3", "a2": "2", ...}` with decimal-string values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetterCounts {
    pub counts: Vec<BigUint>,
}

impl LetterCounts {
    pub fn zeros(n: usize) -> Self {
        LetterCounts {
            counts: vec![BigUint::zero(); n],
        }
    }

    pub fn tally(n: usize, letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut raw = vec![0u64; n];
        for l in letters {
            raw[l.0 as usize - 1] += 1;
        }
        LetterCounts {
            counts: raw.into_iter().map(BigUint::from).collect(),
        }
    }

    /// Count of `a_i`.
    pub fn get(&self, i: usize) -> &BigUint {
        &self.counts[i - 1]
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

impl Serialize for LetterCounts {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.counts.len()))?;
        for (i, c) in self.counts.iter().enumerate() {
            map.serialize_entry(&format!("a{}", i + 1), &c.to_string())?;
        }
        map.end()
    }
}

impl fmt::Display for LetterCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "a{}={}", i + 1, c)?;
        }
        Ok(())
    }
}

/// The block `S_m`, refusing to build anything longer than `length_cap`.
///
/// Since `S_{j-1}` is a prefix of `S_j` for `j > n`, all blocks from `S_n` up
/// to `S_m` live in one buffer: step `j` appends `S_{j-n}`, which is either a
/// seed letter or an earlier prefix of the buffer.
pub fn block(table: &SequenceTable, m: i64, length_cap: u64) -> Result<LetterString> {
    let n = table.order();
    if m < 1 {
        return Err(Error::OutOfRange(format!(
            "block index must be >= 1, got {m}"
        )));
    }
    let length = table.natural(m);
    if length > BigUint::from(length_cap) {
        return Err(Error::TooLarge {
            length: length.to_string(),
            cap: length_cap,
        });
    }
    let m = m as usize;
    if m <= n {
        return Ok(LetterString {
            n,
            letters: vec![Letter(m as u32)],
        });
    }
    let mut letters = Vec::with_capacity(length.to_usize().unwrap_or(0));
    letters.push(Letter(n as u32));
    // block_len[j] = |S_j| for n <= j, as observed while building.
    let mut block_len = vec![0usize; m + 1];
    block_len[n] = 1;
    for j in n + 1..=m {
        let tail = j - n;
        if tail < n {
            letters.push(Letter(tail as u32));
        } else {
            letters.extend_from_within(..block_len[tail]);
        }
        block_len[j] = letters.len();
    }
    Ok(LetterString { n, letters })
}

/// Streaming iterator over `S_inf`.
///
/// Uses `S_inf = S_n S_1 S_2 S_3 ...`, which follows from
/// `S_{j+1} = S_j S_{j+1-n}`, and expands each block on an explicit stack of
/// pending block indices. After `F(n, m)` letters the stack holds `O(m)`
/// entries.
#[derive(Debug, Clone)]
pub struct NStream {
    n: usize,
    next_block: i64,
    stack: Vec<i64>,
}

impl NStream {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidOrder(n));
        }
        Ok(NStream {
            n,
            next_block: 1,
            stack: vec![n as i64],
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }
}

impl Iterator for NStream {
    type Item = Letter;

    fn next(&mut self) -> Option<Letter> {
        let n = self.n as i64;
        loop {
            match self.stack.pop() {
                Some(top) if top <= n => return Some(Letter(top as u32)),
                Some(top) => {
                    self.stack.push(top - n);
                    self.stack.push(top - 1);
                }
                None => {
                    self.stack.push(self.next_block);
                    self.next_block += 1;
                }
            }
        }
    }
}

/// Streams the letters of the n-string.
pub fn stream(n: usize) -> Result<NStream> {
    NStream::new(n)
}

/// First `len` letters of the n-string.
pub fn stream_prefix(n: usize, len: usize) -> Result<LetterString> {
    Ok(LetterString {
        n,
        letters: stream(n)?.take(len).collect(),
    })
}

/// Block indices `(c_k, ..., c_1)` whose blocks concatenate to the first
/// `value` letters of the n-string.
pub fn prefix_by_decomposition(table: &SequenceTable, value: &BigUint) -> Vec<i64> {
    let mut indices = decompose(table, value).indices;
    indices.reverse();
    indices
}

/// The `pos`-th letter (1-based) of the n-string.
///
/// The first `pos` letters are `S_{c_k} ... S_{c_1}` for the decomposition of
/// `pos`, so the answer is the last letter of `S_{c_1}`. Runs in the time of
/// one greedy decomposition.
pub fn char_at(table: &SequenceTable, pos: &BigUint) -> Result<Letter> {
    if pos.is_zero() {
        return Err(Error::OutOfRange("positions start at 1".into()));
    }
    let smallest = try_decompose(table, pos)?.smallest_summand_index()?;
    Ok(Letter::last_of_block(smallest, table.order()))
}

/// Letter counts of `S_m` from the closed form, without building the block.
pub fn count_block(table: &SequenceTable, m: i64) -> Result<LetterCounts> {
    if m < 1 {
        return Err(Error::OutOfRange(format!(
            "block index must be >= 1, got {m}"
        )));
    }
    let n = table.order() as i64;
    let counts = (1..=n)
        .map(|i| {
            if i == n {
                table.natural(m - (n - 1))
            } else {
                table.natural(m - (n + i - 1))
            }
        })
        .collect();
    Ok(LetterCounts { counts })
}

/// Letter counts of the first `len` letters from the closed form over the
/// decomposition of `len`.
pub fn count_prefix(table: &SequenceTable, len: &BigUint) -> LetterCounts {
    let n = table.order() as i64;
    let d = decompose(table, len);
    let counts = (1..=n)
        .map(|i| {
            let offset = if i == n { n - 1 } else { n + i - 1 };
            d.indices.iter().map(|&c| table.natural(c - offset)).sum()
        })
        .collect();
    LetterCounts { counts }
}

/// Letter counts of the first `len` letters by consuming the stream.
pub fn count_prefix_scan(n: usize, len: u64, scan_limit: u64) -> Result<LetterCounts> {
    if len > scan_limit {
        return Err(Error::ScanLimitExceeded {
            requested: len.to_string(),
            limit: scan_limit,
        });
    }
    Ok(LetterCounts::tally(n, stream(n)?.take(len as usize)))
}
