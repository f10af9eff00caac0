//! Greedy n-decompositions.
//!
//! Every natural number has exactly one representation as a sum of terms
//! `F(n, c_1) + ... + F(n, c_k)` with `c_1 >= n` and `c_i >= c_{i-1} + n`.
//! The greedy algorithm finds it.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::SequenceTable;

/// An ascending list of summand indices for order `n`.
///
/// Construction does not validate; [`Decomposition::validate`] and
/// [`recompose`] check the lower bound and gap rules.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decomposition {
    pub n: usize,
    pub indices: Vec<i64>,
}

impl Decomposition {
    pub fn new(n: usize, indices: Vec<i64>) -> Self {
        Decomposition { n, indices }
    }

    pub fn empty(n: usize) -> Self {
        Decomposition {
            n,
            indices: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    /// Index of the largest summand, `c_k`.
    pub fn largest_summand_index(&self) -> Result<i64> {
        self.indices.last().copied().ok_or(Error::Empty)
    }

    /// Index of the smallest summand, `c_1`.
    pub fn smallest_summand_index(&self) -> Result<i64> {
        self.indices.first().copied().ok_or(Error::Empty)
    }

    pub fn contains(&self, index: i64) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n as i64;
        if self.n < 2 {
            return Err(Error::InvalidOrder(self.n));
        }
        if let Some(&first) = self.indices.first() {
            if first < n {
                return Err(Error::InvalidDecomposition(format!(
                    "smallest index {first} is below the order {n}"
                )));
            }
        }
        for pair in self.indices.windows(2) {
            if pair[1] < pair[0] + n {
                return Err(Error::InvalidDecomposition(format!(
                    "indices {} and {} are closer than {n}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    }
}

/// Greedy n-decomposition of `value`; zero gives the empty decomposition.
///
/// Panics only if the table does not satisfy the recurrence (see
/// [`SequenceTable::perturb`]); [`try_decompose`] reports that case instead.
pub fn decompose(table: &SequenceTable, value: &BigUint) -> Decomposition {
    try_decompose(table, value).expect("greedy step always finds F(n, n) = 1")
}

/// Greedy n-decomposition that fails with `NotFound` when a greedy step has
/// no admissible index left, which a consistent table never produces.
pub fn try_decompose(table: &SequenceTable, value: &BigUint) -> Result<Decomposition> {
    let n = table.order();
    let mut indices = Vec::new();
    let mut remainder = value.clone();
    let mut cap = None;
    while !remainder.is_zero() {
        let c = table.largest_index_at_most(&remainder, cap)?;
        remainder -= table.natural(c);
        indices.push(c);
        cap = Some(c - n as i64);
    }
    indices.reverse();
    Ok(Decomposition { n, indices })
}

/// Sum of the terms named by `d`.
pub fn recompose(table: &SequenceTable, d: &Decomposition) -> Result<BigUint> {
    d.validate()?;
    if d.n != table.order() {
        return Err(Error::InvalidDecomposition(format!(
            "decomposition of order {} used with a table of order {}",
            d.n,
            table.order()
        )));
    }
    Ok(d.indices.iter().map(|&c| table.natural(c)).sum())
}

/// Every index set with `c_1 >= n`, gaps `>= n` and indices `<= max_index`
/// whose terms sum to `value`, found by exhaustive search.
///
/// The terms are generated here from the recurrence in machine integers, so
/// the search shares nothing with [`SequenceTable`] or the greedy step.
pub fn brute_force_decompositions(n: usize, value: u64, max_index: i64) -> Vec<Decomposition> {
    let mut out = Vec::new();
    if n < 2 || max_index < n as i64 {
        return out;
    }
    let top = max_index as usize;
    // terms[m] = F(n, m) for 1 <= m <= top; saturates instead of overflowing.
    let mut terms = vec![0u64; top + 1];
    for m in 1..=top {
        terms[m] = if m <= n {
            1
        } else {
            terms[m - 1].saturating_add(terms[m - n])
        };
    }

    fn search(
        n: usize,
        terms: &[u64],
        next: usize,
        remaining: u64,
        chosen: &mut Vec<i64>,
        out: &mut Vec<Decomposition>,
    ) {
        if remaining == 0 {
            if !chosen.is_empty() {
                out.push(Decomposition::new(n, chosen.clone()));
            }
            return;
        }
        for c in next..terms.len() {
            if terms[c] <= remaining {
                chosen.push(c as i64);
                search(n, terms, c + n, remaining - terms[c], chosen, out);
                chosen.pop();
            }
        }
    }

    search(n, &terms, n, value, &mut Vec::new(), &mut out);
    out
}
