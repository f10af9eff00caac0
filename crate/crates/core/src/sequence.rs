//! The order-`n` generalized Fibonacci numbers `F(n, m)`.
//!
//! The sequence starts with `n` ones, `F(n, 1) = ... = F(n, n) = 1`, and obeys
//! `F(n, m + 1) = F(n, m) + F(n, m + 1 - n)`. Running the recurrence backwards
//! extends it to every integer index: for `n >= 3` the indices `3 - 2n ..= 0`
//! hold zeros except for `F(n, 1 - n) = 1`. Further left the values are still
//! defined by the recurrence but may be negative.

use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Limits on how much work a single request may do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of letters materialized for one block.
    pub length_cap: u64,
    /// Maximum number of integers or letters consumed by a scan oracle.
    pub scan_limit: u64,
}

impl Limits {
    pub const DEFAULT_CAP: u64 = 10_000_000;
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            length_cap: Self::DEFAULT_CAP,
            scan_limit: Self::DEFAULT_CAP,
        }
    }
}

/// Memoized values of `F(n, m)` for one fixed order `n`.
///
/// Forward values (`m >= 1`) live in a window that grows by doubling; values
/// at `m <= 0` are derived from `F(n, m) = F(n, m + n) - F(n, m + n - 1)` and
/// cached separately. Growth takes a write lock, every other access is a read,
/// so a table can be shared between threads.
#[derive(Debug)]
pub struct SequenceTable {
    n: usize,
    /// `forward[i]` holds `F(n, i + 1)`.
    forward: RwLock<Vec<BigUint>>,
    /// `backward[t]` holds `F(n, -t)`.
    backward: RwLock<Vec<BigInt>>,
}

impl SequenceTable {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidOrder(n));
        }
        let forward = vec![BigUint::one(); 4 * n];
        let table = SequenceTable {
            n,
            forward: RwLock::new(Vec::new()),
            backward: RwLock::new(Vec::new()),
        };
        {
            let mut fw = table.forward.write().unwrap();
            *fw = forward;
            Self::fill(n, &mut fw, n);
        }
        Ok(table)
    }

    /// Order of the recurrence.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Recomputes `fw[from..]` from the recurrence.
    fn fill(n: usize, fw: &mut [BigUint], from: usize) {
        for i in from.max(n)..fw.len() {
            fw[i] = &fw[i - 1] + &fw[i - n];
        }
    }

    /// Number of forward values currently cached.
    pub fn forward_len(&self) -> usize {
        self.forward.read().unwrap().len()
    }

    /// Makes sure `F(n, hi)` is cached, at least doubling the window when it grows.
    pub fn extend_to(&self, hi: i64) {
        if hi < 1 {
            return;
        }
        let hi = hi as usize;
        if self.forward.read().unwrap().len() >= hi {
            return;
        }
        let mut fw = self.forward.write().unwrap();
        let old = fw.len();
        if old >= hi {
            return;
        }
        let new_len = hi.max(2 * old);
        fw.resize(new_len, BigUint::zero());
        Self::fill(self.n, &mut fw, old);
    }

    /// `F(n, m)` for any integer `m`.
    pub fn term(&self, m: i64) -> BigInt {
        if m >= 1 {
            BigInt::from(self.forward_value(m))
        } else {
            self.backward_value(m)
        }
    }

    /// `F(n, m)` as a natural number.
    ///
    /// Every index `m >= 3 - 2n` has a non-negative value. Panics if the
    /// term at `m` is negative.
    pub fn natural(&self, m: i64) -> BigUint {
        if m >= 1 {
            self.forward_value(m)
        } else {
            self.backward_value(m)
                .to_biguint()
                .unwrap_or_else(|| panic!("F({}, {}) is negative", self.n, m))
        }
    }

    fn forward_value(&self, m: i64) -> BigUint {
        debug_assert!(m >= 1);
        self.extend_to(m);
        self.forward.read().unwrap()[(m - 1) as usize].clone()
    }

    fn backward_value(&self, m: i64) -> BigInt {
        debug_assert!(m <= 0);
        let depth = m.unsigned_abs() as usize;
        if let Some(v) = self.backward.read().unwrap().get(depth) {
            return v.clone();
        }
        self.extend_to(self.n as i64);
        let mut bw = self.backward.write().unwrap();
        let fw = self.forward.read().unwrap();
        let n = self.n as i64;
        while bw.len() <= depth {
            let idx = -(bw.len() as i64);
            let at = |j: i64| -> BigInt {
                if j >= 1 {
                    BigInt::from(fw[(j - 1) as usize].clone())
                } else {
                    bw[(-j) as usize].clone()
                }
            };
            let value = at(idx + n) - at(idx + n - 1);
            bw.push(value);
        }
        bw[depth].clone()
    }

    /// Largest index `c >= n` with `F(n, c) <= bound`, optionally also `c <= cap`.
    pub fn largest_index_at_most(&self, bound: &BigUint, cap: Option<i64>) -> Result<i64> {
        let n = self.n as i64;
        let not_found = Error::NotFound { order: self.n, cap };
        if bound.is_zero() || cap.is_some_and(|c| c < n) {
            return Err(not_found);
        }
        // Grow until the window holds a value above the bound (or reaches the cap).
        loop {
            let len = self.forward_len() as i64;
            if cap.is_some_and(|c| len >= c) {
                break;
            }
            if self.forward.read().unwrap().last().unwrap() > bound {
                break;
            }
            self.extend_to(2 * len);
        }
        let fw = self.forward.read().unwrap();
        let upper = match cap {
            Some(c) => (c as usize).min(fw.len()),
            None => fw.len(),
        };
        // Indices n..=upper, i.e. slots n-1..upper, are strictly increasing.
        let admissible = &fw[self.n - 1..upper];
        let count = admissible.partition_point(|v| v <= bound);
        if count == 0 {
            return Err(not_found);
        }
        Ok(n - 1 + count as i64)
    }

    /// Adds `delta` to the cached forward value `F(n, m)`.
    ///
    /// Used for mutation testing of the verification harness: the stored value
    /// changes while the rest of the cached window stays as it was. Values
    /// appended by later growth build on the perturbed entry.
    pub fn perturb(&mut self, m: i64, delta: i64) -> Result<()> {
        if m < 1 {
            return Err(Error::OutOfRange(format!(
                "only forward indices can be perturbed, got {m}"
            )));
        }
        self.extend_to(m);
        let fw = self.forward.get_mut().unwrap();
        let slot = &mut fw[(m - 1) as usize];
        let updated = BigInt::from(slot.clone()) + delta;
        *slot = updated
            .to_biguint()
            .ok_or_else(|| Error::OutOfRange("perturbed value would be negative".into()))?;
        self.backward.get_mut().unwrap().clear();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: usize) -> SequenceTable {
        SequenceTable::new(n).unwrap()
    }

    #[test]
    fn spot_values() {
        assert_eq!(t(3).term(7), BigInt::from(6));
        assert_eq!(t(3).term(-2), BigInt::one());
        assert_eq!(t(3).term(0), BigInt::zero());
        assert_eq!(t(2).term(10), BigInt::from(55));
    }

    #[test]
    fn rejects_order_below_two() {
        assert_eq!(SequenceTable::new(1).unwrap_err(), Error::InvalidOrder(1));
        assert!(SequenceTable::new(0).is_err());
    }

    #[test]
    fn leftward_window() {
        for n in 3..=6usize {
            let table = t(n);
            let n = n as i64;
            for m in (3 - 2 * n)..=0 {
                let expected = if m == 1 - n { 1 } else { 0 };
                assert_eq!(table.term(m), BigInt::from(expected), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn backward_values_go_negative_below_window() {
        // F(3,-4) = F(3,-1) - F(3,-2) = -1
        assert_eq!(t(3).term(-4), BigInt::from(-1));
    }

    #[test]
    #[should_panic(expected = "negative")]
    fn natural_panics_on_negative_term() {
        t(3).natural(-4);
    }

    #[test]
    fn recurrence_holds_across_growth() {
        for n in 2..=6usize {
            let table = t(n);
            let n = n as i64;
            for m in n..=60 {
                assert_eq!(table.term(m + 1), table.term(m) + table.term(m + 1 - n));
                assert!(table.term(m + 1) > table.term(m));
            }
        }
    }

    #[test]
    fn recurrence_holds_through_negative_indices() {
        for n in 2..=6usize {
            let table = t(n);
            let n = n as i64;
            for m in -40..=10 {
                assert_eq!(table.term(m + 1), table.term(m) + table.term(m + 1 - n));
            }
        }
    }

    #[test]
    fn largest_index_examples() {
        let table = t(3);
        assert_eq!(table.largest_index_at_most(&10u32.into(), None), Ok(8));
        assert_eq!(table.largest_index_at_most(&1u32.into(), None), Ok(3));
        assert_eq!(table.largest_index_at_most(&5u32.into(), Some(5)), Ok(5));
        assert!(matches!(
            table.largest_index_at_most(&5u32.into(), Some(2)),
            Err(Error::NotFound { .. })
        ));
        assert!(table.largest_index_at_most(&BigUint::zero(), None).is_err());
    }

    #[test]
    fn largest_index_grows_window() {
        let table = t(3);
        let huge = BigUint::from(10u32).pow(60);
        let c = table.largest_index_at_most(&huge, None).unwrap();
        assert!(table.natural(c) <= huge);
        assert!(table.natural(c + 1) > huge);
    }

    #[test]
    fn perturb_changes_one_value() {
        let mut table = t(3);
        table.extend_to(30);
        let before = table.term(11);
        table.perturb(10, 1).unwrap();
        assert_eq!(table.term(10), BigInt::from(20));
        assert_eq!(table.term(11), before);
        assert!(table.perturb(0, 1).is_err());
    }

    #[test]
    fn shared_reads_across_threads() {
        let table = t(4);
        std::thread::scope(|s| {
            for start in [10i64, 50, 90] {
                let table = &table;
                s.spawn(move || {
                    for m in start..start + 40 {
                        assert_eq!(table.term(m + 1), table.term(m) + table.term(m - 3));
                    }
                });
            }
        });
    }
}
