//! Integers with a fixed summand `F(n, k)` in their n-decomposition.
//!
//! `q(1) < q(2) < ...` enumerates the integers whose smallest summand is
//! `F(n, k)`. Consecutive gaps are driven by the n-string: if the `j`-th letter
//! is `a_i` then `q(j + 1) - q(j) = F(n, k + i)`. Adding any decomposition
//! whose largest index is at most `k - n` to such a `q` keeps the summand, so
//! the integers containing `F(n, k)` anywhere are `q(m + 1) + j` for
//! `0 <= j < F(n, k - n + 1)`.

use num_bigint::{BigInt, BigUint};

use crate::decomposition::decompose;
use crate::error::{Error, Result};
use crate::nstring::NStream;
use crate::sequence::SequenceTable;

fn check_fixed_index(table: &SequenceTable, k: i64) -> Result<()> {
    let n = table.order() as i64;
    if k < n {
        return Err(Error::OutOfRange(format!(
            "fixed index k must be >= n = {n}, got {k}"
        )));
    }
    Ok(())
}

fn check_scan(bound: u64, scan_limit: u64) -> Result<()> {
    if bound > scan_limit {
        return Err(Error::ScanLimitExceeded {
            requested: bound.to_string(),
            limit: scan_limit,
        });
    }
    Ok(())
}

/// Gap-driven generator of `q(1), q(2), ...` for a fixed `k`.
#[derive(Debug, Clone)]
pub struct QStream {
    /// `gaps[i - 1] = F(n, k + i)`.
    gaps: Vec<BigUint>,
    current: BigUint,
    next_j: u64,
    letters: NStream,
}

impl QStream {
    pub fn new(table: &SequenceTable, k: i64) -> Result<Self> {
        check_fixed_index(table, k)?;
        let n = table.order() as i64;
        Ok(QStream {
            gaps: (1..=n).map(|i| table.natural(k + i)).collect(),
            current: table.natural(k),
            next_j: 1,
            letters: NStream::new(table.order())?,
        })
    }

    /// Position `j` of the value the next call to `next` returns.
    pub fn position(&self) -> u64 {
        self.next_j
    }
}

impl Iterator for QStream {
    type Item = BigUint;

    fn next(&mut self) -> Option<BigUint> {
        let out = self.current.clone();
        let letter = self.letters.next()?;
        self.current += &self.gaps[letter.index() as usize - 1];
        self.next_j += 1;
        Some(out)
    }
}

/// `q(1..=count)`.
pub fn q_sequence(table: &SequenceTable, k: i64, count: usize) -> Result<Vec<BigUint>> {
    Ok(QStream::new(table, k)?.take(count).collect())
}

/// All `q(j) <= bound` from the gap rule.
pub fn q_sequence_up_to(table: &SequenceTable, k: i64, bound: &BigUint) -> Result<Vec<BigUint>> {
    Ok(QStream::new(table, k)?.take_while(|q| q <= bound).collect())
}

/// Integers in `1..=bound` whose decomposition has smallest index exactly `k`,
/// by decomposing each one.
pub fn q_oracle(
    table: &SequenceTable,
    k: i64,
    bound: u64,
    scan_limit: u64,
) -> Result<Vec<BigUint>> {
    check_scan(bound, scan_limit)?;
    Ok((1..=bound)
        .map(BigUint::from)
        .filter(|v| decompose(table, v).smallest_summand_index() == Ok(k))
        .collect())
}

/// Rows `(F(n, j) + 1, F(n, j + 1))` of the ordered `q` list whose largest
/// summand is `F(n, k + j)`. Row numbers are 1-based.
pub fn table1_rows(table: &SequenceTable, k: i64, j: i64) -> Result<(BigUint, BigUint)> {
    check_fixed_index(table, k)?;
    let n = table.order() as i64;
    if j < n {
        return Err(Error::OutOfRange(format!(
            "row index j must be >= n = {n}, got {j}"
        )));
    }
    Ok((table.natural(j) + 1u32, table.natural(j + 1)))
}

/// Parameters of `Z_n(k)`: the offsets run over `0..=j_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZSetSpec {
    pub n: usize,
    pub k: i64,
    pub j_max: BigUint,
}

impl ZSetSpec {
    pub fn new(table: &SequenceTable, k: i64) -> Result<Self> {
        check_fixed_index(table, k)?;
        let n = table.order() as i64;
        Ok(ZSetSpec {
            n: table.order(),
            k,
            j_max: table.natural(k - (n - 1)) - 1u32,
        })
    }
}

/// Inclusive ranges `[base(m), base(m) + j_max]` for `m = 0, 1, ...`, clipped
/// to `bound`, where `base(m) = F(n, k) + sum_i F(n, k + i) N_{a_i}(m)`.
///
/// `base` never decreases in `m`, so enumeration stops at the first `m` whose
/// base exceeds `bound`.
pub fn z_set_blocks(
    table: &SequenceTable,
    spec: &ZSetSpec,
    bound: &BigUint,
) -> Result<Vec<(BigUint, BigUint)>> {
    if spec.n != table.order() {
        return Err(Error::OutOfRange(format!(
            "set of order {} used with a table of order {}",
            spec.n,
            table.order()
        )));
    }
    let mut blocks = Vec::new();
    for base in QStream::new(table, spec.k)? {
        if &base > bound {
            break;
        }
        let top = (&base + &spec.j_max).min(bound.clone());
        blocks.push((base, top));
    }
    Ok(blocks)
}

/// Elements of `Z_n(k)` up to `bound`, ascending.
pub fn z_set(table: &SequenceTable, spec: &ZSetSpec, bound: &BigUint) -> Result<Vec<BigUint>> {
    let mut out = Vec::new();
    for (lo, hi) in z_set_blocks(table, spec, bound)? {
        let mut v = lo;
        while v <= hi {
            out.push(v.clone());
            v += 1u32;
        }
    }
    let before = out.len();
    out.sort();
    out.dedup();
    debug_assert_eq!(before, out.len(), "Z-set blocks overlapped");
    Ok(out)
}

/// Integers in `1..=bound` whose decomposition uses index `k`.
pub fn z_oracle(
    table: &SequenceTable,
    k: i64,
    bound: u64,
    scan_limit: u64,
) -> Result<Vec<BigUint>> {
    check_scan(bound, scan_limit)?;
    Ok((1..=bound)
        .map(BigUint::from)
        .filter(|v| decompose(table, v).contains(k))
        .collect())
}

/// Checks `F(n, m+vn+u) - sum_{t=1..v} F(n, m+tn+u-1) == F(n, m+u)`.
pub fn telescoping_identity(table: &SequenceTable, m: i64, v: i64, u: i64) -> Result<bool> {
    let n = table.order() as i64;
    if m < 1 || v < 1 || !(1..=n).contains(&u) {
        return Err(Error::OutOfRange(format!(
            "need m >= 1, v >= 1, 1 <= u <= {n}; got m={m} v={v} u={u}"
        )));
    }
    let lhs = table.term(m + v * n + u)
        - (1..=v)
            .map(|t| table.term(m + t * n + u - 1))
            .sum::<BigInt>();
    Ok(lhs == table.term(m + u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: usize) -> SequenceTable {
        SequenceTable::new(n).unwrap()
    }

    fn nums(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn q_sequence_examples() {
        assert_eq!(q_sequence(&table(3), 4, 4).unwrap(), nums(&[2, 8, 11, 15]));
        assert_eq!(q_sequence(&table(3), 4, 1).unwrap(), nums(&[2]));
        // 3 = F(2,4) is its own decomposition, so the smallest summand is not F(2,2).
        assert_eq!(q_sequence(&table(2), 2, 3).unwrap(), nums(&[1, 4, 6]));
        assert!(q_sequence(&table(3), 2, 3).is_err());
    }

    #[test]
    fn q_oracle_examples() {
        let t = table(3);
        assert_eq!(q_oracle(&t, 4, 16, 100).unwrap(), nums(&[2, 8, 11, 15]));
        assert_eq!(q_oracle(&t, 3, 5, 100).unwrap(), nums(&[1, 5]));
        assert!(q_oracle(&t, 9, 12, 100).unwrap().is_empty());
        assert_eq!(q_oracle(&table(2), 2, 6, 100).unwrap(), nums(&[1, 4, 6]));
        assert!(q_oracle(&t, 4, 101, 100).is_err());
    }

    #[test]
    fn table1_rows_examples() {
        let t = table(3);
        assert_eq!(table1_rows(&t, 4, 3).unwrap(), (2u32.into(), 2u32.into()));
        assert_eq!(table1_rows(&t, 4, 6).unwrap(), (5u32.into(), 6u32.into()));
        assert_eq!(table1_rows(&t, 4, 5).unwrap(), (4u32.into(), 4u32.into()));
        assert!(table1_rows(&t, 4, 2).is_err());
    }

    #[test]
    fn z_set_examples() {
        let t = table(3);
        let z = |k, b: u64| z_set(&t, &ZSetSpec::new(&t, k).unwrap(), &b.into()).unwrap();
        assert_eq!(z(4, 20), nums(&[2, 8, 11, 15]));
        assert_eq!(z(6, 30), nums(&[4, 5, 17, 18, 23, 24]));
        assert!(z(9, 12).is_empty());
        assert_eq!(ZSetSpec::new(&t, 6).unwrap().j_max, BigUint::from(1u32));
    }

    #[test]
    fn z_oracle_examples() {
        let t = table(3);
        assert_eq!(z_oracle(&t, 4, 20, 100).unwrap(), nums(&[2, 8, 11, 15]));
        assert_eq!(
            z_oracle(&t, 6, 30, 100).unwrap(),
            nums(&[4, 5, 17, 18, 23, 24])
        );
        assert_eq!(z_oracle(&table(2), 4, 11, 100).unwrap(), nums(&[3, 4, 11]));
    }

    #[test]
    fn z_blocks_are_disjoint() {
        let t = table(4);
        for k in 4..=10 {
            let spec = ZSetSpec::new(&t, k).unwrap();
            let blocks = z_set_blocks(&t, &spec, &5000u32.into()).unwrap();
            for w in blocks.windows(2) {
                assert!(w[0].1 < w[1].0, "k={k}: {:?}", w);
            }
        }
    }

    #[test]
    fn telescoping_examples() {
        assert_eq!(telescoping_identity(&table(3), 1, 1, 2), Ok(true));
        assert_eq!(telescoping_identity(&table(3), 2, 2, 1), Ok(true));
        assert_eq!(telescoping_identity(&table(2), 1, 1, 1), Ok(true));
        assert!(telescoping_identity(&table(3), 1, 1, 4).is_err());
        assert!(telescoping_identity(&table(3), 0, 1, 1).is_err());
    }

    #[test]
    fn telescoping_sweep() {
        for n in 2..=5usize {
            let t = table(n);
            for m in 1..=10 {
                for v in 1..=4 {
                    for u in 1..=n as i64 {
                        assert_eq!(telescoping_identity(&t, m, v, u), Ok(true));
                    }
                }
            }
        }
    }
}
