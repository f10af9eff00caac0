//! Acceptance criteria, one line of output per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the PASS/FAIL lines are
//! always printed by `cargo test`. Exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gzeck::harness::{L1Config, M1Config, M5Config, P2Config, Section3Config};
use gzeck::{
    block, char_at, count_prefix, prefix_by_decomposition, q_oracle, q_sequence, q_sequence_up_to,
    stream_prefix, table1_rows, telescoping_identity, z_oracle, z_set, CheckId, Harness,
    HarnessConfig, Letter, LetterString, Limits, SequenceTable, ZSetSpec,
};
use num_bigint::BigUint;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn table(n: usize) -> SequenceTable {
    SequenceTable::new(n).expect("valid order")
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn report_outcome(report: &gzeck::CheckReport) -> Outcome {
    if report.pass {
        Ok(format!("{} cases", report.cases_run))
    } else {
        Err(report.to_string())
    }
}

/// Criterion 1: Uniqueness by exhaustive search (n in 2..=4, N <= 2000) and round trip
/// (n in 2..=6, N <= 10^5) in under 60 s.
fn ac1_uniqueness_and_round_trip() -> Outcome {
    let start = Instant::now();
    let report = Harness::new().check_thm_p2(&[2, 3, 4, 5, 6], 100_000);
    let elapsed = start.elapsed();
    report_outcome(&report)?;
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}, target < 60 s")
    })?;
    Ok(format!("{} cases in {:.1?}", report.cases_run, elapsed))
}

/// Criterion 2: The displayed prefixes of the 3-string and the golden string.
fn ac2_string_fixtures() -> Outcome {
    let s3 = stream_prefix(3, 14).map_err(|e| e.to_string())?.to_string();
    let s2 = stream_prefix(2, 13).map_err(|e| e.to_string())?.to_string();
    ensure(s3 == "a3 a1 a2 a3 a3 a1 a3 a1 a2 a3 a1 a2 a3 a3", || {
        s3.clone()
    })?;
    ensure(s2 == "a2 a1 a2 a2 a1 a2 a1 a2 a2 a1 a2 a2 a1", || {
        s2.clone()
    })?;
    Ok("exact match".into())
}

/// Criterion 3: Closed-form block counts equal scans, totals equal F(n, m); n in 2..=5, m <= 25.
fn ac3_block_counts() -> Outcome {
    let report = Harness::new().check_thm_m1(&[2, 3, 4, 5], 25, 0);
    report_outcome(&report)
}

/// Criterion 4: Staircase concatenations are prefixes; n in {3, 4}, m in 1..=5.
fn ac4_staircase_prefixes() -> Outcome {
    let report = Harness::new().check_thm_m1(&[3, 4], 25, 5);
    report_outcome(&report)?;
    ensure(report.notes.is_empty(), || {
        format!("sweep truncated: {:?}", report.notes)
    })?;
    Ok(format!("{} cases", report.cases_run))
}

/// Criterion 5: Blocks in decomposition order spell the first N letters; N <= 10^4, n in 3..=5.
fn ac5_prefix_by_decomposition() -> Outcome {
    let mut cases = 0;
    for n in 3..=5 {
        let t = table(n);
        let prefix = stream_prefix(n, 10_000).map_err(|e| e.to_string())?.letters;
        let mut blocks: BTreeMap<i64, LetterString> = BTreeMap::new();
        for v in 1..=10_000usize {
            let mut spelled: Vec<Letter> = Vec::with_capacity(v);
            for c in prefix_by_decomposition(&t, &big(v as u64)) {
                let b = match blocks.get(&c) {
                    Some(b) => b,
                    None => {
                        let b = block(&t, c, Limits::DEFAULT_CAP).map_err(|e| e.to_string())?;
                        blocks.entry(c).or_insert(b)
                    }
                };
                spelled.extend_from_slice(&b.letters);
            }
            ensure(spelled == prefix[..v], || format!("n={n} N={v}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases"))
}

/// Criterion 6: Closed-form prefix counts equal scans; N <= 10^4, n in 2..=5; N=10, n=3 gives (3,2,5).
fn ac6_prefix_counts() -> Outcome {
    let mut cases = 0;
    for n in 2..=5 {
        let t = table(n);
        let prefix = stream_prefix(n, 10_000).map_err(|e| e.to_string())?.letters;
        let mut running = vec![0u64; n];
        for v in 1..=10_000usize {
            running[prefix[v - 1].index() as usize - 1] += 1;
            let closed = count_prefix(&t, &big(v as u64));
            let scanned: Vec<BigUint> = running.iter().map(|&c| big(c)).collect();
            ensure(closed.counts == scanned, || {
                format!("n={n} N={v}: {closed} vs {scanned:?}")
            })?;
            cases += 1;
        }
    }
    let spot = count_prefix(&table(3), &big(10));
    ensure(spot.counts == [big(3), big(2), big(5)], || {
        format!("spot {spot}")
    })?;
    Ok(format!("{cases} cases, spot (3,2,5)"))
}

/// Criterion 7: Random access equals the stream for pos <= 10^5, n in 2..=5, and
/// char_at(3, 10^18) takes under 10 ms once the table is warm.
fn ac7_random_access() -> Outcome {
    let mut cases = 0;
    for n in 2..=5 {
        let t = table(n);
        let prefix = stream_prefix(n, 100_000)
            .map_err(|e| e.to_string())?
            .letters;
        for (i, &expected) in prefix.iter().enumerate() {
            let got = char_at(&t, &big(i as u64 + 1)).map_err(|e| e.to_string())?;
            ensure(got == expected, || format!("n={n} pos={}", i + 1))?;
            cases += 1;
        }
    }
    let t3 = table(3);
    let far = BigUint::from(10u32).pow(18);
    char_at(&t3, &far).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let letter = char_at(&t3, &far).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_millis(10), || {
        format!("char_at(3, 10^18) took {elapsed:?}")
    })?;
    Ok(format!(
        "{cases} cases; char_at(3, 10^18) = {letter} in {elapsed:?}"
    ))
}

/// Criterion 8: Gap-rule q sequence equals the scan oracle for n in {3, 4}, k in n..=n+4,
/// elements <= 10^4; q(1..4) = [2, 8, 11, 15] for (3, 4).
fn ac8_q_sequence() -> Outcome {
    let mut compared = 0;
    for n in 3..=4usize {
        let t = table(n);
        for k in n as i64..=n as i64 + 4 {
            let fast = q_sequence_up_to(&t, k, &big(10_000)).map_err(|e| e.to_string())?;
            let slow = q_oracle(&t, k, 10_000, Limits::DEFAULT_CAP).map_err(|e| e.to_string())?;
            ensure(fast == slow, || format!("n={n} k={k}"))?;
            compared += fast.len();
        }
    }
    let spot = q_sequence(&table(3), 4, 4).map_err(|e| e.to_string())?;
    ensure(spot == [big(2), big(8), big(11), big(15)], || {
        format!("spot {spot:?}")
    })?;
    Ok(format!("{compared} elements, spot [2,8,11,15]"))
}

/// Criterion 9: Table 1 row ranges for n = 3, k = 4, j in 3..=8 against per-element
/// largest-summand inspection.
fn ac9_row_ranges() -> Outcome {
    let t = table(3);
    let k = 4;
    let rows_needed = u64::try_from(t.natural(9)).unwrap() as usize;
    let q = q_sequence(&t, k, rows_needed).map_err(|e| e.to_string())?;
    let largest: Vec<i64> = q
        .iter()
        .map(|v| gzeck::decompose(&t, v).largest_summand_index().unwrap())
        .collect();
    for j in 3..=8 {
        let (lo, hi) = table1_rows(&t, k, j).map_err(|e| e.to_string())?;
        let (lo, hi) = (
            u64::try_from(lo).unwrap() as usize,
            u64::try_from(hi).unwrap() as usize,
        );
        for (row, &l) in largest.iter().enumerate().map(|(i, l)| (i + 1, l)) {
            let inside = (lo..=hi).contains(&row);
            ensure(inside == (l == k + j), || {
                format!("j={j} row {row}: largest index {l}, rows {lo}..={hi}")
            })?;
        }
    }
    Ok(format!("{} rows classified", largest.len()))
}

/// Criterion 10: The Z set formula equals the scan oracle for n in {3, 4}, k in n..=n+6,
/// bound 10^5, with two spot checks.
fn ac10_z_sets() -> Outcome {
    let mut compared = 0;
    for n in 3..=4usize {
        let t = table(n);
        for k in n as i64..=n as i64 + 6 {
            let spec = ZSetSpec::new(&t, k).map_err(|e| e.to_string())?;
            let formula = z_set(&t, &spec, &big(100_000)).map_err(|e| e.to_string())?;
            let scan = z_oracle(&t, k, 100_000, Limits::DEFAULT_CAP).map_err(|e| e.to_string())?;
            ensure(formula == scan, || format!("n={n} k={k}"))?;
            compared += formula.len();
        }
    }
    let t3 = table(3);
    let z = |k, b| z_set(&t3, &ZSetSpec::new(&t3, k).unwrap(), &big(b)).unwrap();
    ensure(z(4, 20) == [2u32, 8, 11, 15].map(BigUint::from), || {
        "spot k=4".into()
    })?;
    ensure(
        z(6, 30) == [4u32, 5, 17, 18, 23, 24].map(BigUint::from),
        || "spot k=6".into(),
    )?;
    Ok(format!("{compared} elements, spots ok"))
}

/// Criterion 11: The telescoping identity for n in 2..=5, m in 1..=10, v in 1..=4, u in 1..=n.
fn ac11_telescoping() -> Outcome {
    let mut cases = 0;
    for n in 2..=5usize {
        let t = table(n);
        for m in 1..=10 {
            for v in 1..=4 {
                for u in 1..=n as i64 {
                    let holds = telescoping_identity(&t, m, v, u).map_err(|e| e.to_string())?;
                    ensure(holds, || format!("n={n} m={m} v={v} u={u}"))?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} cases"))
}

/// Criterion 12: Perturbing one table value by 1 makes at least one harness check fail.
fn ac12_mutation() -> Outcome {
    let mut perturbed = table(3);
    perturbed.extend_to(64);
    perturbed.perturb(10, 1).map_err(|e| e.to_string())?;
    let harness = Harness::new().with_table(perturbed);
    let config = HarnessConfig {
        thm_p2: P2Config {
            orders: vec![3],
            n_max: 500,
        },
        lemma_l1: L1Config {
            orders: vec![3],
            depth: 14,
        },
        thm_m1: M1Config {
            orders: vec![3],
            depth: 20,
            staircase_max: 4,
        },
        thm_m5_counts: M5Config {
            orders: vec![3],
            n_max: 500,
            char_at_max: 500,
        },
        section3: Section3Config {
            orders: vec![3],
            bound: 500,
            monotonic_max: 500,
            telescoping_orders: vec![3],
            ..Section3Config::default()
        },
    };
    let reports = harness.run(&config, &CheckId::ALL);
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.check_id.as_str())
        .collect();
    ensure(!failed.is_empty(), || {
        "no check noticed the perturbation".into()
    })?;

    let clean = Harness::new().run(&config, &CheckId::ALL);
    ensure(clean.iter().all(|r| r.pass), || {
        "unperturbed baseline failed".into()
    })?;
    Ok(format!("caught by {}", failed.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (
            "AC1  uniqueness + round trip",
            ac1_uniqueness_and_round_trip,
        ),
        ("AC2  string fixtures", ac2_string_fixtures),
        ("AC3  block letter counts", ac3_block_counts),
        ("AC4  staircase prefixes", ac4_staircase_prefixes),
        ("AC5  prefix by decomposition", ac5_prefix_by_decomposition),
        ("AC6  prefix letter counts", ac6_prefix_counts),
        ("AC7  random access", ac7_random_access),
        ("AC8  q sequence gap rule", ac8_q_sequence),
        ("AC9  table 1 row ranges", ac9_row_ranges),
        ("AC10 Z set formula", ac10_z_sets),
        ("AC11 telescoping identity", ac11_telescoping),
        ("AC12 mutation sanity", ac12_mutation),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {name} ({detail}) [{elapsed:.2?}]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail} [{elapsed:.2?}]");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
