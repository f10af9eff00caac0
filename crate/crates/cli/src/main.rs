//! `gzeck`: command-line access to generalized Zeckendorf decompositions and
//! generalized golden strings.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gzeck::harness::HarnessConfig;
use gzeck::{
    block, brute_force_decompositions, char_at, count_block, count_prefix, count_prefix_scan,
    decompose, prefix_by_decomposition, q_oracle, q_sequence, recompose, stream, table1_rows,
    z_oracle, z_set, CheckId, Decomposition, Harness, LetterString, Limits, SequenceTable,
    ZSetSpec,
};
use num_bigint::BigUint;
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(
    name = "gzeck",
    version,
    about = "Generalized Zeckendorf decompositions and n-strings"
)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Order n of the recurrence (n >= 2)
    #[arg(short = 'n', long = "order", global = true, default_value_t = 3)]
    order: usize,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Largest block or prefix materialized, in letters
    #[arg(long, global = true, env = "GZECK_LENGTH_CAP", default_value_t = Limits::DEFAULT_CAP)]
    length_cap: u64,

    /// Largest number of integers or letters a scan oracle may consume
    #[arg(long, global = true, env = "GZECK_SCAN_LIMIT", default_value_t = Limits::DEFAULT_CAP)]
    scan_limit: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    /// OEIS b-file: one "index value" pair per line
    Bfile,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print F(n, m) for any integer m
    Term {
        #[arg(short = 'm', long, allow_negative_numbers = true)]
        index: i64,
    },
    /// Greedy n-decomposition of N
    Decompose {
        value: BigUint,
        /// List every representation found by exhaustive search instead
        #[arg(long)]
        brute_force: bool,
        /// Largest index considered by --brute-force
        #[arg(long, default_value_t = 40)]
        max_index: i64,
    },
    /// Sum the terms at the given ascending indices
    Recompose {
        #[arg(required = true, num_args = 1..)]
        indices: Vec<i64>,
    },
    /// Print a prefix of the n-string
    String {
        #[arg(long)]
        prefix: u64,
        /// Print the block indices whose concatenation is the prefix instead
        #[arg(long)]
        blocks: bool,
    },
    /// Print the block S_m
    Block {
        #[arg(short = 'm', long)]
        index: i64,
    },
    /// Letter at a 1-based position of the n-string
    CharAt { pos: BigUint },
    /// Letter counts of a prefix (--prefix) or of a block (-m)
    Counts {
        #[arg(long, conflicts_with = "index", required_unless_present = "index")]
        prefix: Option<BigUint>,
        #[arg(short = 'm', long)]
        index: Option<i64>,
        /// Count by scanning the stream instead of the closed form
        #[arg(long)]
        scan: bool,
    },
    /// Integers whose smallest summand is F(n, k), in increasing order
    Qseq {
        #[arg(short = 'k', long = "fixed-index")]
        k: i64,
        #[arg(long, required_unless_present = "bound")]
        count: Option<usize>,
        /// Keep values up to this bound instead of a fixed count
        #[arg(long)]
        bound: Option<u64>,
        /// Scan 1..=bound and decompose each integer
        #[arg(long, requires = "bound")]
        oracle: bool,
    },
    /// Row range of the ordered smallest-summand list whose largest summand is F(n, k + j)
    Table1 {
        #[arg(short = 'k', long = "fixed-index")]
        k: i64,
        #[arg(short = 'j', long)]
        j: i64,
    },
    /// Integers having F(n, k) as a summand, up to a bound
    Zset {
        #[arg(short = 'k', long = "fixed-index")]
        k: i64,
        #[arg(long)]
        bound: u64,
        /// Scan 1..=bound and decompose each integer
        #[arg(long)]
        oracle: bool,
    },
    /// Run verification checks
    Verify {
        /// Checks to run: p2, l1, m1, m5, section3 (default: all)
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        /// TOML or JSON file with sweep parameters
        #[arg(long)]
        config: Option<PathBuf>,
        /// Orders used by every selected check
        #[arg(long, value_delimiter = ',')]
        orders: Vec<usize>,
        /// Largest N for the decomposition and prefix sweeps
        #[arg(long)]
        n_max: Option<u64>,
        /// Largest block index for the block sweeps
        #[arg(long)]
        depth: Option<i64>,
        /// Bound for the fixed-summand sweeps
        #[arg(long)]
        bound: Option<u64>,
    },
}

enum Failure {
    Usage(String),
    Domain(gzeck::Error),
    ChecksFailed,
}

impl From<gzeck::Error> for Failure {
    fn from(e: gzeck::Error) -> Self {
        Failure::Domain(e)
    }
}

fn error_kind(e: &gzeck::Error) -> &'static str {
    use gzeck::Error::*;
    match e {
        InvalidOrder(_) => "InvalidOrder",
        NotFound { .. } => "NotFound",
        InvalidDecomposition(_) => "InvalidDecomposition",
        Empty => "Empty",
        TooLarge { .. } => "TooLarge",
        ScanLimitExceeded { .. } => "ScanLimitExceeded",
        OutOfRange(_) => "OutOfRange",
    }
}

fn strings(values: &[BigUint]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

fn joined(values: &[BigUint]) -> String {
    strings(values).join(" ")
}

fn bfile(values: &[BigUint]) -> String {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{} {v}", i + 1))
        .collect::<Vec<_>>()
        .join("\n")
}

fn decomposition_text(n: usize, value: &BigUint, d: &Decomposition) -> String {
    if d.is_empty() {
        return format!("{value} = 0");
    }
    let terms: Vec<String> = d.indices.iter().map(|c| format!("F({n},{c})")).collect();
    format!("{value} = {}", terms.join(" + "))
}

/// Output for one command: text form and JSON form.
struct Output {
    text: String,
    json: Value,
    bfile: Option<String>,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Output {
            text: text.into(),
            json,
            bfile: None,
        }
    }
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let common = &cli.common;
    let n = common.order;
    let limits = Limits {
        length_cap: common.length_cap,
        scan_limit: common.scan_limit,
    };
    if limits.length_cap == 0 || limits.scan_limit == 0 {
        return Err(Failure::Usage("caps must be at least 1".into()));
    }
    if let Command::Verify { .. } = cli.command {
    } else if n < 2 {
        return Err(gzeck::Error::InvalidOrder(n).into());
    }

    let out = match cli.command {
        Command::Term { index } => {
            let table = SequenceTable::new(n)?;
            let value = table.term(index);
            Output::new(
                value.to_string(),
                json!({ "n": n, "m": index, "value": value.to_string() }),
            )
        }
        Command::Decompose {
            value,
            brute_force,
            max_index,
        } => {
            if brute_force {
                let small = u64::try_from(&value).map_err(|_| {
                    gzeck::Error::OutOfRange("--brute-force needs N below 2^64".into())
                })?;
                let all = brute_force_decompositions(n, small, max_index);
                let text = all
                    .iter()
                    .map(|d| decomposition_text(n, &value, d))
                    .collect::<Vec<_>>()
                    .join("\n");
                let lists: Vec<&Vec<i64>> = all.iter().map(|d| &d.indices).collect();
                Output::new(
                    text,
                    json!({ "n": n, "N": value.to_string(), "max_index": max_index, "decompositions": lists }),
                )
            } else {
                let table = SequenceTable::new(n)?;
                let d = decompose(&table, &value);
                Output::new(
                    decomposition_text(n, &value, &d),
                    json!({ "n": n, "N": value.to_string(), "indices": d.indices }),
                )
            }
        }
        Command::Recompose { indices } => {
            let table = SequenceTable::new(n)?;
            let d = Decomposition::new(n, indices);
            let value = recompose(&table, &d)?;
            Output::new(
                value.to_string(),
                json!({ "n": n, "indices": d.indices, "N": value.to_string() }),
            )
        }
        Command::String { prefix, blocks } => {
            if blocks {
                let table = SequenceTable::new(n)?;
                let order = prefix_by_decomposition(&table, &BigUint::from(prefix));
                let text = order
                    .iter()
                    .map(|c| format!("S_{c}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                Output::new(
                    text,
                    json!({ "n": n, "N": prefix.to_string(), "blocks": order }),
                )
            } else {
                if prefix > limits.length_cap {
                    return Err(gzeck::Error::TooLarge {
                        length: prefix.to_string(),
                        cap: limits.length_cap,
                    }
                    .into());
                }
                let s = LetterString {
                    n,
                    letters: stream(n)?.take(prefix as usize).collect(),
                };
                Output::new(s.to_string(), json!({ "n": n, "prefix": s.indices() }))
            }
        }
        Command::Block { index } => {
            let table = SequenceTable::new(n)?;
            let b = block(&table, index, limits.length_cap)?;
            Output::new(
                b.to_string(),
                json!({ "n": n, "m": index, "block": b.indices() }),
            )
        }
        Command::CharAt { pos } => {
            let table = SequenceTable::new(n)?;
            let letter = char_at(&table, &pos)?;
            Output::new(
                letter.to_string(),
                json!({ "n": n, "pos": pos.to_string(), "letter": letter.index() }),
            )
        }
        Command::Counts {
            prefix,
            index,
            scan,
        } => {
            let table = SequenceTable::new(n)?;
            let counts = match (prefix, index) {
                (Some(len), _) if scan => {
                    let len = u64::try_from(&len).map_err(|_| gzeck::Error::ScanLimitExceeded {
                        requested: len.to_string(),
                        limit: limits.scan_limit,
                    })?;
                    count_prefix_scan(n, len, limits.scan_limit)?
                }
                (Some(len), _) => count_prefix(&table, &len),
                (None, Some(m)) if scan => block(&table, m, limits.length_cap)?.counts(),
                (None, Some(m)) => count_block(&table, m)?,
                (None, None) => return Err(Failure::Usage("give --prefix or -m".into())),
            };
            Output::new(
                counts.to_string(),
                serde_json::to_value(&counts).expect("counts serialize"),
            )
        }
        Command::Qseq {
            k,
            count,
            bound,
            oracle,
        } => {
            let table = SequenceTable::new(n)?;
            let values = match (count, bound) {
                (_, Some(b)) if oracle => q_oracle(&table, k, b, limits.scan_limit)?,
                (_, Some(b)) => gzeck::q_sequence_up_to(&table, k, &BigUint::from(b))?,
                (Some(c), None) => q_sequence(&table, k, c)?,
                (None, None) => return Err(Failure::Usage("give --count or --bound".into())),
            };
            Output {
                text: joined(&values),
                json: json!({ "n": n, "k": k, "q": strings(&values) }),
                bfile: Some(bfile(&values)),
            }
        }
        Command::Table1 { k, j } => {
            let table = SequenceTable::new(n)?;
            let (lo, hi) = table1_rows(&table, k, j)?;
            Output::new(
                format!("rows {lo}..={hi}"),
                json!({ "n": n, "k": k, "j": j, "rows": [lo.to_string(), hi.to_string()] }),
            )
        }
        Command::Zset { k, bound, oracle } => {
            let table = SequenceTable::new(n)?;
            let values = if oracle {
                z_oracle(&table, k, bound, limits.scan_limit)?
            } else {
                let spec = ZSetSpec::new(&table, k)?;
                z_set(&table, &spec, &BigUint::from(bound))?
            };
            Output {
                text: joined(&values),
                json: json!({ "n": n, "k": k, "z": strings(&values) }),
                bfile: Some(bfile(&values)),
            }
        }
        Command::Verify {
            checks,
            config,
            orders,
            n_max,
            depth,
            bound,
        } => return verify(common, limits, checks, config, orders, n_max, depth, bound),
    };
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    common: &Common,
    limits: Limits,
    checks: Vec<String>,
    config: Option<PathBuf>,
    orders: Vec<usize>,
    n_max: Option<u64>,
    depth: Option<i64>,
    bound: Option<u64>,
) -> Result<Output, Failure> {
    let mut cfg = match config {
        Some(path) => {
            let raw = fs::read_to_string(&path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let parsed = if path.extension().is_some_and(|e| e == "json") {
                serde_json::from_str(&raw).map_err(|e| e.to_string())
            } else {
                toml::from_str(&raw).map_err(|e| e.to_string())
            };
            parsed.map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))?
        }
        None => HarnessConfig::default(),
    };
    if !orders.is_empty() {
        cfg.thm_p2.orders = orders.clone();
        cfg.lemma_l1.orders = orders.clone();
        cfg.thm_m1.orders = orders.clone();
        cfg.thm_m5_counts.orders = orders.clone();
        cfg.section3.orders = orders.clone();
        cfg.section3.telescoping_orders = orders;
    }
    if let Some(v) = n_max {
        cfg.thm_p2.n_max = v;
        cfg.thm_m5_counts.n_max = v;
        cfg.thm_m5_counts.char_at_max = v;
    }
    if let Some(d) = depth {
        cfg.lemma_l1.depth = d;
        cfg.thm_m1.depth = d;
    }
    if let Some(b) = bound {
        cfg.section3.bound = b;
        cfg.section3.monotonic_max = b;
    }

    let ids: Vec<CheckId> = if checks.is_empty() {
        CheckId::ALL.to_vec()
    } else {
        checks
            .iter()
            .map(|c| c.parse::<CheckId>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Usage(e.to_string()))?
    };

    let reports = Harness::new().with_limits(limits).run(&cfg, &ids);
    let all_pass = reports.iter().all(|r| r.pass);
    let text = reports
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join("\n");
    let json = serde_json::to_value(&reports).expect("reports serialize");
    print_output(common.format, &Output::new(text, json)).map_err(Failure::Usage)?;
    if all_pass {
        Ok(Output::new(String::new(), Value::Null))
    } else {
        Err(Failure::ChecksFailed)
    }
}

fn print_output(format: Format, out: &Output) -> Result<(), String> {
    match format {
        Format::Text => println!("{}", out.text),
        Format::Json => println!("{}", out.json),
        Format::Bfile => match &out.bfile {
            Some(b) => println!("{b}"),
            None => return Err("--format bfile is only available for qseq and zset".into()),
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.common.format;
    let is_verify = matches!(cli.command, Command::Verify { .. });
    match run(cli) {
        Ok(out) => {
            if is_verify {
                return ExitCode::SUCCESS;
            }
            match print_output(format, &out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(2)
                }
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            if format == Format::Json {
                eprintln!(
                    "{}",
                    json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } })
                );
            } else {
                eprintln!("error [{}]: {e}", error_kind(&e));
            }
            ExitCode::from(1)
        }
        Err(Failure::ChecksFailed) => ExitCode::from(1),
    }
}
