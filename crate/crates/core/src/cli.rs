//! The `seqlab` command line: `table`, `verify`, `series`, `oracle`, `stirling`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::arith::{ExactRational, Nat};
use crate::error::Error;
use crate::oracle;
use crate::report::{CheckName, CheckResult, Status};
use crate::sequence::{SeqRow, TableStream};
use crate::series;
use crate::verifier::{self, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "seqlab", version, about = "Exact tables and checks for x(n+1) = 1 + n/x(n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write rows n, a, x_num, x_den, d, e, q for n = 0..=max.
    Table {
        #[arg(long = "max", default_value_t = 9)]
        max_n: u64,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the checks and print a report.
    Verify {
        #[arg(long = "max", default_value_t = 1000)]
        max_n: u64,
        /// Comma-separated subset of check names.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Largest prime used by the congruence check.
        #[arg(long = "primes", default_value_t = 97)]
        prime_limit: u64,
        /// Truncation order of the series identities.
        #[arg(long = "order", default_value_t = 600)]
        series_order: usize,
        #[arg(long = "oracle-max", default_value_t = oracle::ENUMERATION_MAX)]
        oracle_max: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the generating-function identities at a truncation order.
    Series {
        #[arg(long, default_value_t = 600)]
        order: usize,
    },
    /// Count involutions by enumeration and compare with a_n.
    Oracle {
        #[arg(long = "max", default_value_t = oracle::ENUMERATION_MAX)]
        max_n: u64,
    },
    /// Print (ln a_n - ln(n!)/2) / sqrt(n) at the given points.
    Stirling {
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 100, 400, 900, 1600])]
        points: Vec<u64>,
    },
}

/// One exported table row; big integers are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRecord {
    pub n: u64,
    pub a: String,
    pub x_num: String,
    pub x_den: String,
    pub d: String,
    pub e: u64,
    pub q: String,
}

impl From<&SeqRow> for TableRecord {
    fn from(row: &SeqRow) -> Self {
        Self {
            n: row.n,
            a: row.a.to_string(),
            x_num: row.x_num().to_string(),
            x_den: row.den.to_string(),
            d: row.d.to_string(),
            e: row.e,
            q: row.q.to_string(),
        }
    }
}

impl TableRecord {
    /// Rebuilds a [`SeqRow`] from the exported strings.
    pub fn to_row(&self) -> Result<SeqRow, String> {
        let parse = |field: &str, s: &str| -> Result<Nat, String> {
            s.parse::<Nat>().map_err(|e| format!("n={}: field {field}: {e}", self.n))
        };
        let x_num = parse("x_num", &self.x_num)?;
        let den = parse("x_den", &self.x_den)?;
        let x = ExactRational::from_nat_ratio(&x_num, &den).map_err(|e| e.to_string())?;
        if x.numer().magnitude() != &x_num || x.denom().magnitude() != &den {
            return Err(format!("n={}: x_num/x_den not reduced", self.n));
        }
        Ok(SeqRow {
            n: self.n,
            a: parse("a", &self.a)?,
            x,
            d: parse("d", &self.d)?,
            e: self.e,
            q: parse("q", &self.q)?,
            den,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool_version: String,
    pub config: VerifyConfig,
    pub results: Vec<CheckResult>,
    pub aggregate: Status,
}

impl ReportDocument {
    pub fn new(config: VerifyConfig, results: Vec<CheckResult>) -> Self {
        let aggregate = if results.iter().all(CheckResult::passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            tool_version: TOOL_VERSION.to_string(),
            config,
            results,
            aggregate,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `PASS|FAIL name [lo,hi] (elapsed)`, with counterexamples indented below.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            out.push_str(&format!(
                "{} {} [{},{}] ({} ms)\n",
                r.status, r.name, r.range.lo, r.range.hi, r.elapsed_ms
            ));
            for c in &r.counterexamples {
                out.push_str(&format!("    n={}: {}\n", c.n, c.detail));
            }
        }
        out.push_str(&format!("aggregate: {}\n", self.aggregate));
        out
    }
}

fn open_output(out: Option<&PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn usage(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn warn_if_large(max_n: u64) -> Result<(), i32> {
    if max_n > verifier::MAX_N_CEILING {
        return Err(usage(Error::LimitTooLarge {
            max: verifier::MAX_N_CEILING,
            got: max_n,
        }));
    }
    if max_n > verifier::MAX_N_WARN {
        eprintln!(
            "warning: a_n has about (n/2) log10(n) digits; max {max_n} will take a while"
        );
    }
    Ok(())
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

pub fn cmd_table(max_n: u64, format: TableFormat, out: Option<&PathBuf>, jobs: Option<usize>) -> i32 {
    if let Err(code) = warn_if_large(max_n) {
        return code;
    }
    let written = with_pool(jobs, move || write_table(max_n, format, open_output(out)?));
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => usage(format!("cannot write output: {e}")),
    }
}

fn write_table(max_n: u64, format: TableFormat, mut sink: Box<dyn Write>) -> io::Result<()> {
    let rows = TableStream::new(max_n);
    match format {
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(sink);
            for row in rows {
                w.serialize(TableRecord::from(&row))?;
            }
            w.flush()?;
        }
        TableFormat::Json => {
            sink.write_all(b"[\n")?;
            for (i, row) in rows.enumerate() {
                if i > 0 {
                    sink.write_all(b",\n")?;
                }
                serde_json::to_writer(&mut sink, &TableRecord::from(&row))?;
            }
            sink.write_all(b"\n]\n")?;
            sink.flush()?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_verify(
    max_n: u64,
    checks: Option<Vec<String>>,
    prime_limit: u64,
    series_order: usize,
    oracle_max: u64,
    seed: u64,
    jobs: Option<usize>,
    format: ReportFormat,
    out: Option<&PathBuf>,
) -> i32 {
    let checks = match checks {
        Some(list) => {
            let parsed: Result<Vec<CheckName>, Error> =
                list.iter().map(|s| s.trim().parse()).collect();
            match parsed {
                Ok(v) => Some(v),
                Err(e) => return usage(e),
            }
        }
        None => None,
    };
    if let Err(code) = warn_if_large(max_n) {
        return code;
    }
    let config = VerifyConfig {
        max_n,
        prime_limit,
        series_order,
        oracle_max,
        checks,
        seed,
        jobs,
        fault: None,
    };
    let results = match verifier::run_all(&config) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    let report = ReportDocument::new(config, results);
    let body = match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Text => report.to_text(),
    };
    let written = open_output(out).and_then(|mut w| {
        w.write_all(body.as_bytes())?;
        w.flush()
    });
    if let Err(e) = written {
        return usage(format!("cannot write output: {e}"));
    }
    match report.aggregate {
        Status::Pass => EXIT_OK,
        Status::Fail => EXIT_FAIL,
    }
}

pub fn cmd_series(order: usize) -> i32 {
    if order < 2 {
        return usage(format!("--order must be at least 2, got {order}"));
    }
    let result = match verifier::check_series(order) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    let f = series::egf_f(order);
    let mut out = io::stdout().lock();
    for (n, c) in f.coeffs().iter().enumerate() {
        let _ = writeln!(out, "a_{n}/{n}! = {c}");
    }
    print_result(&mut out, &result);
    exit_for(&result)
}

pub fn cmd_oracle(max_n: u64) -> i32 {
    let counts = match oracle::involution_counts(max_n) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let result = match oracle::check_involution_identity(max_n) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    let mut out = io::stdout().lock();
    for (n, c) in counts.iter().enumerate() {
        let _ = writeln!(out, "{n} {c}");
    }
    print_result(&mut out, &result);
    exit_for(&result)
}

pub fn cmd_stirling(points: &[u64]) -> i32 {
    if let Some(&max) = points.iter().max() {
        if let Err(code) = warn_if_large(max) {
            return code;
        }
    }
    match verifier::stirling_diagnostic(points) {
        Ok(rows) => {
            let mut out = io::stdout().lock();
            let _ = writeln!(out, "n,value");
            for (n, v) in rows {
                let _ = writeln!(out, "{n},{v:.6}");
            }
            EXIT_OK
        }
        Err(e) => usage(e),
    }
}

fn print_result(out: &mut impl Write, r: &CheckResult) {
    let _ = writeln!(out, "{} {} [{},{}]", r.status, r.name, r.range.lo, r.range.hi);
    for c in &r.counterexamples {
        let _ = writeln!(out, "    n={}: {}", c.n, c.detail);
    }
}

fn exit_for(r: &CheckResult) -> i32 {
    if r.passed() {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Table {
            max_n,
            format,
            out,
            jobs,
        } => cmd_table(max_n, format, out.as_ref(), jobs),
        Command::Verify {
            max_n,
            checks,
            prime_limit,
            series_order,
            oracle_max,
            seed,
            jobs,
            format,
            out,
        } => cmd_verify(
            max_n,
            checks,
            prime_limit,
            series_order,
            oracle_max,
            seed,
            jobs,
            format,
            out.as_ref(),
        ),
        Command::Series { order } => cmd_series(order),
        Command::Oracle { max_n } => cmd_oracle(max_n),
        Command::Stirling { points } => cmd_stirling(&points),
    }
}

/// Parses `args`, mapping clap's own errors onto [`EXIT_USAGE`].
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
