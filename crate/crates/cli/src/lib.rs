//! Command-line front end for `ca-forge`.
//!
//! Exit codes: 0 success, 1 I/O error (and "not covering" for `verify`),
//! 2 invalid flags, parameters or input files, 3 construction error,
//! 4 verification failure.

pub mod arrayfile;
pub mod grid;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use ca_forge::bounds::{lll_first_stage_n, BoundReport};
use ca_forge::coverage::first_uncovered;
use ca_forge::pipeline::{benchmark, run, to_csv, RunReport, RunSpec, Stage1Kind};
use ca_forge::stage2::Stage2Kind;
use ca_forge::{Error, GroupKind, Parameters};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arrayfile::ArrayFile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_NOT_COVERING: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONSTRUCTION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

pub const REPORT_SCHEMA: &str = "ca-forge/1";

#[derive(Debug, Parser)]
#[command(name = "ca-forge", version, about = "Two-stage covering array construction and size bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a covering array.
    Construct(ConstructArgs),
    /// Check that an array file is a covering array.
    Verify(VerifyArgs),
    /// Print size bounds for a parameter triple or a range of k.
    Bounds(BoundsArgs),
    /// Run every spec of a grid file and write a CSV table.
    Benchmark(BenchmarkArgs),
    /// Print bound curves and constructed sizes over a range of k.
    PlotData(PlotArgs),
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub v: usize,
    #[arg(long, default_value = "rand", value_parser = parse_from_str::<Stage1Kind>)]
    pub stage1: Stage1Kind,
    #[arg(long, default_value = "naive", value_parser = parse_from_str::<Stage2Kind>)]
    pub stage2: Stage2Kind,
    #[arg(long, default_value_t = 1.0)]
    pub r_mult: f64,
    #[arg(long, default_value = "trivial", value_parser = parse_from_str::<GroupKind>)]
    pub group: GroupKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Array file to write; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Check full coverage of the final array.
    #[arg(long)]
    pub verify: bool,
    /// JSON run report to write.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = ca_forge::stage1::DEFAULT_MAX_RETRIES)]
    pub max_retries: u32,
    #[arg(long, default_value_t = ca_forge::stage1::DEFAULT_ITERATION_CAP)]
    pub iteration_cap: u64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub time_budget: Option<f64>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Strength to check; the header value when absent.
    #[arg(long)]
    pub t: Option<usize>,
    /// Must match the header when given.
    #[arg(long)]
    pub v: Option<usize>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub v: usize,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long)]
    pub grid: PathBuf,
    /// CSV file to write; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write 0 in the seconds column so reruns are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub v: usize,
    #[arg(long)]
    pub k_min: usize,
    #[arg(long)]
    pub k_max: usize,
    /// Second stages to run at every k, after the bound columns.
    #[arg(long, value_delimiter = ',', value_parser = parse_from_str::<Stage2Kind>)]
    pub stage2: Vec<Stage2Kind>,
    #[arg(long, default_value = "trivial", value_parser = parse_from_str::<GroupKind>)]
    pub group: GroupKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub jobs: Option<usize>,
}

fn parse_from_str<T>(s: &str) -> Result<T, String>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::new(EXIT_IO, format!("{}: {e}", path.display()))
    }
}

fn construction_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameters(_) | Error::NotPrimePower(_) | Error::NeedsKAtLeastTwoT { .. } | Error::SideCondition { .. } => {
            EXIT_USAGE
        }
        Error::VerificationFailed { .. } => EXIT_VERIFICATION,
        _ => EXIT_CONSTRUCTION,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(construction_code(&e), e.to_string())
    }
}

/// What a command printed, and its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    /// Usage and error messages.
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command, returning its
/// output instead of printing it.
pub fn run_captured<I, S>(args: I) -> CliOutput
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                CliOutput { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let mut out = Vec::new();
    let result = execute(cli.command, &mut out);
    let stdout = String::from_utf8(out).expect("commands print UTF-8");
    match result {
        Ok(code) => CliOutput { code, stdout, stderr: String::new() },
        Err(f) => CliOutput { code: f.code, stdout, stderr: format!("error: {}\n", f.message) },
    }
}

/// Parses `args` (program name first), runs the command and prints its
/// output. Returns the exit code.
pub fn run_cli<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let out = run_captured(args);
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    if let Err(e) = lock.write_all(out.stdout.as_bytes()).and_then(|_| lock.flush()) {
        eprintln!("error: stdout: {e}");
        return EXIT_IO;
    }
    eprint!("{}", out.stderr);
    out.code
}

fn execute(command: Command, out: &mut Vec<u8>) -> Result<i32, Failure> {
    match command {
        Command::Construct(a) => {
            let jobs = a.jobs;
            with_jobs(jobs, || construct(a, out))
        }
        Command::Verify(a) => {
            let jobs = a.jobs;
            with_jobs(jobs, || verify(a, out))
        }
        Command::Bounds(a) => bounds(a, out),
        Command::Benchmark(a) => {
            let jobs = a.jobs;
            with_jobs(jobs, || bench(a, out))
        }
        Command::PlotData(a) => {
            let jobs = a.jobs;
            with_jobs(jobs, || plot_data(a, out))
        }
    }
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T, Failure> + Send) -> Result<T, Failure> {
    match jobs {
        None => f(),
        Some(0) => Err(Failure::new(EXIT_USAGE, "--jobs must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::new(EXIT_IO, format!("thread pool: {e}")))?;
            pool.install(f)
        }
    }
}

fn write_out(path: Option<&Path>, text: &str, out: &mut Vec<u8>) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::new(EXIT_IO, format!("stdout: {e}"))),
    }
}

#[derive(Serialize)]
struct SpecJson {
    t: usize,
    k: usize,
    v: usize,
    stage1: String,
    stage2: String,
    r_mult: f64,
    group: String,
    seed: u64,
    verify: bool,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    schema: &'static str,
    #[serde(flatten)]
    report: &'a RunReport,
    spec: SpecJson,
}

/// The JSON document written by `construct --report`.
pub fn report_json(spec: &RunSpec, report: &RunReport) -> String {
    let doc = ReportJson {
        schema: REPORT_SCHEMA,
        report,
        spec: SpecJson {
            t: spec.p.t,
            k: spec.p.k,
            v: spec.p.v,
            stage1: spec.stage1.to_string(),
            stage2: spec.stage2.to_string(),
            r_mult: spec.r_mult,
            group: spec.group.to_string(),
            seed: spec.seed,
            verify: spec.verify,
        },
    };
    serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n"
}

fn construct(a: ConstructArgs, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let p = Parameters::new(a.t, a.k, a.v)?;
    let mut spec = RunSpec::new(p, a.stage1, a.stage2, a.group, a.seed);
    spec.r_mult = a.r_mult;
    spec.verify = a.verify;
    spec.max_retries = a.max_retries;
    spec.iteration_cap = a.iteration_cap;
    if let Some(b) = a.time_budget {
        if b.is_nan() || b <= 0.0 {
            return Err(Failure::new(EXIT_USAGE, format!("time budget {b} must be positive")));
        }
        spec.time_budget = Some(b);
    }
    let (array, report) = run(&spec)?;
    let file = ArrayFile { t: p.t, array };
    write_out(a.out.as_deref(), &file.to_text(), out)?;
    if let Some(path) = &a.report {
        std::fs::write(path, report_json(&spec, &report)).map_err(|e| Failure::io(path, e))?;
    }
    eprintln!(
        "N = {} ({} first-stage rows, {} uncovered, {} second-stage rows; bound {:.2})",
        report.n_final, report.n_stage1, report.uncovered_after_stage1, report.rows_stage2, report.bound_predicted
    );
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(&a.input).map_err(|e| Failure::io(&a.input, e))?;
    let file = ArrayFile::parse(&text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", a.input.display())))?;
    let v = file.array.levels();
    if let Some(want) = a.v {
        if want != v {
            return Err(Failure::new(EXIT_USAGE, format!("--v {want} does not match the file's v = {v}")));
        }
    }
    let t = a.t.unwrap_or(file.t);
    let p = Parameters::new(t, file.array.cols(), v).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    let result = first_uncovered(&file.array, &p)?;
    let io = |e: std::io::Error| Failure::new(EXIT_IO, format!("stdout: {e}"));
    match result {
        None => {
            writeln!(out, "covering: CA({};{},{},{})", file.array.rows(), t, p.k, v).map_err(io)?;
            Ok(EXIT_OK)
        }
        Some(i) => {
            writeln!(out, "not covering: columns {:?} symbols {:?}", i.columns, i.symbols).map_err(io)?;
            Ok(EXIT_NOT_COVERING)
        }
    }
}

const BOUNDS_HEADER: &str = "t,k,v,slj,slj_ceil,discrete_slj,two_stage,two_stage_ceil,gss,gss_ceil,\
cyclic_two_stage,cyclic_two_stage_ceil,frobenius_two_stage,frobenius_two_stage_ceil,lll_two_stage,\
lll_two_stage_ceil,optimistic_coloring,optimistic_coloring_ceil,conservative_coloring,conservative_coloring_ceil,\
lll_n,lll_m";

fn real(x: f64) -> String {
    format!("{x:.4},{}", x.ceil())
}

fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_else(|| ",".into())
}

#[derive(Serialize)]
struct BoundsJson {
    #[serde(flatten)]
    report: BoundReport,
    lll_n: Option<u64>,
    lll_m: Option<u64>,
}

fn bounds(a: BoundsArgs, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let k_max = a.k_max.unwrap_or(a.k);
    if k_max < a.k {
        return Err(Failure::new(EXIT_USAGE, format!("--k-max {k_max} is below --k {}", a.k)));
    }
    let mut rows = Vec::with_capacity(k_max - a.k + 1);
    for k in a.k..=k_max {
        let p = Parameters::new(a.t, k, a.v).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
        let lll = lll_first_stage_n(&p).ok();
        rows.push(BoundsJson { report: BoundReport::new(&p), lll_n: lll.map(|l| l.n), lll_m: lll.map(|l| l.m_opt) });
    }
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&rows).expect("bounds serialize") + "\n",
        Format::Csv => {
            let mut s = String::from(BOUNDS_HEADER);
            s.push('\n');
            for row in &rows {
                let r = &row.report;
                let opt = |x: Option<u64>| x.map(|n| n.to_string()).unwrap_or_default();
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.t,
                    r.k,
                    r.v,
                    real(r.slj),
                    r.discrete_slj,
                    real(r.two_stage),
                    opt_real(r.gss),
                    real(r.cyclic_two_stage),
                    opt_real(r.frobenius_two_stage),
                    opt_real(r.lll_two_stage),
                    real(r.optimistic_coloring),
                    real(r.conservative_coloring),
                    opt(row.lll_n),
                    opt(row.lll_m),
                )
                .unwrap();
            }
            s
        }
    };
    write_out(None, &text, out)?;
    Ok(EXIT_OK)
}

fn bench(a: BenchmarkArgs, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(&a.grid).map_err(|e| Failure::io(&a.grid, e))?;
    let specs = grid::parse_grid(&text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", a.grid.display())))?;
    let rows = benchmark(&specs)?;
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    write_out(a.out.as_deref(), &to_csv(&rows, !a.no_timing), out)?;
    if failed > 0 {
        eprintln!("{failed} of {} runs failed; see the verified column", rows.len());
    }
    Ok(EXIT_OK)
}

/// One row per k: the bound curves, then the constructed size for each
/// requested second stage (empty when the run fails).
fn plot_data(a: PlotArgs, out: &mut Vec<u8>) -> Result<i32, Failure> {
    if a.k_max < a.k_min {
        return Err(Failure::new(EXIT_USAGE, format!("--k-max {} is below --k-min {}", a.k_max, a.k_min)));
    }
    let mut s = String::from("k,two_stage,optimistic_coloring,conservative_coloring,lll_two_stage");
    for kind in &a.stage2 {
        write!(s, ",{kind}").unwrap();
    }
    s.push('\n');
    for k in a.k_min..=a.k_max {
        let p = Parameters::new(a.t, k, a.v).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
        let r = BoundReport::new(&p);
        let lll = r.lll_two_stage.map(|x| format!("{x:.4}")).unwrap_or_default();
        write!(s, "{k},{:.4},{:.4},{:.4},{lll}", r.two_stage, r.optimistic_coloring, r.conservative_coloring).unwrap();
        for &kind in &a.stage2 {
            let mut spec = RunSpec::new(p, Stage1Kind::Rand, kind, a.group, a.seed);
            spec.verify = false;
            match run(&spec) {
                Ok((_, report)) => write!(s, ",{}", report.n_final).unwrap(),
                Err(Error::InvalidParameters(m)) => return Err(Failure::new(EXIT_USAGE, m)),
                Err(_) => s.push(','),
            }
        }
        s.push('\n');
    }
    write_out(None, &s, out)?;
    Ok(EXIT_OK)
}
