//! The `ffstat` command line.
//!
//! Exit codes: 0 success, 1 a verification row failed, 2 bad flags or a
//! violated constraint, 3 memory budget exceeded, 4 I/O or cache error,
//! 5 any other statistics error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::polyring::Poly;
use crate::rational::ExactRational;
use crate::sieve::{build_table, cache, ArithFn, ArithTable, Budget, DEFAULT_BUDGET};
use crate::stats;
use crate::verify::{self, Grid, Suite, SuiteRun, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "ffstat", version, about = "Exact arithmetic statistics over F_q[T]")]
pub struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Memory budget for tables, in bytes.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Directory for cached tables.
    #[arg(long, global = true, env = "FFSTAT_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a table and store it in the cache directory.
    Tables(TablesArgs),
    /// Compute one statistic.
    Stat(StatArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Run the suites listed in a JSON config file.
    Sweep(SweepArgs),
}

/// Field selection: `--q`, or `--p` with `--k`.
#[derive(Debug, Args, Clone)]
pub struct FieldArgs {
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub k: Option<u32>,
}

impl FieldArgs {
    pub fn resolve(&self) -> Result<FieldSpec> {
        match (self.q, self.p) {
            (Some(q), None) => {
                let field = FieldSpec::from_order(q)?;
                if self.k.is_some_and(|k| k != field.k()) {
                    return Err(Error::ConstraintViolation(format!("--k does not match q = {q}")));
                }
                Ok(field)
            }
            (None, Some(p)) => FieldSpec::new(p, self.k.unwrap_or(1)),
            (Some(_), Some(_)) => Err(Error::ConstraintViolation("give either --q or --p/--k, not both".into())),
            (None, None) => Err(Error::ConstraintViolation("missing --q (or --p/--k)".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Function {
    Lambda,
    Mu,
    Divisor,
    Spf,
}

impl From<Function> for ArithFn {
    fn from(f: Function) -> Self {
        match f {
            Function::Lambda => ArithFn::Lambda,
            Function::Mu => ArithFn::Mu,
            Function::Divisor => ArithFn::Divisor,
            Function::Spf => ArithFn::Spf,
        }
    }
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum)]
    pub function: Function,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Statistic {
    /// (1/q^n) sum α(f) α(f+K)
    Autocorr,
    /// autocorrelation minus its main term
    ErrorTerm,
    /// sum of error terms over monic shifts of degree k (and over all nonzero shifts)
    SumE,
    /// sum of E(KQ) over monic K with deg K < n - deg Q
    TwistedSumE,
    /// sum of α over the interval I(A;h)
    IntervalSum,
    /// variance of interval sums over centers A in M_n
    IntervalVariance,
    /// Λ summed over f ≡ A mod Q
    ProgressionSum,
    /// G(n;Q)
    ProgressionVariance,
    /// number of reduced residues mod Q
    EulerPhi,
    /// sum over M_n of products of shifted Möbius values
    Chowla,
    /// mean of α over M_n
    Mean,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq, Default)]
pub enum TextOrJson {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct StatArgs {
    #[arg(value_enum)]
    pub statistic: Statistic,
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub h: Option<u32>,
    /// Degree of the shifts in `sum-e`.
    #[arg(long = "kshift")]
    pub kshift: Option<u32>,
    #[arg(long, value_enum, default_value_t = Function::Lambda)]
    pub function: Function,
    /// Shift polynomial, ascending coefficients ("c0,c1,...").
    #[arg(long)]
    pub shift: Option<String>,
    /// Modulus polynomial.
    #[arg(long = "Q")]
    pub modulus: Option<String>,
    /// Residue or interval center.
    #[arg(long = "A")]
    pub center: Option<String>,
    /// Chowla shifts separated by ';', e.g. "0;1,1".
    #[arg(long)]
    pub shifts: Option<String>,
    /// Chowla exponents, e.g. "1,2".
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
    pub format: TextOrJson,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args, Default, Clone)]
pub struct VerifyArgs {
    /// t11, t12, t13, t14, c15, t41, t42, t44, t45, identities or chowla.
    #[arg(long)]
    pub suite: String,
    /// Comma-separated field orders.
    #[arg(long, value_delimiter = ',')]
    pub q_list: Option<Vec<u64>>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub h: Option<u32>,
    /// Shift degree (t13).
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long = "Q")]
    pub modulus: Option<String>,
    #[arg(long)]
    pub n_max: Option<u32>,
    #[arg(long)]
    pub h_max: Option<u32>,
    /// Degrees for the chowla suite.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<u32>>,
    /// Shift pairs per cell (chowla).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pass threshold on the normalized deviation ("3", "2.5", "7/2").
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    /// Report file (stdout if absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Record wall time per row.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct Exit {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = exit_code(&e);
        let message = if code == 5 { format!("{}: {e}", e.name()) } else { e.to_string() };
        Exit { code, message }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonPrime(_)
        | Error::FieldTooLarge { .. }
        | Error::ZeroDegree
        | Error::NotPrimePower(_)
        | Error::BadCoefficient { .. }
        | Error::BadLiteral(_)
        | Error::ConstraintViolation(_) => 2,
        Error::BudgetExceeded { .. } => 3,
        Error::Io(_) | Error::BadCache(_) => 4,
        _ => 5,
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(exit) => {
            let _ = writeln!(err, "error: {}", exit.message);
            exit.code
        }
    }
}

/// Runs a parsed command inside a pool of `--threads` workers.
pub fn run(cli: &Cli, out: &mut (dyn Write + Send)) -> std::result::Result<i32, Exit> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Exit { code: 2, message: format!("cannot start {} threads: {e}", cli.threads) })?;
    pool.install(|| match &cli.command {
        Command::Tables(a) => cmd_tables(cli, a, out),
        Command::Stat(a) => cmd_stat(cli, a, out),
        Command::Verify(a) => cmd_verify(cli, a, out, None),
        Command::Sweep(a) => cmd_sweep(cli, a, out),
    })
}

fn io_exit(path: &Path, e: impl std::fmt::Display) -> Exit {
    Exit { code: 4, message: format!("{}: {e}", path.display()) }
}

fn cache_dir(cli: &Cli) -> PathBuf {
    cli.cache_dir.clone().unwrap_or_else(|| PathBuf::from("ffstat-cache"))
}

/// Builds (or reuses) one cached table and prints its path and CRC.
pub fn cmd_tables(cli: &Cli, a: &TablesArgs, out: &mut (dyn Write + Send)) -> std::result::Result<i32, Exit> {
    let field = a.field.resolve()?;
    let func: ArithFn = a.function.into();
    let dir = cache_dir(cli);
    fs::create_dir_all(&dir).map_err(|e| io_exit(&dir, e))?;
    let path = dir.join(cache::file_name(field.q(), a.n, func));
    if path.exists() {
        if let Ok(table) = cache::read(&path) {
            if table.field() == &field && table.n() == a.n && table.func() == func {
                let crc = cache::payload_crc(&table);
                writeln!(out, "cache hit {} crc32={crc:08x}", path.display()).map_err(|e| io_exit(&path, e))?;
                return Ok(0);
            }
        }
    }
    let table = build_table(&field, a.n, func, Budget(cli.budget))?;
    cache::write(&table, &path)?;
    let crc = cache::payload_crc(&table);
    writeln!(out, "wrote {} crc32={crc:08x}", path.display()).map_err(|e| io_exit(&path, e))?;
    Ok(0)
}

/// A table from the cache directory when a valid file is there, otherwise built in memory.
fn obtain_table(cli: &Cli, field: &FieldSpec, n: u32, func: ArithFn) -> Result<ArithTable> {
    if let Some(dir) = &cli.cache_dir {
        let path = dir.join(cache::file_name(field.q(), n, func));
        if let Ok(table) = cache::read(&path) {
            if table.field() == field && table.n() == n {
                return Ok(table);
            }
        }
    }
    build_table(field, n, func, Budget(cli.budget))
}

fn need<T: Clone>(v: &Option<T>, flag: &str, stat: Statistic) -> Result<T> {
    v.clone().ok_or_else(|| {
        let name = stat.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default();
        Error::ConstraintViolation(format!("{name} requires --{flag}"))
    })
}

fn parse_u8_list(s: &str) -> Result<Vec<u8>> {
    s.split(',').map(|t| t.trim().parse::<u8>().map_err(|_| Error::BadLiteral(s.to_string()))).collect()
}

/// A labelled exact value.
struct Value {
    label: &'static str,
    value: ExactRational,
}

pub fn cmd_stat(cli: &Cli, a: &StatArgs, out: &mut (dyn Write + Send)) -> std::result::Result<i32, Exit> {
    let values = compute_stat(cli, a)?;
    let text = match a.format {
        TextOrJson::Text => {
            let mut s = String::new();
            for v in &values {
                if values.len() > 1 {
                    s.push_str(v.label);
                    s.push('\t');
                }
                s.push_str(&format!("{}\t{}\n", v.value, v.value.to_decimal(12)));
            }
            s
        }
        TextOrJson::Json => {
            let name = a.statistic.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default();
            let items: Vec<_> = values
                .iter()
                .map(|v| {
                    json!({
                        "label": v.label,
                        "num": v.value.numer().to_string(),
                        "den": v.value.denom().to_string(),
                        "decimal": v.value.to_decimal(12),
                    })
                })
                .collect();
            let body = json!({ "statistic": name, "values": items });
            format!("{}\n", serde_json::to_string_pretty(&body).expect("json"))
        }
    };
    out.write_all(text.as_bytes()).map_err(|e| Exit { code: 4, message: e.to_string() })?;
    Ok(0)
}

fn compute_stat(cli: &Cli, a: &StatArgs) -> Result<Vec<Value>> {
    let stat = a.statistic;
    let field = a.field.resolve()?;
    let func: ArithFn = a.function.into();
    let poly = |lit: &Option<String>, flag: &str| -> Result<Poly> { Poly::parse(&field, &need(lit, flag, stat)?) };
    let one = |label: &'static str, value: ExactRational| Ok(vec![Value { label, value }]);
    let int = |v: i64| ExactRational::from_int(v);
    if stat == Statistic::EulerPhi {
        return one("phi", ExactRational::from_int(stats::euler_phi(&poly(&a.modulus, "Q")?)?));
    }
    let n = need(&a.n, "n", stat)?;
    let table_for = |func: ArithFn| obtain_table(cli, &field, n, func);
    match stat {
        Statistic::Autocorr => one("autocorr", stats::autocorr(&table_for(func)?, &poly(&a.shift, "shift")?)?),
        Statistic::ErrorTerm => one("error", stats::error_term(&table_for(func)?, &poly(&a.shift, "shift")?)?),
        Statistic::SumE => {
            let s = stats::sum_e(&table_for(func)?, need(&a.kshift, "kshift", stat)?)?;
            Ok(vec![Value { label: "monic", value: s.monic }, Value { label: "all", value: s.all_nonzero }])
        }
        Statistic::TwistedSumE => one("twisted", stats::twisted_sum_e(&table_for(func)?, &poly(&a.modulus, "Q")?)?),
        Statistic::IntervalSum => {
            let h = need(&a.h, "h", stat)?;
            one("sum", int(stats::interval_sum(&table_for(func)?, &poly(&a.center, "A")?, h)?))
        }
        Statistic::IntervalVariance => {
            one("variance", stats::interval_variance(&table_for(func)?, need(&a.h, "h", stat)?)?)
        }
        Statistic::ProgressionSum => {
            let t = table_for(ArithFn::Lambda)?;
            one("psi", int(stats::progression_sum(&t, &poly(&a.modulus, "Q")?, &poly(&a.center, "A")?)?))
        }
        Statistic::ProgressionVariance => {
            one("G", stats::progression_variance(&table_for(ArithFn::Lambda)?, &poly(&a.modulus, "Q")?)?)
        }
        Statistic::Chowla => {
            let lits = need(&a.shifts, "shifts", stat)?;
            let shifts = lits.split(';').map(|s| Poly::parse(&field, s.trim())).collect::<Result<Vec<_>>>()?;
            let eps = match &a.eps {
                Some(e) => parse_u8_list(e)?,
                None => vec![1; shifts.len()],
            };
            let s = stats::chowla_sum(&table_for(ArithFn::Mu)?, &shifts, &eps)?;
            let bound = ExactRational::from_f64(s.bound).unwrap_or_default();
            Ok(vec![
                Value { label: "sum", value: ExactRational::from_int(s.value) },
                Value { label: "bound", value: bound },
                Value { label: "within", value: int(s.within_bound as i64) },
            ])
        }
        Statistic::Mean => one("mean", stats::mean_value(&table_for(func)?)?),
        Statistic::EulerPhi => unreachable!(),
    }
}

fn parse_coeffs(lit: &str) -> Result<Vec<u32>> {
    let t = lit.trim();
    if t.is_empty() {
        return Err(Error::BadLiteral(lit.to_string()));
    }
    t.split(',').map(|c| c.trim().parse::<u32>().map_err(|_| Error::BadLiteral(lit.to_string()))).collect()
}

impl VerifyArgs {
    fn grid(&self) -> Result<Grid> {
        Ok(Grid {
            q_list: self.q_list.clone(),
            n: self.n,
            h: self.h,
            k: self.k,
            modulus: self.modulus.as_deref().map(parse_coeffs).transpose()?,
            n_max: self.n_max,
            h_max: self.h_max,
            n_list: self.n_list.clone(),
            samples: self.samples,
            seed: self.seed,
            threshold: self.threshold.as_deref().map(verify::parse_rational).transpose()?,
        })
    }
}

fn render(reports: &[verify::VerificationReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => verify::to_json(reports),
        ReportFormat::Csv => verify::to_csv(reports),
    }
}

/// Human-readable summary of a run: one line per row, failing rows marked,
/// then the decay fits.
pub fn summary(run: &SuiteRun) -> String {
    let mut s = String::new();
    for r in &run.reports {
        let mut params = format!("q={} n={}", r.q, r.n);
        if let Some(h) = r.h {
            params.push_str(&format!(" h={h}"));
        }
        if let Some(k) = r.kshift {
            params.push_str(&format!(" k={k}"));
        }
        if let Some(m) = &r.modulus {
            params.push_str(&format!(" Q={m}"));
        }
        s.push_str(&format!(
            "{} {:<28} {:<24} computed={} predicted={} normdev={:.6}",
            if r.pass { "PASS" } else { "FAIL" },
            r.theorem,
            params,
            r.computed().to_decimal(12),
            r.predicted().to_decimal(12),
            r.normalized_deviation,
        ));
        if let Some(note) = &r.note {
            s.push_str(&format!(" [{note}]"));
        }
        s.push('\n');
    }
    for (name, fit) in &run.fits {
        match fit {
            Ok(f) => s.push_str(&format!("slope {name}: {:.4} ({} points, {} exact zeros)\n", f.slope, f.points, f.zeros)),
            Err(e) => s.push_str(&format!("slope {name}: n/a ({e})\n")),
        }
    }
    s
}

/// Runs one suite. The report goes to `--output` (or stdout when absent);
/// the summary goes to stdout when the report is in a file.
pub fn cmd_verify(
    cli: &Cli,
    a: &VerifyArgs,
    out: &mut (dyn Write + Send),
    base: Option<&Path>,
) -> std::result::Result<i32, Exit> {
    let suite: Suite = a.suite.parse()?;
    let cfg = VerifyConfig { budget: Budget(cli.budget), timings: a.timings, ..VerifyConfig::default() };
    let run = verify::run_suite(suite, a.grid()?, &cfg)?;
    let report = render(&run.reports, a.format);
    let write_err = |e: std::io::Error| Exit { code: 4, message: e.to_string() };
    match &a.output {
        Some(path) => {
            let path = match base {
                Some(b) if path.is_relative() => b.join(path),
                _ => path.clone(),
            };
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| io_exit(parent, e))?;
            }
            fs::write(&path, &report).map_err(|e| io_exit(&path, e))?;
            out.write_all(summary(&run).as_bytes()).map_err(write_err)?;
        }
        None => {
            out.write_all(report.as_bytes()).map_err(write_err)?;
            if !run.all_pass() {
                for r in run.failures() {
                    writeln!(out, "# FAIL {} q={} n={} deviation={}", r.theorem, r.q, r.n, r.deviation).map_err(write_err)?;
                }
            }
        }
    }
    Ok(if run.all_pass() { 0 } else { 1 })
}

/// One job of a sweep config.
#[derive(Debug, Clone, Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepJob {
    pub suite: String,
    pub output: PathBuf,
    #[serde(default)]
    pub format: ReportFormat,
    pub q_list: Option<Vec<u64>>,
    pub n: Option<u32>,
    pub h: Option<u32>,
    pub k: Option<u32>,
    #[serde(rename = "Q")]
    pub modulus: Option<String>,
    pub n_max: Option<u32>,
    pub h_max: Option<u32>,
    pub n_list: Option<Vec<u32>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub threshold: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub jobs: Vec<serde_json::Value>,
    /// Manifest path, relative to the config file (default `manifest.json`).
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestEntry {
    pub suite: String,
    pub output: PathBuf,
    pub rows: usize,
    pub all_pass: bool,
}

/// Runs each job of the config in order; writes each report and a manifest
/// listing them. A malformed job stops the sweep with exit code 2.
pub fn cmd_sweep(cli: &Cli, a: &SweepArgs, out: &mut (dyn Write + Send)) -> std::result::Result<i32, Exit> {
    let text = fs::read_to_string(&a.config).map_err(|e| io_exit(&a.config, e))?;
    let config: SweepConfig =
        serde_json::from_str(&text).map_err(|e| Exit { code: 2, message: format!("{}: {e}", a.config.display()) })?;
    if config.jobs.is_empty() {
        return Err(Exit { code: 2, message: "no jobs".into() });
    }
    let base = a.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut manifest = Vec::new();
    let mut code = 0;
    for (i, raw) in config.jobs.iter().enumerate() {
        let job: SweepJob = serde_json::from_value(raw.clone())
            .map_err(|e| Exit { code: 2, message: format!("job {}: {e}", i + 1) })?;
        let args = VerifyArgs {
            suite: job.suite.clone(),
            q_list: job.q_list.clone(),
            n: job.n,
            h: job.h,
            k: job.k,
            modulus: job.modulus.clone(),
            n_max: job.n_max,
            h_max: job.h_max,
            n_list: job.n_list.clone(),
            samples: job.samples,
            seed: job.seed,
            threshold: job.threshold.clone(),
            format: job.format,
            output: Some(job.output.clone()),
            timings: false,
        };
        writeln!(out, "== job {}: {}", i + 1, job.suite).map_err(|e| Exit { code: 4, message: e.to_string() })?;
        let job_code = cmd_verify(cli, &args, out, Some(&base))
            .map_err(|e| Exit { code: e.code, message: format!("job {}: {}", i + 1, e.message) })?;
        let path = base.join(&job.output);
        let rows = match job.format {
            ReportFormat::Json => verify::from_json(&fs::read_to_string(&path).map_err(|e| io_exit(&path, e))?)?.len(),
            ReportFormat::Csv => verify::from_csv(&fs::read_to_string(&path).map_err(|e| io_exit(&path, e))?)?.len(),
        };
        manifest.push(ManifestEntry { suite: job.suite.clone(), output: job.output.clone(), rows, all_pass: job_code == 0 });
        code = code.max(job_code);
    }
    let manifest_path = base.join(config.manifest.unwrap_or_else(|| PathBuf::from("manifest.json")));
    let body = format!("{}\n", serde_json::to_string_pretty(&json!({ "jobs": manifest })).expect("json"));
    fs::write(&manifest_path, body).map_err(|e| io_exit(&manifest_path, e))?;
    writeln!(out, "manifest {}", manifest_path.display()).map_err(|e| Exit { code: 4, message: e.to_string() })?;
    Ok(code)
}
