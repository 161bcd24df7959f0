//! Command-line front end: `count`, `table` and `verify`.
//!
//! JSON is the canonical output and CSV a projection of it. Timings live only
//! in the JSON `meta` object, so everything else is byte-deterministic.

pub mod jobs;
pub mod verify;

use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::Value;

use qcircle::formulas::{
    mor_exact, mor_from_counts, n_circle, n_exact, n_primitive, primitive_from_counts, Method,
};
use qcircle::oracle::{brute_mor, brute_n, brute_n_gram, brute_primitive, convolution_count, DEFAULT_MEMORY};
use qcircle::Error;

pub use jobs::{Emit, JobSpec, Quantity, RawJob};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => {
                CliError::Budget(format!("{e} (--method conv), or raise --budget"))
            }
            Error::MemoryExceeded { .. } => CliError::Budget(e.to_string()),
            Error::NonIntegral(_) | Error::Inconsistent(_) => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qcircle", version, about = "Exact point counts on quadrics over F_q(t)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// One report per (P, method).
    Count(JobArgs),
    /// Rows (P, N, primitive N, Mor) per method.
    Table(JobArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct JobArgs {
    /// Odd prime.
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub nu: u32,
    /// Monic modulus of F_q over F_p, coefficients low to high.
    #[arg(long)]
    pub modulus: Option<String>,
    /// Diagonal coefficients: integers, or `[c0 c1 ...]` tuples when nu > 1.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// Symmetric Gram matrix, rows separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub gram: Option<String>,
    #[arg(long = "P")]
    pub big_p: Option<usize>,
    /// Inclusive, e.g. `1..4`.
    #[arg(long = "P-range")]
    pub p_range: Option<String>,
    /// Comma list of exact, circle, brute, conv.
    #[arg(long, default_value = "exact")]
    pub method: String,
    /// n, primitive or mor (count only).
    #[arg(long, default_value = "n")]
    pub quantity: String,
    #[arg(long, default_value = "json")]
    pub emit: String,
    /// Enumeration budget, e.g. 1e9; defaults to $QCIRCLE_BUDGET or 1e8.
    #[arg(long)]
    pub budget: Option<String>,
}

impl JobArgs {
    pub fn raw(&self) -> RawJob {
        RawJob {
            p: self.p,
            nu: self.nu,
            modulus: self.modulus.clone(),
            coeffs: self.coeffs.clone(),
            gram: self.gram.clone(),
            big_p: self.big_p,
            p_range: self.p_range.clone(),
            method: self.method.clone(),
            quantity: self.quantity.clone(),
            emit: self.emit.clone(),
            budget: self.budget.clone(),
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// gauss, srf, lemma31, lemma32, counts, mor or phis.
    pub suite: String,
    #[arg(long, default_value_t = 3)]
    pub q: u32,
    #[arg(long)]
    pub maxdeg: Option<usize>,
    #[arg(long)]
    pub maxk: Option<u32>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub pmax: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub mmax: Option<usize>,
    #[arg(long)]
    pub budget: Option<String>,
    #[arg(long, default_value = "json")]
    pub emit: String,
}

/// Big integers as bare JSON numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n: serde_json::Number = self.0.to_string().parse().map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub runtime_ms: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldInfo {
    pub p: u32,
    pub nu: u32,
    pub q: u32,
    pub modulus: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub q: u32,
    pub n: usize,
    pub coeffs: Vec<Value>,
    pub case: &'static str,
    #[serde(rename = "P")]
    pub big_p: usize,
    pub quantity: &'static str,
    pub value: JsonInt,
    pub method: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountDoc {
    pub schema_version: u32,
    pub command: &'static str,
    pub field: FieldInfo,
    pub reports: Vec<CountReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    #[serde(rename = "P")]
    pub big_p: usize,
    #[serde(rename = "N")]
    pub n: JsonInt,
    #[serde(rename = "N_primitive")]
    pub n_primitive: JsonInt,
    #[serde(rename = "Mor")]
    pub mor: JsonInt,
    pub method: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableDoc {
    pub schema_version: u32,
    pub command: &'static str,
    pub field: FieldInfo,
    pub n: usize,
    pub coeffs: Vec<Value>,
    pub case: &'static str,
    pub rows: Vec<TableRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyDoc {
    pub schema_version: u32,
    pub command: &'static str,
    pub suite: String,
    pub bounds: verify::Bounds,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<verify::Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

fn field_info(spec: &JobSpec) -> FieldInfo {
    let f = &spec.field;
    FieldInfo { p: f.p(), nu: f.nu(), q: f.q(), modulus: f.modulus().to_vec() }
}

fn coeff_values(spec: &JobSpec) -> Vec<Value> {
    let f = &spec.field;
    spec.form
        .coeffs()
        .iter()
        .map(|&c| {
            let coords = f.coords(c);
            if f.nu() == 1 {
                Value::from(coords[0])
            } else {
                Value::from(coords)
            }
        })
        .collect()
}

fn coeff_text(spec: &JobSpec) -> String {
    let parts: Vec<String> = spec
        .form
        .coeffs()
        .iter()
        .map(|&c| jobs::render_elem(&spec.field, c))
        .collect();
    parts.join(" ")
}

fn n_value(spec: &JobSpec, method: Method, big_p: usize) -> Result<BigInt, Error> {
    let (f, form) = (&spec.field, &spec.form);
    match method {
        Method::ExactFormula => n_exact(f, form, big_p),
        Method::CircleReassembly => n_circle(f, form, big_p),
        Method::BruteForce => match &spec.gram {
            Some(g) => brute_n_gram(f, g, big_p, spec.budget),
            None => brute_n(f, form, big_p, spec.budget),
        },
        Method::Convolution => convolution_count(f, form, big_p, DEFAULT_MEMORY),
    }
}

fn need_p(big_p: usize) -> Result<(), Error> {
    if big_p == 0 {
        return Err(Error::OutOfRange("P must be >= 1".into()));
    }
    Ok(())
}

fn primitive_value(spec: &JobSpec, method: Method, big_p: usize) -> Result<BigInt, Error> {
    let (f, form) = (&spec.field, &spec.form);
    match method {
        Method::ExactFormula => n_primitive(f, form, big_p),
        Method::BruteForce => brute_primitive(f, form, big_p, spec.budget),
        _ => {
            need_p(big_p)?;
            let now = n_value(spec, method, big_p)?;
            primitive_from_counts(&now, &n_value(spec, method, big_p - 1)?, f.q())
        }
    }
}

fn mor_value(spec: &JobSpec, method: Method, big_p: usize) -> Result<BigInt, Error> {
    let (f, form) = (&spec.field, &spec.form);
    match method {
        Method::ExactFormula => mor_exact(f, form, big_p),
        Method::BruteForce => brute_mor(f, form, big_p, spec.budget),
        _ => {
            need_p(big_p)?;
            let n = |p| n_value(spec, method, p);
            mor_from_counts(&n(big_p + 1)?, &n(big_p)?, &n(big_p - 1)?, f.q())
        }
    }
}

/// Evaluates `(P, method)` cells in parallel; the output keeps `P`-major
/// order and reports the first failing cell in that order.
fn run_cells<T, F>(spec: &JobSpec, cell: F) -> Result<(Vec<T>, Vec<u64>), CliError>
where
    T: Send,
    F: Fn(usize, Method) -> Result<T, Error> + Sync,
{
    let cells: Vec<(usize, Method)> = spec
        .ps
        .iter()
        .flat_map(|&p| spec.methods.iter().map(move |&m| (p, m)))
        .collect();
    let results: Vec<(Result<T, Error>, u64)> = cells
        .par_iter()
        .map(|&(p, m)| {
            let start = Instant::now();
            let v = cell(p, m);
            (v, start.elapsed().as_millis() as u64)
        })
        .collect();
    let mut values = Vec::with_capacity(results.len());
    let mut times = Vec::with_capacity(results.len());
    for (v, ms) in results {
        values.push(v?);
        times.push(ms);
    }
    Ok((values, times))
}

pub fn cmd_count(spec: &JobSpec) -> Result<CountDoc, CliError> {
    let (values, times) = run_cells(spec, |p, m| match spec.quantity {
        Quantity::N => n_value(spec, m, p),
        Quantity::Primitive => primitive_value(spec, m, p),
        Quantity::Mor => mor_value(spec, m, p),
    })?;
    let coeffs = coeff_values(spec);
    let case = spec.form.case_tag(&spec.field).name();
    let cells = spec.ps.iter().flat_map(|&p| spec.methods.iter().map(move |&m| (p, m)));
    let reports = cells
        .zip(values)
        .map(|((p, m), v)| CountReport {
            q: spec.field.q(),
            n: spec.form.n(),
            coeffs: coeffs.clone(),
            case,
            big_p: p,
            quantity: spec.quantity.name(),
            value: JsonInt(v),
            method: m.name(),
        })
        .collect();
    Ok(CountDoc {
        schema_version: SCHEMA_VERSION,
        command: "count",
        field: field_info(spec),
        reports,
        meta: Some(Meta { runtime_ms: times }),
    })
}

pub fn cmd_table(spec: &JobSpec) -> Result<TableDoc, CliError> {
    let (rows, times) = run_cells(spec, |p, m| {
        Ok(TableRow {
            big_p: p,
            n: JsonInt(n_value(spec, m, p)?),
            n_primitive: JsonInt(primitive_value(spec, m, p)?),
            mor: JsonInt(mor_value(spec, m, p)?),
            method: m.name(),
        })
    })?;
    Ok(TableDoc {
        schema_version: SCHEMA_VERSION,
        command: "table",
        field: field_info(spec),
        n: spec.form.n(),
        coeffs: coeff_values(spec),
        case: spec.form.case_tag(&spec.field).name(),
        rows,
        meta: Some(Meta { runtime_ms: times }),
    })
}

pub fn cmd_verify(suite: &str, bounds: &verify::Bounds) -> Result<VerifyDoc, CliError> {
    let start = Instant::now();
    let checks = verify::run_suite(suite, bounds)?;
    let passed = checks.iter().filter(|c| c.pass).count();
    Ok(VerifyDoc {
        schema_version: SCHEMA_VERSION,
        command: "verify",
        suite: suite.to_string(),
        bounds: bounds.clone(),
        passed,
        failed: checks.len() - passed,
        checks,
        meta: Some(Meta { runtime_ms: vec![start.elapsed().as_millis() as u64] }),
    })
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn to_csv<const K: usize>(header: [&str; K], rows: impl IntoIterator<Item = [String; K]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn render_count(doc: &CountDoc, spec: &JobSpec, emit: Emit) -> String {
    match emit {
        Emit::Json => to_json(doc),
        Emit::Csv => to_csv(
            ["q", "n", "coeffs", "case", "P", "quantity", "method", "value"],
            doc.reports.iter().map(|r| {
                [
                    r.q.to_string(),
                    r.n.to_string(),
                    coeff_text(spec),
                    r.case.to_string(),
                    r.big_p.to_string(),
                    r.quantity.to_string(),
                    r.method.to_string(),
                    r.value.0.to_string(),
                ]
            }),
        ),
    }
}

pub fn render_table(doc: &TableDoc, emit: Emit) -> String {
    match emit {
        Emit::Json => to_json(doc),
        Emit::Csv => to_csv(
            ["P", "N", "N_primitive", "Mor", "method"],
            doc.rows.iter().map(|r| {
                [
                    r.big_p.to_string(),
                    r.n.0.to_string(),
                    r.n_primitive.0.to_string(),
                    r.mor.0.to_string(),
                    r.method.to_string(),
                ]
            }),
        ),
    }
}

pub fn render_verify(doc: &VerifyDoc, emit: Emit) -> String {
    match emit {
        Emit::Json => to_json(doc),
        Emit::Csv => to_csv(
            ["check", "case", "expected", "actual", "pass"],
            doc.checks.iter().map(|c| {
                [
                    c.check.clone(),
                    c.case.clone(),
                    c.expected.clone(),
                    c.actual.clone(),
                    c.pass.to_string(),
                ]
            }),
        ),
    }
}

/// Runs one command line, writing the document to `out` and diagnostics to
/// `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(String, i32), CliError> {
    match &cli.command {
        Command::Count(a) => {
            let spec = a.raw().build()?;
            let doc = cmd_count(&spec)?;
            Ok((render_count(&doc, &spec, spec.emit), EXIT_OK))
        }
        Command::Table(a) => {
            let spec = a.raw().build()?;
            let doc = cmd_table(&spec)?;
            Ok((render_table(&doc, spec.emit), EXIT_OK))
        }
        Command::Verify(a) => {
            let emit = Emit::parse(&a.emit)?;
            let mut bounds = verify::Bounds::new(a.q);
            bounds.maxdeg = a.maxdeg;
            bounds.maxk = a.maxk;
            bounds.nmax = a.nmax;
            bounds.pmax = a.pmax;
            bounds.n = a.n;
            bounds.mmax = a.mmax;
            if let Some(b) = &a.budget {
                bounds.budget = qcircle::oracle::parse_budget(b)
                    .ok_or_else(|| CliError::Usage(format!("invalid budget '{b}'")))?;
            }
            let doc = cmd_verify(&a.suite, &bounds)?;
            let code = if doc.failed == 0 { EXIT_OK } else { EXIT_FAILURE };
            Ok((render_verify(&doc, emit), code))
        }
    }
}
