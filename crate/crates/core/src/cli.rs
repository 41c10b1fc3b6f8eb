// Copyright 2026 The faqai Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::drivers::{run_query, EvalOptions, SketchStats, DEFAULT_SIZE_CAP};
use crate::error::{Error, Result};
use crate::hypertree::build_decomposition;
use crate::oracle::{gen_knapsack, gen_partition, oracle_eval, DEFAULT_CAP};
use crate::query::{
    resolve, resolve_any_arity, validate_structure, EvalMode, Mode, QueryKind, QuerySpec,
};
use crate::relation::{load_dir, load_files, Database, Table};

#[derive(Debug, Parser)]
#[command(name = "faqai", version, about = "Aggregates over acyclic joins under one additive inequality")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a join tree as 1-based `child parent` pairs.
    Decompose(DecomposeArgs),
    /// Count join rows satisfying the inequality.
    Count(QueryArgs),
    /// Evaluate a SumSum query.
    Sumsum(QueryArgs),
    /// Evaluate a SumProd query.
    Sumprod(QueryArgs),
    /// Evaluate a query by materializing the join.
    Oracle(OracleArgs),
    /// Write a hardness-construction instance.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// A directory of .csv files or a list of .csv files.
    #[arg(long, num_args = 1.., required = true)]
    pub tables: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub output: OutputFormat,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// A directory of .csv files or a list of .csv files.
    #[arg(long, num_args = 1..)]
    pub tables: Vec<PathBuf>,
    /// Query specification (JSON).
    #[arg(long)]
    pub query: PathBuf,
    /// Target relative error; implies approximate evaluation.
    #[arg(long, conflicts_with = "exact")]
    pub epsilon: Option<f64>,
    /// Evaluate exactly.
    #[arg(long)]
    pub exact: bool,
    /// Override the per-operation sketch parameter.
    #[arg(long, conflicts_with = "exact")]
    pub alpha: Option<f64>,
    /// 1-based index of the table kept until the end.
    #[arg(long)]
    pub root: Option<usize>,
    /// Row cap for the oracle.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub max_materialize: usize,
    /// Largest intermediate value, in entries.
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    pub max_entries: usize,
    #[arg(long, value_enum, default_value_t)]
    pub output: OutputFormat,
    /// Also print the final dynamic-programming value.
    #[arg(long)]
    pub dump_sketch: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    /// Query kind, when the query file does not name one.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Count,
    Sumsum,
    Sumprod,
}

impl From<KindArg> for QueryKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Count => QueryKind::Count,
            KindArg::Sumsum => QueryKind::Sumsum,
            KindArg::Sumprod => QueryKind::Sumprod,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Subset counting: one table {0, w} per weight, constraint sum <= capacity.
    Knapsack {
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
        #[arg(long)]
        capacity: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        output: OutputFormat,
    },
    /// Zero-sum sign vectors: one table {w, -w} per weight, two constraints.
    Partition {
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        output: OutputFormat,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
}

/// Everything a run produced. Wall time is kept out of the JSON form so
/// that identical runs serialize identically.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_ext_real")]
    pub result: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_count: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<SketchStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sketch: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Vec<[usize; 2]>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub written: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    pub format: OutputFormat,
}

mod opt_ext_real {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => crate::query::ext_real::serialize(v, s),
            None => s.serialize_none(),
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Rejected(_) => "rejected",
        Error::CyclicJoin { .. } => "cyclic_join",
        Error::CapExceeded { .. } => "cap_exceeded",
        Error::Overflow => "overflow",
        Error::SketchTooLarge { .. } => "sketch_too_large",
        Error::UnknownFeature(_) => "unknown_feature",
        Error::UnknownAlgebra(_) => "unknown_algebra",
        Error::UnknownPreset(_) => "unknown_preset",
        Error::Io(_) => "io",
        _ => "error",
    }
}

fn load_tables(paths: &[PathBuf]) -> Result<Database> {
    match paths {
        [] => Err(Error::InvalidArgument("--tables is required".into())),
        [dir] if dir.is_dir() => load_dir(dir),
        files => load_files(files),
    }
}

fn read_query(path: &Path) -> Result<QuerySpec> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Rejected(crate::error::Rejection::malformed(format!(
            "cannot read query file {}: {e}",
            path.display()
        )))
    })?;
    QuerySpec::from_json(&text)
}

/// Applies command-line overrides to the query's evaluation settings.
fn apply_flags(spec: &mut QuerySpec, args: &QueryArgs) {
    if args.exact {
        spec.mode = Some(Mode::Exact);
    }
    if let Some(e) = args.epsilon {
        spec.epsilon = Some(e);
        spec.mode = Some(Mode::Approx);
    }
    if let Some(a) = args.alpha {
        spec.alpha = Some(a);
        spec.mode = Some(Mode::Approx);
    }
}

fn root_index(args: &QueryArgs, db: &Database) -> Result<Option<usize>> {
    match args.root {
        None => Ok(None),
        Some(r) if r >= 1 && r <= db.num_tables() => Ok(Some(r - 1)),
        Some(r) => Err(Error::InvalidArgument(format!(
            "--root {r} is out of range 1..={}",
            db.num_tables()
        ))),
    }
}

fn run_engine(kind: QueryKind, args: &QueryArgs, report: &mut RunReport) -> Result<()> {
    report.format = args.output;
    let mut spec = read_query(&args.query)?;
    apply_flags(&mut spec, args);
    // refuse structurally bad queries before touching any data
    if spec.preset.is_none() {
        validate_structure(&spec, Some(kind))?;
    }
    let db = load_tables(&args.tables)?;
    let q = resolve(&spec, &db, Some(kind))?;
    let opts = EvalOptions {
        root: root_index(args, &db)?,
        size_cap: args.max_entries,
        dump_sketch: args.dump_sketch,
        parallel: true,
    };
    match q.mode {
        EvalMode::Exact => report.mode = Some("exact".into()),
        EvalMode::Approx { epsilon, .. } => {
            report.mode = Some("approx".into());
            report.epsilon = Some(epsilon);
        }
    }
    let out = run_query(&db, &q, &opts)?;
    report.result = Some(out.value);
    report.exact_count = out.exact_count;
    report.alpha = out.params.map(|p| p.alpha);
    report.stats = Some(out.stats);
    report.sketch = out.sketch;
    Ok(())
}

fn run_oracle(args: &OracleArgs, report: &mut RunReport) -> Result<()> {
    let qa = &args.query;
    report.format = qa.output;
    let mut spec = read_query(&qa.query)?;
    apply_flags(&mut spec, qa);
    let db = load_tables(&qa.tables)?;
    let q = resolve_any_arity(&spec, &db, args.kind.map(Into::into))?;
    let v = oracle_eval(&db, &q, qa.max_materialize)?;
    report.mode = Some("oracle".into());
    report.result = Some(v.value);
    if q.kind == QueryKind::Count {
        report.exact_count = Some(v.qualifying);
    }
    Ok(())
}

fn run_decompose(args: &DecomposeArgs, report: &mut RunReport) -> Result<()> {
    report.format = args.output;
    let db = load_tables(&args.tables)?;
    let d = build_decomposition(&db)?;
    report.decomposition = Some(d.edges().iter().map(|&(a, b)| [a + 1, b + 1]).collect());
    Ok(())
}

fn write_instance(
    out: &Path,
    db: &Database,
    spec: &QuerySpec,
    report: &mut RunReport,
) -> Result<()> {
    std::fs::create_dir_all(out)?;
    for t in db.tables() {
        let path = out.join(format!("{}.csv", t.name()));
        write_table(t, &path)?;
        report.written.push(path.display().to_string());
    }
    let path = out.join("query.json");
    std::fs::write(&path, spec.to_json() + "\n")?;
    report.written.push(path.display().to_string());
    Ok(())
}

fn write_table(t: &Table, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    t.write_csv(&mut f)?;
    f.flush()?;
    Ok(())
}

fn run_gen(cmd: &GenCommand, report: &mut RunReport) -> Result<()> {
    match cmd {
        GenCommand::Knapsack {
            weights,
            capacity,
            out,
            output,
        } => {
            report.format = *output;
            let (db, ineq) = gen_knapsack(weights, *capacity)?;
            let spec = QuerySpec {
                kind: Some(QueryKind::Count),
                inequality: Some(ineq),
                ..QuerySpec::default()
            };
            write_instance(out, &db, &spec, report)
        }
        GenCommand::Partition {
            weights,
            out,
            output,
        } => {
            report.format = *output;
            let (db, inequalities) = gen_partition(weights)?;
            let spec = QuerySpec {
                kind: Some(QueryKind::Count),
                inequalities,
                mode: Some(Mode::Exact),
                ..QuerySpec::default()
            };
            write_instance(out, &db, &spec, report)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Decompose(_) => "decompose",
        Command::Count(_) => "count",
        Command::Sumsum(_) => "sumsum",
        Command::Sumprod(_) => "sumprod",
        Command::Oracle(_) => "oracle",
        Command::Gen(GenCommand::Knapsack { .. }) => "gen knapsack",
        Command::Gen(GenCommand::Partition { .. }) => "gen partition",
    }
}

/// Runs a parsed command. Never panics on bad input; failures are recorded
/// in the report with their exit code.
pub fn execute(cli: &Cli) -> RunReport {
    let start = Instant::now();
    let mut report = RunReport {
        command: command_name(&cli.command).into(),
        ..RunReport::default()
    };
    let result = match &cli.command {
        Command::Decompose(a) => run_decompose(a, &mut report),
        Command::Count(a) => run_engine(QueryKind::Count, a, &mut report),
        Command::Sumsum(a) => run_engine(QueryKind::Sumsum, a, &mut report),
        Command::Sumprod(a) => run_engine(QueryKind::Sumprod, a, &mut report),
        Command::Oracle(a) => run_oracle(a, &mut report),
        Command::Gen(g) => run_gen(g, &mut report),
    };
    if let Err(e) = result {
        report.exit_code = match &e {
            Error::InvalidArgument(m) if m.starts_with("--tables") => 2,
            e => e.exit_code(),
        };
        report.error = Some(ErrorReport {
            kind: error_kind(&e).into(),
            message: e.to_string(),
        });
    }
    report.elapsed = start.elapsed();
    report
}

fn format_value(report: &RunReport) -> Option<String> {
    if let Some(c) = report.exact_count {
        return Some(c.to_string());
    }
    report.result.map(|v| v.to_string())
}

/// Writes the report: JSON, or text with the answer alone on stdout.
pub fn render(report: &RunReport, stdout: &mut dyn Write, stderr: &mut dyn Write) -> std::io::Result<()> {
    if report.format == OutputFormat::Json {
        writeln!(stdout, "{}", serde_json::to_string_pretty(report).expect("reports serialize"))?;
        if let Some(e) = &report.error {
            writeln!(stderr, "{}: {}", e.kind, e.message)?;
        }
        return Ok(());
    }
    if let Some(e) = &report.error {
        writeln!(stderr, "{}", e.message)?;
        return Ok(());
    }
    if let Some(edges) = &report.decomposition {
        for [a, b] in edges {
            writeln!(stdout, "{a} {b}")?;
        }
    }
    if let Some(v) = format_value(report) {
        writeln!(stdout, "{v}")?;
    }
    if let Some(s) = &report.sketch {
        writeln!(stdout, "sketch: {s}")?;
    }
    for path in &report.written {
        writeln!(stdout, "wrote {path}")?;
    }
    if let Some(mode) = &report.mode {
        let mut line = format!("mode: {mode}");
        if let (Some(e), Some(a)) = (report.epsilon, report.alpha) {
            line.push_str(&format!(", epsilon {e}, alpha {a:.3e}"));
        }
        if let Some(s) = &report.stats {
            line.push_str(&format!(", largest value {} entries", s.max_entries));
        }
        line.push_str(&format!(", {:.3} ms", report.elapsed.as_secs_f64() * 1e3));
        writeln!(stderr, "{line}")?;
    }
    Ok(())
}

/// Parses `args` (program name first), runs, and renders. Returns the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                return 2;
            }
            let _ = write!(stdout, "{text}");
            return 0;
        }
    };
    let report = execute(&cli);
    let _ = render(&report, stdout, stderr);
    report.exit_code
}
