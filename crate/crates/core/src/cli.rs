//! Command-line front end. Every subcommand produces one text document
//! (CSV or JSON) written to `--output` or standard output.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::density::{compare_clusters, LabeledPoints, DEFAULT_CELLS};
use crate::error::{Error, Result};
use crate::expr::{self, Environment, Value};
use crate::format::{round_sig, SIGNIFICANT_DIGITS};
use crate::mfunction::{Builtin, Grid1D, MFunction, PointwiseOp};
use crate::mset::Mset;
use crate::signal::{self, LagSeries};
use crate::similarity::{self, CosineVariant, SimilarityReport};
use crate::transform::{self, ResidualUpdate};

/// Environment variable capping worker threads; 0 or unset runs sequentially.
pub const THREADS_ENV: &str = "MULTIKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "multikit", version, about = "Signed multiset algebra and set-theoretic signal processing")]
pub struct Cli {
    /// Write the result here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Combine msets stored as JSON.
    Mset(MsetArgs),
    /// Sample or combine functions stored as `x,value` CSV.
    #[command(name = "fn")]
    Function(FnArgs),
    /// Similarity between two msets (.json) or functions (.csv).
    Sim(SimArgs),
    /// Template matching by correlation.
    Match(MatchArgs),
    /// Decompose a function onto the Walsh basis.
    Transform(TransformArgs),
    /// Compare KDE densities of labeled point clusters.
    Cluster(ClusterArgs),
    /// Evaluate a set/arithmetic expression over bound operands.
    Expr(ExprArgs),
}

#[derive(Debug, Args)]
pub struct MsetArgs {
    /// union, intersection, sum, diff, diff-truncated, product, quotient,
    /// complement or scale.
    pub op: String,
    pub inputs: Vec<PathBuf>,
    /// Factor for `scale`.
    #[arg(long, allow_hyphen_values = true)]
    pub by: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FnArgs {
    /// sample, integral, normalize, resample, complement, scale, or a binary
    /// operation (union, intersection, sum, diff, diff-truncated, product,
    /// quotient).
    pub op: String,
    pub inputs: Vec<PathBuf>,
    /// Builtin to sample: gauss_g, laplace_h, sin, cos or const.
    #[arg(long)]
    pub name: Option<String>,
    /// Grid as `start:end:count`, end exclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Cycles per unit length for sin/cos.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub freq: f64,
    /// Phase in radians for sin/cos.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phase: f64,
    /// Value for const.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub value: f64,
    /// Factor for `scale`.
    #[arg(long, allow_hyphen_values = true)]
    pub by: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SimKind {
    Jaccard,
    CosineL2,
    CosineSum,
    CosineInter,
    Common,
    Sup,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, value_enum)]
    pub kind: SimKind,
    /// Two operands; `jaccard` also accepts more for the multiway index.
    #[arg(required = true, num_args = 2..)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MatchMode {
    Mcorr,
    Scorr,
    Xcorr,
    Mconv,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long, value_enum)]
    pub mode: MatchMode,
    /// Use the built-in synthetic benchmark instead of input files.
    #[arg(long, conflicts_with_all = ["signal", "template"])]
    pub benchmark: bool,
    #[arg(required_unless_present = "benchmark")]
    pub signal: Option<PathBuf>,
    #[arg(required_unless_present = "benchmark")]
    pub template: Option<PathBuf>,
    /// Write the peak report JSON here.
    #[arg(long)]
    pub peaks: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BasisKind {
    Walsh,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long, value_enum, default_value = "walsh")]
    pub basis: BasisKind,
    /// log2 of the sample count.
    #[arg(long)]
    pub k: u32,
    /// Subtract bare basis members instead of coefficient-scaled ones.
    #[arg(long)]
    pub literal: bool,
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// `x,y,label` CSV.
    pub points: PathBuf,
    /// Kernel standard deviation for every label; defaults to a per-label rule.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Grid cells per axis.
    #[arg(long, default_value_t = DEFAULT_CELLS)]
    pub cells: usize,
}

#[derive(Debug, Args)]
pub struct ExprArgs {
    #[arg(allow_hyphen_values = true)]
    pub text: String,
    /// `name=path`; .csv binds a function, .json an mset.
    #[arg(long = "bind", value_name = "NAME=PATH")]
    pub bindings: Vec<String>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn load_mset(path: &Path) -> Result<Mset> {
    Mset::from_json(&read(path)?)
}

fn load_function(path: &Path) -> Result<MFunction> {
    MFunction::read_csv(read(path)?.as_bytes())
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Parses `start:end:count`.
pub fn parse_grid(spec: &str) -> Result<Grid1D> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidArgument(format!("grid `{spec}` is not start:end:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let end: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Grid1D::span(start, end, count)
}

fn inputs<const N: usize>(paths: &[PathBuf], op: &str) -> Result<[PathBuf; N]> {
    paths
        .to_vec()
        .try_into()
        .map_err(|_| Error::InvalidArgument(format!("`{op}` takes {N} input file(s), got {}", paths.len())))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serialization");
    s.push('\n');
    s
}

fn run_mset(args: &MsetArgs) -> Result<String> {
    let op = args.op.as_str();
    let out = match op {
        "complement" => {
            let [a] = inputs(&args.inputs, op)?;
            load_mset(&a)?.complement()
        }
        "scale" => {
            let [a] = inputs(&args.inputs, op)?;
            let by = args.by.ok_or_else(|| Error::InvalidArgument("`scale` needs --by".into()))?;
            load_mset(&a)?.scale(by)
        }
        _ => {
            let pw: PointwiseOp = op.parse().map_err(Error::InvalidArgument)?;
            let [a, b] = inputs(&args.inputs, op)?;
            let (a, b) = (load_mset(&a)?, load_mset(&b)?);
            match pw {
                PointwiseOp::Combine(c) => a.combine(c, &b),
                PointwiseOp::Quotient => a.quotient(&b),
            }
        }
    };
    Ok(out.to_json())
}

fn run_fn(args: &FnArgs) -> Result<String> {
    let op = args.op.as_str();
    let grid = || -> Result<Grid1D> {
        parse_grid(args.grid.as_deref().ok_or_else(|| Error::InvalidArgument(format!("`{op}` needs --grid")))?)
    };
    let out = match op {
        "sample" => {
            let name = args
                .name
                .as_deref()
                .ok_or_else(|| Error::InvalidArgument("`sample` needs --name".into()))?;
            Builtin::from_name(name, args.freq, args.phase, args.value)?.sample(grid()?)
        }
        "integral" => {
            let [f] = inputs(&args.inputs, op)?;
            let v = load_function(&f)?.integral();
            return Ok(pretty(&json!({ "integral": round_sig(v, SIGNIFICANT_DIGITS) })));
        }
        "normalize" => {
            let [f] = inputs(&args.inputs, op)?;
            load_function(&f)?.normalize_area()?
        }
        "resample" => {
            let [f] = inputs(&args.inputs, op)?;
            load_function(&f)?.resample(grid()?)
        }
        "complement" => {
            let [f] = inputs(&args.inputs, op)?;
            load_function(&f)?.complement()
        }
        "scale" => {
            let [f] = inputs(&args.inputs, op)?;
            let by = args.by.ok_or_else(|| Error::InvalidArgument("`scale` needs --by".into()))?;
            load_function(&f)?.scale(by)
        }
        _ => {
            let pw: PointwiseOp = op.parse().map_err(Error::InvalidArgument)?;
            let [f, g] = inputs(&args.inputs, op)?;
            load_function(&f)?.pointwise(pw, &load_function(&g)?)?
        }
    };
    Ok(out.to_csv_string())
}

fn similarity_of<T: similarity::Operand>(kind: SimKind, items: &[T]) -> Result<SimilarityReport> {
    if items.len() > 2 {
        return match kind {
            SimKind::Jaccard => similarity::jaccard_multi(&items.iter().collect::<Vec<_>>()),
            _ => Err(Error::InvalidArgument("only jaccard accepts more than two inputs".into())),
        };
    }
    let (f, g) = (&items[0], &items[1]);
    match kind {
        SimKind::Jaccard => similarity::jaccard(f, g),
        SimKind::CosineL2 => similarity::cosine(f, g, CosineVariant::L2),
        SimKind::CosineSum => similarity::cosine(f, g, CosineVariant::SumNormalized),
        SimKind::CosineInter => similarity::cosine(f, g, CosineVariant::Intersection),
        SimKind::Common => similarity::common_product_report(f, g),
        SimKind::Sup => similarity::sup_product_report(f, g),
    }
}

fn run_sim(args: &SimArgs) -> Result<String> {
    let json_inputs = args.inputs.iter().filter(|p| is_json(p)).count();
    let report = if json_inputs == args.inputs.len() {
        let items = args.inputs.iter().map(|p| load_mset(p)).collect::<Result<Vec<_>>>()?;
        similarity_of(args.kind, &items)?
    } else if json_inputs == 0 {
        let items = args.inputs.iter().map(|p| load_function(p)).collect::<Result<Vec<_>>>()?;
        similarity_of(args.kind, &items)?
    } else {
        return Err(Error::Alignment("cannot compare msets with functions".into()));
    };
    Ok(report.to_json())
}

fn series_csv(series: &LagSeries) -> Result<String> {
    let mut buf = Vec::new();
    series.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn run_match(args: &MatchArgs) -> Result<String> {
    let (signal, template, seed) = if args.benchmark {
        let (s, t) = signal::template_benchmark();
        (s, t, Some(signal::BENCHMARK_SEED))
    } else {
        let s = args.signal.as_deref().expect("required by clap");
        let t = args.template.as_deref().expect("required by clap");
        (load_function(s)?, load_function(t)?, None)
    };
    let (mode, series) = match args.mode {
        MatchMode::Mcorr => ("mcorr", signal::mcorrelate(&signal, &template)?),
        MatchMode::Scorr => ("scorr", signal::scorrelate(&signal, &template)?),
        MatchMode::Xcorr => ("xcorr", signal::cross_correlate(&signal, &template)?),
        MatchMode::Mconv => ("mconv", signal::mconvolve(&signal, &template)?),
    };
    if let Some(path) = &args.peaks {
        let mut report = signal::peak_report(&series)?.to_json_value();
        let obj = report.as_object_mut().expect("peak report is an object");
        obj.insert("mode".into(), json!(mode));
        obj.insert("seed".into(), json!(seed));
        write_atomic(path, &pretty(&report))?;
    }
    series_csv(&series)
}

fn run_transform(args: &TransformArgs) -> Result<String> {
    let f = load_function(&args.input)?;
    let basis = match args.basis {
        BasisKind::Walsh => transform::walsh_basis(args.k, *f.grid())?,
    };
    let update = if args.literal {
        ResidualUpdate::Literal
    } else {
        ResidualUpdate::Scaled
    };
    Ok(transform::greedy_decompose(&f, &basis, update)?.to_json())
}

fn run_cluster(args: &ClusterArgs) -> Result<String> {
    let points = LabeledPoints::read_csv(read(&args.points)?.as_bytes())?;
    Ok(compare_clusters(&points, args.bandwidth, args.cells)?.to_json())
}

fn run_expr(args: &ExprArgs) -> Result<String> {
    let ast = expr::parse(&args.text)?;
    let mut paths = Vec::new();
    for b in &args.bindings {
        let (name, path) = b
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("binding `{b}` is not NAME=PATH")))?;
        paths.push((name.to_owned(), PathBuf::from(path)));
    }
    let json_count = paths.iter().filter(|(_, p)| is_json(p)).count();
    let env = if !paths.is_empty() && json_count == paths.len() {
        Environment::msets(
            paths
                .iter()
                .map(|(n, p)| Ok((n.clone(), load_mset(p)?)))
                .collect::<Result<Vec<_>>>()?,
        )?
    } else if json_count == 0 {
        Environment::functions(
            paths
                .iter()
                .map(|(n, p)| Ok((n.clone(), load_function(p)?)))
                .collect::<Result<Vec<_>>>()?,
        )?
    } else {
        return Err(Error::Alignment("cannot mix mset and function bindings".into()));
    };
    Ok(match expr::eval(&ast, &env)? {
        Value::Function(f) => f.to_csv_string(),
        Value::Mset(m) => m.to_json(),
    })
}

/// Runs one parsed command and returns its primary output.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Mset(a) => run_mset(a),
        Command::Function(a) => run_fn(a),
        Command::Sim(a) => run_sim(a),
        Command::Match(a) => run_match(a),
        Command::Transform(a) => run_transform(a),
        Command::Cluster(a) => run_cluster(a),
        Command::Expr(a) => run_expr(a),
    }
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Process exit status for an error: 2 for misaligned operands, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_alignment() {
        2
    } else {
        1
    }
}

/// Reads [`THREADS_ENV`]; unset, empty or unparsable means sequential.
pub fn thread_cap() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}
