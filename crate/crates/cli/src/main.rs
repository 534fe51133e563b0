use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fejerlab::diagnostics::{analyze, cluster_points, distance_sequence, AnchorSet, ClusterReport, MonotonicityReport};
use fejerlab::gallery::{embedded_anchor_set, FixtureParams, FixtureRegistry};
use fejerlab::geometry::OracleRegistry;
use fejerlab::operators::{check_property, OperatorSpec, PropertyKind};
use fejerlab::sampling;
use fejerlab::solvers::{EpsilonSchedule, IndexControl, Problem, SolveOptions, SolverRegistry, StopRule, Trace};
use fejerlab::{Error, DEFAULT_REL_TOL};

const TOL_ENV: &str = "FEJERLAB_TOL";

#[derive(Parser)]
#[command(name = "fejerlab", version, about = "Convex feasibility solvers and Fejér monotonicity diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solver on a problem file and write its trace.
    Solve(SolveArgs),
    /// Classify a trace against an anchor set.
    Analyze(AnalyzeArgs),
    /// Write a gallery fixture trace with embedded anchor sets.
    Example(ExampleArgs),
    /// Sample pairs and test an operator property.
    OperatorTest(OperatorTestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SolveArgs {
    /// fixed-point, simultaneous, sequential or inner-approx
    #[arg(long)]
    method: String,
    #[arg(long)]
    problem: PathBuf,
    /// harmonic:<scale>, geometric:<base>,<ratio> or constant:<value>
    #[arg(long, default_value = "harmonic:1")]
    schedule: String,
    /// cyclic or most-violated
    #[arg(long, default_value = "most-violated")]
    control: String,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-12)]
    residual_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    feasibility_tol: f64,
    /// Defaults to the extension of --out, else json.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("anchor_source").required(true).args(["anchors", "anchor_set"])))]
struct AnalyzeArgs {
    /// Trace file (.json or .csv).
    #[arg(long)]
    trace: PathBuf,
    /// Anchor JSON: a list of points or {"label", "points"}.
    #[arg(long)]
    anchors: Option<PathBuf>,
    /// Name of an anchor set embedded in a fixture trace.
    #[arg(long)]
    anchor_set: Option<String>,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Relative tolerance; overrides FEJERLAB_TOL.
    #[arg(long)]
    tol: Option<f64>,
    /// Tail fraction for cluster analysis; enables the cluster report.
    #[arg(long, requires = "cluster_radius")]
    cluster_tail: Option<f64>,
    #[arg(long, requires = "cluster_tail")]
    cluster_radius: Option<f64>,
    /// Write plot columns (k, d_k per anchor, Type II ε_k) as CSV.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct ExampleArgs {
    /// arc, arc-interior or arc-segment
    #[arg(long)]
    name: String,
    #[arg(long, default_value_t = 200)]
    iters: usize,
    /// Anchor count (grid size for arc-interior).
    #[arg(long, default_value_t = 6)]
    anchors: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OperatorTestArgs {
    /// Operator JSON.
    #[arg(long)]
    operator: PathBuf,
    /// contraction, nonexpansive, firmly-nonexpansive or nonexpansive-plus
    #[arg(long)]
    property: String,
    #[arg(long, default_value_t = 1000)]
    pairs: usize,
    /// Pairs are drawn uniformly from [-range, range]^n.
    #[arg(long, default_value_t = 3.0)]
    range: f64,
    /// Dimension for operators that do not fix one.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn parse(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: error.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::Format(_)) => 2,
            _ => 1,
        };
        Failure { code, error }
    }
}

fn precondition(e: Error) -> Failure {
    let code = match e {
        Error::TraceTooShort { .. }
        | Error::DimensionMismatch { .. }
        | Error::EmptyAnchorSet
        | Error::InvalidN { .. }
        | Error::LengthMismatch { .. }
        | Error::DegenerateClusterPair(_) => 4,
        Error::Format(_) => 2,
        _ => 1,
    };
    Failure { code, error: e.into() }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse<T>(path: &Path, f: impl FnOnce(&str) -> fejerlab::Result<T>) -> Result<T, Failure> {
    let text = read(path)?;
    f(&text).map_err(|e| Failure::parse(anyhow::Error::new(e).context(format!("cannot parse {}", path.display()))))
}

fn emit(out: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, content).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn resolve_format(format: Option<Format>, out: Option<&Path>) -> Format {
    format.unwrap_or(if out.is_some_and(is_csv) { Format::Csv } else { Format::Json })
}

fn write_trace(trace: &Trace, format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    let text = match format {
        Format::Json => trace.to_json()? + "\n",
        Format::Csv => trace.to_csv()?,
    };
    emit(out, &text)
}

fn read_trace(path: &Path) -> Result<Trace, Failure> {
    if is_csv(path) {
        let file = fs::File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
        Trace::read_csv(file)
            .map_err(|e| Failure::parse(anyhow::Error::new(e).context(format!("cannot parse {}", path.display()))))
    } else {
        parse(path, Trace::from_json)
    }
}

fn tolerance(flag: Option<f64>) -> Result<f64, Failure> {
    let tol = match (flag, std::env::var(TOL_ENV)) {
        (Some(t), _) => t,
        (None, Ok(v)) => v
            .trim()
            .parse::<f64>()
            .map_err(|e| Failure::parse(anyhow::anyhow!("{TOL_ENV}={v:?}: {e}")))?,
        (None, Err(_)) => DEFAULT_REL_TOL,
    };
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Failure::parse(anyhow::anyhow!("tolerance must be a nonnegative number, got {tol}")));
    }
    Ok(tol)
}

fn solve(args: SolveArgs) -> Outcome {
    let schedule: EpsilonSchedule = args.schedule.parse().map_err(Failure::parse)?;
    let control: IndexControl = args.control.parse().map_err(Failure::parse)?;
    let stop = StopRule::new(args.max_iters, args.residual_tol, args.feasibility_tol).map_err(Failure::parse)?;
    let oracles = OracleRegistry::with_builtins();
    let problem = parse(&args.problem, |s| Problem::from_json(s, &oracles))?;
    let solvers = SolverRegistry::with_builtins();
    let trace = solvers
        .solve(&args.method, &problem, &SolveOptions { stop, schedule, control })
        .map_err(|e| match e {
            Error::UnknownName { .. } => Failure::parse(e),
            other => Failure::from(anyhow::Error::new(other)),
        })?;
    let out = args.out.as_deref();
    write_trace(&trace, resolve_format(args.format, out), out)?;
    if trace.status.is_budget() {
        eprintln!("iteration budget of {} exhausted; partial trace written", args.max_iters);
        return Ok(3);
    }
    Ok(0)
}

#[derive(Serialize)]
struct Analysis {
    monotonicity: MonotonicityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    clusters: Option<ClusterReport>,
}

fn plot_csv(trace: &Trace, anchors: &AnchorSet, report: &MonotonicityReport) -> fejerlab::Result<String> {
    let dists = anchors.iter().map(|a| distance_sequence(trace, a)).collect::<fejerlab::Result<Vec<_>>>()?;
    let mut s = String::from("k");
    for i in 0..anchors.len() {
        let _ = write!(s, ",d_{i}");
    }
    s.push_str(",eps_type2\n");
    let eps = &report.uniform.type2.epsilons;
    for k in 0..trace.len() {
        let _ = write!(s, "{k}");
        for d in &dists {
            let _ = write!(s, ",{}", d[k]);
        }
        match eps.get(k) {
            Some(e) => {
                let _ = writeln!(s, ",{e}");
            }
            None => s.push_str(",\n"),
        }
    }
    Ok(s)
}

fn analyze_cmd(args: AnalyzeArgs) -> Outcome {
    let tol = tolerance(args.tol)?;
    let trace = read_trace(&args.trace)?;
    let anchors = match (&args.anchors, &args.anchor_set) {
        (Some(path), _) => parse(path, AnchorSet::from_json)?,
        (None, Some(name)) => embedded_anchor_set(&trace, name).map_err(Failure::parse)?,
        (None, None) => unreachable!("clap requires an anchor source"),
    };
    let monotonicity = analyze(&trace, &anchors, tol).map_err(precondition)?;
    let clusters = match (args.cluster_tail, args.cluster_radius) {
        (Some(tail), Some(radius)) => Some(cluster_points(&trace, tail, radius).map_err(Failure::parse)?),
        _ => None,
    };
    if let Some(path) = &args.plot {
        let csv = plot_csv(&trace, &anchors, &monotonicity).map_err(precondition)?;
        emit(Some(path), &csv)?;
    }
    let doc = Analysis { monotonicity, clusters };
    emit(args.report.as_deref(), &(serde_json::to_string_pretty(&doc).context("serializing report")? + "\n"))?;
    Ok(0)
}

fn example(args: ExampleArgs) -> Outcome {
    let params = FixtureParams { iters: args.iters, anchors: args.anchors, seed: args.seed };
    let fixture = FixtureRegistry::with_builtins().build(&args.name, &params).map_err(Failure::parse)?;
    let trace = fixture.export_trace().map_err(|e| Failure::from(anyhow::Error::new(e)))?;
    let out = args.out.as_deref();
    write_trace(&trace, resolve_format(args.format, out), out)?;
    Ok(0)
}

fn operator_test(args: OperatorTestArgs) -> Outcome {
    let property: PropertyKind = args.property.parse().map_err(Failure::parse)?;
    if !(args.range > 0.0 && args.range.is_finite()) {
        return Err(Failure::parse(anyhow::anyhow!("--range must be positive")));
    }
    let op = parse(&args.operator, OperatorSpec::from_json)?;
    let dim = op
        .dim()
        .or(args.dim)
        .ok_or_else(|| Failure::parse(anyhow::anyhow!("operator has no fixed dimension; pass --dim")))?;
    let pairs = sampling::uniform_pairs(args.seed, args.pairs, dim, -args.range, args.range);
    let report = check_property(&op, property, &pairs, args.tol).map_err(|e| Failure::from(anyhow::Error::new(e)))?;
    eprintln!(
        "{}: {} over {} pairs (worst slack {:e})",
        args.property,
        if report.holds() { "holds" } else { "fails" },
        report.samples,
        report.worst_slack
    );
    emit(args.out.as_deref(), &(serde_json::to_string_pretty(&report).context("serializing report")? + "\n"))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Example(a) => example(a),
        Command::OperatorTest(a) => operator_test(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
