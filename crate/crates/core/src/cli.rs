//! Command-line front end. [`run`] does all the work and returns what the
//! binary should print, so it can be tested without spawning a process.
//!
//! Exit codes: 0 success, 2 bad input, 3 no solution or degenerate
//! estimate, 4 internal error (panics, caught in `main`).

use std::ffi::OsString;
use std::fs::File;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::distributions::{Family, ParametricModel};
use crate::error::{Error, Result};
use crate::estimators::{
    self, EstimationResult, FitOptions, FitSpec, Status, TwoPointSolver, DEFAULT_TOL,
};
use crate::harness::{
    self, ExperimentReport, GammaConvention, BINOMIAL_DEFAULT_REPLICATES, FULL_REPLICATES,
    WEIBULL_GAMMA_DEFAULT_REPLICATES,
};
use crate::region::Region;
use crate::selection::select;
use crate::tables::FrequencyTable;
use crate::vdist::{dv_tables, largest_terms, pairwise_deltas, PairwiseDelta};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NO_SOLUTION: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "dvest", version, about = "Distance in variations: distances, estimation and model selection on frequency tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// d_v between a table and another table or a fully specified model.
    Distance(DistanceArgs),
    /// Fit a family to a table.
    Estimate(EstimateArgs),
    /// Pick the candidate model nearest a table.
    Select(SelectArgs),
    /// Run one of the built-in studies.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct DistanceArgs {
    #[arg(long)]
    table: PathBuf,
    /// Second table on the same support.
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    other: Option<PathBuf>,
    /// Model as family:p1,p2 (e.g. binomial:8,0.1).
    #[arg(long)]
    model: Option<String>,
    /// Number of largest pair terms to list (model only).
    #[arg(long, default_value_t = 5)]
    top: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Dv,
    NewMle,
    NewMoments,
    Classical,
    ClassicalTruncated,
    Pairwise,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    family: Family,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Fixed parameter, e.g. sigma=1 or trials=8 (repeatable).
    #[arg(long, value_name = "NAME=VALUE")]
    known: Vec<String>,
    /// Observed region for classical-truncated, e.g. "[-1.7951,-1.2712),[-0.22335,0.30055)".
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
    /// Starting values for the free parameters, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    init: Option<String>,
    /// Search interval LO,HI for each free parameter in order (repeatable).
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    bounds: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Accepted for uniformity; every estimator is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[arg(long)]
    table: PathBuf,
    /// Candidate as family:p1,p2 (repeatable, at least two).
    #[arg(long = "candidate", required = true)]
    candidates: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    BinomialId,
    WeibullGamma,
    NormalTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Rate,
    Scale,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    experiment: Experiment,
    /// Defaults: 2000 (binomial-id), 1000 (weibull-gamma).
    #[arg(long)]
    replicates: Option<usize>,
    /// Use the full 10000 replicates.
    #[arg(long, conflicts_with = "replicates")]
    full: bool,
    /// Required for the Monte Carlo experiments.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "scale")]
    gamma_convention: ConventionArg,
    /// Directory for per-replicate CSV output.
    #[arg(long, value_name = "DIR")]
    emit_csv: Option<PathBuf>,
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Invocation {
    fn input_error(e: impl std::fmt::Display) -> Self {
        Invocation {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Invocation {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Invocation {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let outcome = match cli.command {
        Command::Distance(a) => distance(a),
        Command::Estimate(a) => estimate(a),
        Command::Select(a) => select_cmd(a),
        Command::Simulate(a) => simulate(a),
    };
    outcome.unwrap_or_else(Invocation::input_error)
}

/// Serializes with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            let r: f64 = format!("{x:.11e}").parse().unwrap();
            if let Some(m) = serde_json::Number::from_f64(r) {
                *n = m;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn read_table(path: &Path) -> Result<FrequencyTable> {
    let f = File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    FrequencyTable::read_csv(f)
}

fn ok_json<T: Serialize>(value: &T, code: i32, stderr: String) -> Result<Invocation> {
    Ok(Invocation {
        code,
        stdout: to_json(value)?,
        stderr,
    })
}

#[derive(Serialize)]
struct DistanceOutput {
    dv: f64,
    pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    largest_terms: Option<Vec<PairwiseDelta>>,
}

fn distance(a: DistanceArgs) -> Result<Invocation> {
    let table = read_table(&a.table)?;
    let k = table.len();
    let out = match (&a.other, &a.model) {
        (Some(other), _) => DistanceOutput {
            dv: dv_tables(&table, &read_table(other)?)?,
            pairs: k * (k - 1),
            largest_terms: None,
        },
        (None, Some(spec)) => {
            let model: ParametricModel = spec.parse()?;
            let deltas = pairwise_deltas(&table, &model)?;
            DistanceOutput {
                dv: deltas.iter().map(|d| d.value).sum(),
                pairs: deltas.len(),
                largest_terms: Some(largest_terms(&deltas, a.top)),
            }
        }
        (None, None) => unreachable!("clap requires --other or --model"),
    };
    ok_json(&out, EXIT_OK, String::new())
}

#[derive(Serialize)]
struct EstimateOutput {
    #[serde(flatten)]
    result: EstimationResult,
    /// Numerical minimum-d_v fit when the closed form has no solution.
    #[serde(skip_serializing_if = "Option::is_none")]
    fallback: Option<EstimationResult>,
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in {what} {s:?}")))
        })
        .collect()
}

fn fit_spec(family: Family, known: &[String]) -> Result<FitSpec> {
    let mut spec = FitSpec::new(family);
    for k in known {
        let (name, value) = k
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected NAME=VALUE, got {k:?}")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad value in --known {k:?}")))?;
        spec = spec.with_known(name.trim(), v)?;
    }
    Ok(spec)
}

fn estimate(a: EstimateArgs) -> Result<Invocation> {
    let table = read_table(&a.table)?;
    let spec = fit_spec(a.family, &a.known)?;
    let bounds = if a.bounds.is_empty() {
        None
    } else {
        Some(
            a.bounds
                .iter()
                .map(|b| match parse_floats(b, "--bounds")?.as_slice() {
                    [lo, hi] => Ok((*lo, *hi)),
                    _ => Err(Error::Parse(format!("--bounds expects LO,HI, got {b:?}"))),
                })
                .collect::<Result<Vec<_>>>()?,
        )
    };
    let opts = FitOptions {
        init: a.init.as_deref().map(|s| parse_floats(s, "--init")).transpose()?,
        bounds,
        tol: a.tol,
    };
    let region = a.region.as_deref().map(str::parse::<Region>).transpose()?;
    if region.is_some() && a.method != MethodArg::ClassicalTruncated {
        return Err(Error::Precondition("--region only applies to --method classical-truncated".into()));
    }

    let solver = TwoPointSolver::for_spec(&spec);
    let mut fallback = None;
    let result = match a.method {
        MethodArg::Dv => match solver {
            Some(s) if table.len() == 2 => {
                let (y, n) = (table.support(), table.counts());
                let closed = s.solve(y[0], y[1], n[0], n[1])?;
                if closed.status == Status::NoSolution {
                    fallback = Some(estimators::min_dv(&table, &spec, &opts)?);
                }
                closed
            }
            _ => estimators::min_dv(&table, &spec, &opts)?,
        },
        MethodArg::NewMle => estimators::new_mle(&table, &spec, &opts)?,
        MethodArg::NewMoments => estimators::new_moments(&table, &spec, &opts)?,
        MethodArg::Classical => estimators::classical_mle(&table, &spec, &opts)?,
        MethodArg::ClassicalTruncated => {
            let region = region.ok_or_else(|| Error::Precondition("classical-truncated needs --region".into()))?;
            estimators::classical_truncated_mle(&table, &spec, &region, &opts)?
        }
        MethodArg::Pairwise => {
            let s = solver.ok_or_else(|| {
                Error::Precondition(format!(
                    "no two-point closed form for {} with known {:?}",
                    a.family,
                    a.known
                ))
            })?;
            estimators::weighted_pairwise(&table, s)?
        }
    };

    let code = match result.status {
        Status::Converged | Status::ToleranceSet => EXIT_OK,
        Status::NoSolution | Status::Degenerate => EXIT_NO_SOLUTION,
    };
    let stderr = result.notes.iter().map(|n| format!("note: {n}\n")).collect();
    ok_json(&EstimateOutput { result, fallback }, code, stderr)
}

fn select_cmd(a: SelectArgs) -> Result<Invocation> {
    let table = read_table(&a.table)?;
    let candidates = a
        .candidates
        .iter()
        .map(|c| c.parse::<ParametricModel>())
        .collect::<Result<Vec<_>>>()?;
    let report = select(&table, &candidates)?;
    let stderr = report
        .disqualified
        .iter()
        .map(|d| format!("disqualified {}: {}\n", d.model, d.reason))
        .collect();
    ok_json(&report, EXIT_OK, stderr)
}

fn simulate(a: SimulateArgs) -> Result<Invocation> {
    let convention = match a.gamma_convention {
        ConventionArg::Rate => GammaConvention::Rate,
        ConventionArg::Scale => GammaConvention::Scale,
    };
    let replicates = |default: usize| {
        if a.full {
            FULL_REPLICATES
        } else {
            a.replicates.unwrap_or(default)
        }
    };
    let need_seed = || a.seed.ok_or_else(|| Error::Precondition("--seed is required for Monte Carlo experiments".into()));
    let report: ExperimentReport = match a.experiment {
        Experiment::BinomialId => harness::run_binomial_identification(replicates(BINOMIAL_DEFAULT_REPLICATES), need_seed()?)?,
        Experiment::WeibullGamma => {
            harness::run_weibull_gamma(replicates(WEIBULL_GAMMA_DEFAULT_REPLICATES), need_seed()?, convention)?
        }
        Experiment::NormalTable => harness::run_normal_table()?,
    };
    if let Some(dir) = &a.emit_csv {
        harness::write_replicates(&report, dir)?;
    }
    let stderr = format!("wall time: {:.3} s\n", report.wall_time.as_secs_f64());
    ok_json(&report, EXIT_OK, stderr)
}
