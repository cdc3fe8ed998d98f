//! Argument parsing and the subcommands.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use tqe_core::analytic::{distortion_b, entanglement_report, negativity_from_b, outcome_probability};
use tqe_core::optimize::{maximize_over_b_with, unit_distortion_roots, Objective, UnitDistortion};
use tqe_core::oracle::run_tqe_oracle_with_tolerance;
use tqe_core::par::Execution;
use tqe_core::sweep::{sweep_figure, Figure, SweepConfig};
use tqe_core::{InputCase, OutcomePair, SplitterSpec, SqueezeSpec};

use crate::checks::{run_suite, Suite};
use crate::config::{clamp_b, Format, Overrides, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

const ENV_HELP: &str = "\
Configuration layers, lowest to highest precedence:
  1. built-in defaults
  2. --config FILE (UTF-8, one key=value per line, # comments)
  3. environment: TQE_DEFAULT_CUTOFF_TOLERANCE, TQE_K_MAX, TQE_ORACLE_TOLERANCE,
     TQE_B_MIN, TQE_B_MAX, TQE_OUTPUT_FORMAT
  4. command-line flags
File keys are the environment names in lowercase without the TQE_ prefix.
Squeezing is always given in dB. B is clamped to [1e-9, 1e9].";

#[derive(Debug, Parser)]
#[command(name = "tqe", version, about = "Entanglement transfer from a nonlocal photon to squeezed CV states", after_help = ENV_HELP)]
pub struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// key=value configuration file
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output format (default: csv for tables, json for single records)
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Write the dataset here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Largest equal count in P0-k / P1-k objectives and probability tables
    #[arg(long, global = true)]
    k_max: Option<usize>,
    /// Lower end of the B search bracket
    #[arg(long, global = true, allow_negative_numbers = true)]
    b_min: Option<f64>,
    /// Upper end of the B search bracket
    #[arg(long, global = true, allow_negative_numbers = true)]
    b_max: Option<f64>,
    /// Discarded input norm allowed by the simulation cutoff
    #[arg(long, global = true)]
    cutoff_tolerance: Option<f64>,
    /// Agreement required between closed forms and simulation
    #[arg(long, global = true)]
    oracle_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Args)]
struct Point {
    /// Input states: smsv or odd
    #[arg(long, default_value = "smsv")]
    case: InputCase,
    /// Initial squeezing in dB
    #[arg(long, allow_negative_numbers = true)]
    squeeze_db: f64,
    /// Beam-splitter parameter B = R/T
    #[arg(long, allow_negative_numbers = true)]
    bsparam: f64,
}

#[derive(Debug, Args)]
struct Counts {
    /// Photons counted in the first measuring mode
    #[arg(long)]
    k1: usize,
    /// Photons counted in the second measuring mode
    #[arg(long)]
    k2: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    /// P_00 + sum_{k=1}^{k_max} P_kk
    P0,
    /// sum_{k=1}^{k_max} P_kk
    P1,
    /// P_{k1 k2}
    Single,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distortion factor, negativity, probability and mean photon numbers of one outcome
    Report {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        counts: Counts,
    },
    /// P_{k1 k2} for all k1, k2 up to k_max
    ProbTable {
        #[command(flatten)]
        point: Point,
    },
    /// Maximize a probability over B at each squeezing value
    Optimize {
        #[arg(long, default_value = "smsv")]
        case: InputCase,
        /// Squeezing values in dB, comma separated
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        squeeze_db: Vec<f64>,
        #[arg(long, value_enum, default_value = "p1")]
        objective: ObjectiveArg,
        /// First count (single objective only)
        #[arg(long, required_if_eq("objective", "single"))]
        k1: Option<usize>,
        /// Second count (single objective only)
        #[arg(long, required_if_eq("objective", "single"))]
        k2: Option<usize>,
    },
    /// Solve |b_{k1 k2}| = 1 for B at each squeezing value
    UnitDistortion {
        #[arg(long, default_value = "smsv")]
        case: InputCase,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        squeeze_db: Vec<f64>,
        #[command(flatten)]
        counts: Counts,
    },
    /// Dataset behind one figure panel
    Sweep {
        /// 3a, 3b, 4a..4h, 5a or 5b
        #[arg(long)]
        figure: Figure,
        /// Explicit squeezing grid in dB, comma separated
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["s_min", "s_max", "steps"])]
        squeeze_db: Vec<f64>,
        #[arg(long, requires_all = ["s_max", "steps"])]
        s_min: Option<f64>,
        #[arg(long, requires_all = ["s_min", "steps"])]
        s_max: Option<f64>,
        #[arg(long, requires_all = ["s_min", "s_max"])]
        steps: Option<usize>,
        /// Compute rows one after another
        #[arg(long)]
        sequential: bool,
    },
    /// Brute-force Fock-space simulation of one outcome, with the closed form alongside
    Oracle {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        counts: Counts,
        /// Input photon-number cutoff (default: adaptive)
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Run a self-check suite
    Check {
        #[arg(long)]
        suite: Suite,
    },
}

/// Leading Schmidt coefficients in oracle records; the rest vanish for a
/// rank-two state.
const SCHMIDT_SHOWN: usize = 3;

/// A computed result: a single record or a table.
enum Output {
    Record(Value),
    Table(Table),
}

impl Output {
    fn render(&self, format: Option<Format>) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        match self {
            Output::Record(v) if format == Some(Format::Csv) => record_table(v).write_csv(&mut buf)?,
            Output::Record(v) => writeln!(buf, "{}", serde_json::to_string_pretty(v).expect("serializable"))?,
            Output::Table(t) if format == Some(Format::Json) => {
                writeln!(buf, "{}", serde_json::to_string_pretty(&t.to_json()).expect("serializable"))?
            }
            Output::Table(t) => t.write_csv(&mut buf)?,
        }
        Ok(buf)
    }
}

/// One-row table of a flat record; arrays spread over `name_0, name_1, ...`.
fn record_table(v: &Value) -> Table {
    let mut columns = Vec::new();
    let mut row = Vec::new();
    let cell = |x: &Value| match x {
        Value::Number(n) if n.is_i64() => Cell::Int(n.as_i64().unwrap()),
        Value::Number(n) => Cell::Real(n.as_f64()),
        Value::Bool(b) => Cell::from(*b),
        Value::String(s) => Cell::Text(s.clone()),
        _ => Cell::Real(None),
    };
    if let Value::Object(map) = v {
        for (k, x) in map {
            match x {
                Value::Array(items) => {
                    for (i, item) in items.iter().enumerate() {
                        columns.push(format!("{k}_{i}"));
                        row.push(cell(item));
                    }
                }
                Value::Object(_) => {}
                _ => {
                    columns.push(k.clone());
                    row.push(cell(x));
                }
            }
        }
    }
    let mut t = Table::new(columns);
    t.push(row);
    t
}

fn squeeze(s_db: f64) -> Result<SqueezeSpec, CliError> {
    Ok(SqueezeSpec::from_db(s_db)?)
}

fn splitter(b: f64) -> Result<SplitterSpec, CliError> {
    Ok(SplitterSpec::from_b(clamp_b(b)?)?)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn report(point: &Point, counts: &Counts) -> Result<Output, CliError> {
    let r = entanglement_report(
        OutcomePair::new(point.case, counts.k1, counts.k2),
        &squeeze(point.squeeze_db)?,
        &splitter(point.bsparam)?,
    )?;
    Ok(Output::Record(to_value(&r)))
}

fn prob_table(point: &Point, config: &RunConfig) -> Result<Output, CliError> {
    let sq = squeeze(point.squeeze_db)?;
    let split = splitter(point.bsparam)?;
    let y_red = point.case.state_parameter(&split.reduce(&sq));
    let mut t = Table::new(["s_db", "b_param", "k1", "k2", "probability", "b", "negativity"]).with_meta("case", point.case);
    for k1 in 0..=config.k_max {
        for k2 in 0..=config.k_max {
            let o = OutcomePair::new(point.case, k1, k2);
            let b = distortion_b(o, y_red, split.b_param)?;
            t.push(vec![
                sq.s_db.into(),
                split.b_param.into(),
                k1.into(),
                k2.into(),
                outcome_probability(o, &sq, &split)?.into(),
                b.into(),
                negativity_from_b(b).into(),
            ]);
        }
    }
    Ok(Output::Table(t))
}

fn optimize(
    case: InputCase,
    grid: &[f64],
    objective: ObjectiveArg,
    k1: Option<usize>,
    k2: Option<usize>,
    config: &RunConfig,
) -> Result<Output, CliError> {
    let (objective, label) = match objective {
        ObjectiveArg::P0 => (Objective::p0_to(config.k_max), format!("p0_{}", config.k_max)),
        ObjectiveArg::P1 => (Objective::p1_to(config.k_max), format!("p1_{}", config.k_max)),
        ObjectiveArg::Single => {
            let (k1, k2) = k1.zip(k2).ok_or_else(|| CliError::Argument("single objective needs --k1 and --k2".into()))?;
            (Objective::Single { k1, k2 }, format!("p{k1}{k2}"))
        }
    };
    let mut t = Table::new(["s_db", "b_param", "value", "iterations", "boundary_optimum"])
        .with_meta("case", case)
        .with_meta("objective", label);
    for &s in grid {
        let r = maximize_over_b_with(case, &squeeze(s)?, objective, config.b_bracket, Execution::default())?;
        t.push(vec![s.into(), r.b_star.into(), r.value.into(), r.iterations.into(), r.boundary_optimum.into()]);
    }
    Ok(Output::Table(t))
}

fn unit_distortion(case: InputCase, grid: &[f64], counts: &Counts, config: &RunConfig) -> Result<Output, CliError> {
    if counts.k1 == counts.k2 {
        return Err(CliError::Argument("unit distortion needs k1 != k2 (b_kk is identically 1)".into()));
    }
    let mut t = Table::new(["s_db", "b_param", "abs_b", "closest_gap"])
        .with_meta("case", case)
        .with_meta("outcome", format!("({},{})", counts.k1, counts.k2));
    for &s in grid {
        for r in unit_distortion_roots(case, counts.k1, counts.k2, &squeeze(s)?, config.b_bracket)? {
            t.push(match r {
                UnitDistortion::Root { b_param, abs_b, .. } => vec![s.into(), b_param.into(), abs_b.into(), None.into()],
                UnitDistortion::NoRoot { closest, .. } => vec![s.into(), None.into(), None.into(), closest.into()],
            });
        }
    }
    Ok(Output::Table(t))
}

fn sweep(figure: Figure, grid: Vec<f64>, sequential: bool, config: &RunConfig) -> Result<Output, CliError> {
    let execution = if sequential { Execution::Sequential } else { Execution::default() };
    let sweep_config = SweepConfig { k_max: config.k_max, bracket: config.b_bracket, execution };
    let s = sweep_figure(figure, &grid, &sweep_config)?;
    let mut t = Table::new(["s_db".to_string(), "b_param".to_string()].into_iter().chain(s.columns.iter().cloned()))
        .with_meta("figure", figure)
        .with_meta("case", s.case)
        .with_meta("k_max", config.k_max);
    for row in &s.rows {
        let mut cells = vec![Cell::from(row.s_db), Cell::from(row.b_param)];
        cells.extend(row.values.iter().map(|v| Cell::from(*v)));
        t.push(cells);
    }
    Ok(Output::Table(t))
}

fn oracle(point: &Point, counts: &Counts, cutoff: Option<usize>, config: &RunConfig) -> Result<Output, CliError> {
    let sq = squeeze(point.squeeze_db)?;
    let split = splitter(point.bsparam)?;
    let outcome = OutcomePair::new(point.case, counts.k1, counts.k2);
    let o = run_tqe_oracle_with_tolerance(point.case, &sq, &split, outcome, cutoff, config.default_cutoff_tolerance)?;
    let analytic = entanglement_report(outcome, &sq, &split)?;
    let diff = (o.probability - analytic.probability).abs();
    Ok(Output::Record(json!({
        "case": point.case,
        "k1": counts.k1,
        "k2": counts.k2,
        "s_db": sq.s_db,
        "b_param": split.b_param,
        "cutoff": o.cutoff,
        "probability": o.probability,
        "negativity": o.negativity,
        "mean_photons_mode1": o.mean_photons.0,
        "mean_photons_mode2": o.mean_photons.1,
        "schmidt_coefficients": &o.schmidt_coefficients[..o.schmidt_coefficients.len().min(SCHMIDT_SHOWN)],
        "analytic_probability": analytic.probability,
        "analytic_negativity": analytic.negativity,
        "probability_difference": diff,
        "within_tolerance": diff <= config.oracle_tolerance,
    })))
}

fn check(suite: Suite, config: &RunConfig) -> Result<(Output, Option<CliError>), CliError> {
    let checks = run_suite(suite, config)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    let mut record = Map::new();
    record.insert("suite".into(), suite.name().into());
    record.insert("passed".into(), (failed == 0).into());
    record.insert("checks".into(), to_value(&checks));
    let err = (failed > 0).then(|| CliError::ChecksFailed { suite: suite.name().into(), failed, total: checks.len() });
    Ok((Output::Record(Value::Object(record)), err))
}

/// Parses `argv` (program name first) and runs the subcommand. Datasets go
/// to `stdout` unless `--out` names a file.
pub fn run<I, T>(argv: I, env: &dyn Fn(&str) -> Option<String>, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            write!(stdout, "{}", e.render())?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    let g = &cli.global;
    let overrides = Overrides {
        default_cutoff_tolerance: g.cutoff_tolerance,
        k_max: g.k_max,
        oracle_tolerance: g.oracle_tolerance,
        b_min: g.b_min,
        b_max: g.b_max,
        output_format: g.format.map(Format::from),
    };
    let config = RunConfig::load(g.config.as_deref(), env, &overrides)?;

    let mut deferred = None;
    let output = match &cli.command {
        Command::Report { point, counts } => report(point, counts)?,
        Command::ProbTable { point } => prob_table(point, &config)?,
        Command::Optimize { case, squeeze_db, objective, k1, k2 } => {
            optimize(*case, squeeze_db, *objective, *k1, *k2, &config)?
        }
        Command::UnitDistortion { case, squeeze_db, counts } => unit_distortion(*case, squeeze_db, counts, &config)?,
        Command::Sweep { figure, squeeze_db, s_min, s_max, steps, sequential } => {
            let grid = match (s_min, s_max, steps) {
                (Some(lo), Some(hi), Some(n)) if *n >= 2 => {
                    (0..*n).map(|i| lo + (hi - lo) * i as f64 / (*n - 1) as f64).collect()
                }
                (Some(_), Some(_), Some(_)) => return Err(CliError::Argument("--steps must be at least 2".into())),
                _ if !squeeze_db.is_empty() => squeeze_db.clone(),
                _ => figure.default_grid(),
            };
            sweep(*figure, grid, *sequential, &config)?
        }
        Command::Oracle { point, counts, cutoff } => oracle(point, counts, *cutoff, &config)?,
        Command::Check { suite } => {
            let (out, err) = check(*suite, &config)?;
            deferred = err;
            out
        }
    };
    let bytes = output.render(config.output_format)?;
    match &g.out {
        Some(path) => fs::write(path, bytes)?,
        None => stdout.write_all(&bytes)?,
    }
    match deferred {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
