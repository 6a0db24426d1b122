//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 nothing applicable,
//! 3 numerical failure (or a failed `check`).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::counts::{from_events, EventLog, FrequencyTable};
use crate::error::{Error, Result};
use crate::estimators::{estimate_selected, EstimatorId, EstimatorReport};
use crate::predictors::{
    efron_thisted_new, estimate_curve, mnatsakanian_project, solow_polasky_new, uniform_grid,
    unseen_at,
};
use crate::simulator::{
    check_holder, run_experiment, simulate_log, MixtureSpec, SimConfig, HOLDER_FLOOR,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INAPPLICABLE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const MIX_HELP: &str =
    "Rate mixture: point:NU | discrete:NU,W;NU,W;... | exp:BETA | gamma:ALPHA,BETA \
(rates non-negative, gamma parameters positive, discrete weights summing to 1)";

#[derive(Debug, Parser)]
#[command(
    name = "flarecount",
    version,
    about = "Estimate the unseen members of a randomly flaring population"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run estimators on a counts table or an event log.
    Estimate(EstimateArgs),
    /// Project a counts table in time or predict new discoveries.
    Predict(PredictArgs),
    /// Re-run an estimator on an event log truncated at a grid of times.
    Replay(ReplayArgs),
    /// Monte-Carlo experiment under a rate mixture.
    Simulate(SimulateArgs),
    /// Verify the mixture inequality k p0 pk >= p1 p(k-1).
    Check(CheckArgs),
    /// Convert an event log into a counts table.
    Tabulate(TabulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["counts", "events"])))]
pub struct InputArgs {
    /// Counts CSV with header `k,count`.
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Event CSV with header `id,time`.
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// Observation horizon of the event log (default: latest event time).
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Cut-off time applied to the event log (default: the horizon).
    #[arg(long)]
    pub t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated estimator ids (default: all).
    #[arg(long, value_delimiter = ',')]
    pub estimators: Vec<String>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Mnatsakanian,
    Unseen,
    EfronThisted,
    SolowPolasky,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Counts CSV with header `k,count`.
    #[arg(long)]
    pub counts: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Horizon the counts were observed over.
    #[arg(long = "T", alias = "horizon")]
    pub horizon: Option<f64>,
    /// Projection time.
    #[arg(long)]
    pub t: Option<f64>,
    /// Further observation time.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Further number of events.
    #[arg(long)]
    pub m: Option<u64>,
    /// Largest multiplicity in a projected table.
    #[arg(long)]
    pub rmax: Option<u64>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Event CSV with header `id,time`.
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Number of grid points; the grid is T i / grid for i = 1..=grid.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub grid: u32,
    #[arg(long, default_value = "ambartsumian-total")]
    pub estimator: String,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Population size N.
    #[arg(long)]
    pub n: u64,
    #[arg(long, help = MIX_HELP)]
    pub mix: String,
    /// Observation horizon T.
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 1)]
    pub reps: u64,
    #[arg(long)]
    pub seed: u64,
    /// Comma-separated estimator ids (default: all).
    #[arg(long, value_delimiter = ',')]
    pub estimators: Vec<String>,
    /// Also write the event log of replication 0.
    #[arg(long)]
    pub events_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, help = MIX_HELP)]
    pub mix: String,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 10)]
    pub kmax: u64,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TabulateArgs {
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error that aborted a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Parse { .. } | Error::InvalidMixture(_) | Error::Io(_) => {
            EXIT_USAGE
        }
        Error::Inapplicable { .. } | Error::Degenerate(_) | Error::EmptyTable => EXIT_INAPPLICABLE,
        Error::BracketExhausted { .. } | Error::LogOfZero { .. } | Error::Quadrature { .. } => {
            EXIT_NUMERICAL
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Estimate(a) => cmd_estimate(a, out, err),
        Command::Predict(a) => cmd_predict(a, out, err),
        Command::Replay(a) => cmd_replay(a, out, err),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Check(a) => cmd_check(a, out),
        Command::Tabulate(a) => {
            let log = read_events(&a.events, a.horizon)?;
            let table = from_events(&log, a.t.unwrap_or(log.horizon()))?;
            table.write_csv(out)?;
            Ok(EXIT_OK)
        }
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    input: &'a InputEcho,
    result: &'a T,
}

#[derive(Serialize)]
struct InputEcho {
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    table: Vec<(u64, u64)>,
}

fn document<T: Serialize>(out: &mut dyn Write, input: &InputEcho, result: &T) -> Result<()> {
    let doc = Document {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        input,
        result,
    };
    write_json(out, &doc)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn cmd_estimate(a: EstimateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let ids = parse_ids(&a.estimators)?;
    let (table, echo) = load_input(&a.input)?;
    let report = estimate_selected(&table, &ids);
    match a.format {
        Format::Json => document(out, &echo, &report)?,
        Format::Csv => estimate_csv(out, &report)?,
        Format::Table => estimate_table(out, &report)?,
    }
    if table.is_empty() {
        writeln!(err, "error: empty table")?;
        return Ok(EXIT_INAPPLICABLE);
    }
    if report.estimates.is_empty() {
        writeln!(err, "error: no selected estimator is applicable")?;
        for b in &report.inapplicable {
            writeln!(err, "  {}", b.reason)?;
        }
        return Ok(EXIT_INAPPLICABLE);
    }
    Ok(EXIT_OK)
}

fn estimate_csv(out: &mut dyn Write, report: &EstimatorReport) -> Result<()> {
    writeln!(out, "estimator,target,bound,value,variance")?;
    for e in &report.estimates {
        let variance = e
            .variance
            .and_then(|v| v.value())
            .map_or(String::new(), |v| v.to_string());
        writeln!(
            out,
            "{},{},{},{},{}",
            e.estimator,
            label(&e.target),
            label(&e.bound),
            e.value,
            variance
        )?;
    }
    Ok(())
}

fn estimate_table(out: &mut dyn Write, report: &EstimatorReport) -> Result<()> {
    let input = &report.input;
    writeln!(
        out,
        "observed N1 = {}, events n = {}, n1 = {}, n2 = {}, n3 = {}",
        sig4(input.observed),
        sig4(input.events),
        sig4(input.n1),
        sig4(input.n2),
        sig4(input.n3)
    )?;
    writeln!(out)?;
    writeln!(
        out,
        "{:<26} {:<12} {:<6} {:>12} {:>12}",
        "estimator", "target", "bound", "value", "std.err"
    )?;
    for e in &report.estimates {
        let se = match e.variance {
            Some(v) => v
                .value()
                .map_or("out-of-range".to_string(), |v| sig4(v.sqrt())),
            None => "-".to_string(),
        };
        writeln!(
            out,
            "{:<26} {:<12} {:<6} {:>12} {:>12}",
            e.estimator.to_string(),
            label(&e.target),
            label(&e.bound),
            sig4(e.value),
            se
        )?;
    }
    if !report.inapplicable.is_empty() {
        writeln!(out)?;
        writeln!(out, "inapplicable:")?;
        for b in &report.inapplicable {
            writeln!(out, "  {}", b.reason)?;
        }
    }
    if let Some(h) = &report.heterogeneity {
        writeln!(out)?;
        let seq: Vec<String> = h
            .sequence
            .iter()
            .map(|&(k, r)| format!("{k}:{}", sig4(r)))
            .collect();
        writeln!(out, "heterogeneity k n_k / n_(k-1): {}", seq.join(" "))?;
        writeln!(out, "heterogeneity trend: {}", sig4(h.trend))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ScalarPrediction {
    method: &'static str,
    value: f64,
    unstable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    linear: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    linear_regime: Option<bool>,
}

fn cmd_predict(a: PredictArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let table = read_counts(&a.counts)?;
    let echo = InputEcho {
        source: a.counts.display().to_string(),
        horizon: a.horizon,
        t: a.t,
        table: table.iter().filter(|&(_, c)| c > 0).collect(),
    };
    let horizon = || {
        a.horizon
            .ok_or_else(|| Error::domain("--T (the observation horizon) is required"))
    };
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Error::domain(format!("--{flag} is required")))
    };
    let scalar = match a.method {
        Method::Mnatsakanian => {
            let p = mnatsakanian_project(&table, horizon()?, need(a.t, "t")?, a.rmax)?;
            if p.unstable {
                writeln!(
                    err,
                    "warning: t exceeds 2T; the projection is an unstable extrapolation"
                )?;
            }
            match a.format {
                Format::Json => document(out, &echo, &p)?,
                Format::Csv => {
                    writeln!(out, "r,value")?;
                    for &(r, v) in &p.counts {
                        writeln!(out, "{r},{v}")?;
                    }
                }
                Format::Table => {
                    writeln!(out, "{:>6} {:>12}", "r", "n_r(t)")?;
                    for &(r, v) in p.counts.iter().skip(1) {
                        writeln!(out, "{r:>6} {:>12}", sig4(v))?;
                    }
                    writeln!(out, "unseen increment: {}", sig4(p.unseen_increment()))?;
                }
            }
            return Ok(EXIT_OK);
        }
        Method::Unseen => {
            let p = unseen_at(&table, horizon()?, need(a.t, "t")?)?;
            ScalarPrediction {
                method: "unseen",
                value: p.value,
                unstable: p.unstable,
                linear: None,
                linear_regime: None,
            }
        }
        Method::EfronThisted => {
            let p = efron_thisted_new(&table, horizon()?, need(a.tau, "tau")?)?;
            ScalarPrediction {
                method: "efron-thisted",
                value: p.value,
                unstable: p.unstable,
                linear: None,
                linear_regime: None,
            }
        }
        Method::SolowPolasky => {
            let m = a.m.ok_or_else(|| Error::domain("--m is required"))?;
            let p = solow_polasky_new(&table, m)?;
            ScalarPrediction {
                method: "solow-polasky",
                value: p.value,
                unstable: false,
                linear: Some(p.linear),
                linear_regime: Some(p.linear_regime),
            }
        }
    };
    if scalar.unstable {
        writeln!(err, "warning: extrapolation beyond the stable range")?;
    }
    match a.format {
        Format::Json => document(out, &echo, &scalar)?,
        Format::Csv => {
            writeln!(out, "method,value")?;
            writeln!(out, "{},{}", scalar.method, scalar.value)?;
        }
        Format::Table => {
            writeln!(out, "{}: {}", scalar.method, sig4(scalar.value))?;
            if let (Some(linear), Some(regime)) = (scalar.linear, scalar.linear_regime) {
                let note = if regime { "within" } else { "outside" };
                writeln!(
                    out,
                    "linear form m n1 / n: {} ({note} its regime)",
                    sig4(linear)
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_replay(a: ReplayArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let id: EstimatorId = a.estimator.parse().map_err(Error::Domain)?;
    let log = read_events(&a.events, a.horizon)?;
    let grid = uniform_grid(log.horizon(), a.grid as usize);
    let curve = estimate_curve(&log, &grid, id)?;
    if curve.gaps() == curve.points.len() {
        writeln!(err, "warning: {id} is inapplicable at every grid point")?;
    }
    match a.format {
        Format::Csv => curve.write_csv(out)?,
        Format::Json => {
            let echo = InputEcho {
                source: a.events.display().to_string(),
                horizon: Some(log.horizon()),
                t: None,
                table: from_events(&log, log.horizon())?
                    .iter()
                    .filter(|&(_, c)| c > 0)
                    .collect(),
            };
            document(out, &echo, &curve)?
        }
        Format::Table => {
            writeln!(out, "{:>12} {:>12}", "t", id.to_string())?;
            for p in &curve.points {
                let v = p.value.map_or("-".to_string(), sig4);
                writeln!(out, "{:>12} {v:>12}", sig4(p.x))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let mixture: MixtureSpec = a.mix.parse()?;
    let ids = parse_ids(&a.estimators)?;
    let config = SimConfig {
        population: a.n,
        horizon: a.t,
        mixture,
        replications: a.reps,
        seed: a.seed,
    };
    let report = run_experiment(&config, &ids)?;
    if let Some(path) = &a.events_out {
        let log = simulate_log(&config, 0)?;
        let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        log.write_csv(std::io::BufWriter::new(file))?;
    }
    match a.format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            writeln!(out, "estimator,applicable,inapplicable,mean,sd,mean_truth,violation_fraction,mean_variance")?;
            let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
            for r in &report.rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.estimator,
                    r.applicable,
                    r.inapplicable,
                    opt(r.mean),
                    opt(r.sd),
                    opt(r.mean_truth),
                    opt(r.violation_fraction),
                    opt(r.mean_variance)
                )?;
            }
        }
        Format::Table => {
            writeln!(
                out,
                "N = {}, T = {}, mixture {}, {} replications, seed {}",
                config.population, config.horizon, config.mixture, config.replications, config.seed
            )?;
            writeln!(
                out,
                "true unseen: expected {}, simulated mean {}",
                sig4(report.expected_unseen),
                sig4(report.mean_true_unseen)
            )?;
            writeln!(out)?;
            writeln!(
                out,
                "{:<26} {:>10} {:>10} {:>10} {:>10} {:>10}",
                "estimator", "applicable", "mean", "sd", "truth", "violations"
            )?;
            let opt = |v: Option<f64>| v.map_or("-".to_string(), sig4);
            for r in &report.rows {
                writeln!(
                    out,
                    "{:<26} {:>10} {:>10} {:>10} {:>10} {:>10}",
                    r.estimator.to_string(),
                    r.applicable,
                    opt(r.mean),
                    opt(r.sd),
                    opt(r.mean_truth),
                    opt(r.violation_fraction)
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct HolderReport {
    mixture: String,
    t: f64,
    floor: f64,
    margins: Vec<(u64, f64)>,
    pass: bool,
}

fn cmd_check(a: CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let mixture: MixtureSpec = a.mix.parse()?;
    let margins = check_holder(&mixture, a.t, a.kmax)?;
    let pass = margins.iter().all(|&(_, m)| m >= HOLDER_FLOOR);
    let report = HolderReport {
        mixture: mixture.to_string(),
        t: a.t,
        floor: HOLDER_FLOOR,
        margins,
        pass,
    };
    match a.format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            writeln!(out, "k,margin")?;
            for &(k, m) in &report.margins {
                writeln!(out, "{k},{m}")?;
            }
        }
        Format::Table => {
            writeln!(out, "{:>4} {:>14}", "k", "margin")?;
            for &(k, m) in &report.margins {
                writeln!(out, "{k:>4} {m:>14.6e}")?;
            }
        }
    }
    if a.format != Format::Json {
        writeln!(out, "{}", if pass { "PASS" } else { "FAIL" })?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_NUMERICAL })
}

fn parse_ids(names: &[String]) -> Result<Vec<EstimatorId>> {
    if names.is_empty() {
        return Ok(EstimatorId::catalogue());
    }
    names
        .iter()
        .map(|n| n.trim().parse().map_err(Error::Domain))
        .collect()
}

fn load_input(input: &InputArgs) -> Result<(FrequencyTable, InputEcho)> {
    let (table, source, horizon, t) = match (&input.counts, &input.events) {
        (Some(_), _) if input.t.is_some() || input.horizon.is_some() => {
            return Err(Error::domain(
                "--t and --horizon apply to --events input only",
            ))
        }
        (Some(path), _) => (read_counts(path)?, path, None, None),
        (None, Some(path)) => {
            let log = read_events(path, input.horizon)?;
            let t = input.t.unwrap_or(log.horizon());
            (from_events(&log, t)?, path, Some(log.horizon()), Some(t))
        }
        (None, None) => return Err(Error::domain("either --counts or --events is required")),
    };
    let echo = InputEcho {
        source: source.display().to_string(),
        horizon,
        t,
        table: table.iter().filter(|&(_, c)| c > 0).collect(),
    };
    Ok((table, echo))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_counts(path: &Path) -> Result<FrequencyTable> {
    FrequencyTable::read_csv(open(path)?)
}

fn read_events(path: &Path, horizon: Option<f64>) -> Result<EventLog> {
    EventLog::read_csv(open(path)?, horizon)
}

fn label<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

/// Formats `x` to four significant digits.
pub fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.3e}").parse().unwrap_or(x);
    let exponent = rounded.abs().log10().floor() as i32;
    if (-4..6).contains(&exponent) {
        let decimals = (3 - exponent).max(0) as usize;
        format!("{rounded:.decimals$}")
    } else {
        format!("{rounded:.3e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_significant_digits() {
        assert_eq!(sig4(10.0), "10.00");
        assert_eq!(sig4(367.879), "367.9");
        assert_eq!(sig4(0.0123456), "0.01235");
        assert_eq!(sig4(9.99996), "10.00");
        assert_eq!(sig4(-2.5), "-2.500");
        assert_eq!(sig4(1234567.0), "1.235e6");
        assert_eq!(sig4(0.0), "0");
    }

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(exit_code(&Error::EmptyTable), EXIT_INAPPLICABLE);
        assert_eq!(
            exit_code(&Error::Parse {
                line: 2,
                message: "x".into()
            }),
            EXIT_USAGE
        );
        assert_eq!(
            exit_code(&Error::Quadrature {
                estimate: 0.0,
                error: 1.0
            }),
            EXIT_NUMERICAL
        );
    }

    #[test]
    fn help_exits_zero() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["flarecount", "--help"], &mut out, &mut err), EXIT_OK);
        assert!(String::from_utf8(out).unwrap().contains("estimate"));
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["flarecount", "bogus"], &mut out, &mut err), EXIT_USAGE);
    }

    #[test]
    fn check_command() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            [
                "flarecount",
                "check",
                "--mix",
                "point:1.0",
                "--t",
                "1",
                "--kmax",
                "6",
            ],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_OK);
        assert!(String::from_utf8(out).unwrap().trim_end().ends_with("PASS"));
    }
}
