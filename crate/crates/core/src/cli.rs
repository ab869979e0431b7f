//! Command line interface: trajectory tracing, stratum classification,
//! Maxwell reports, self-validation, and the lightlike special case.
//!
//! Exit codes: 0 success, 1 argument parse failure, 2 domain or numeric
//! error, 3 validation failure.
//!
//! All numeric output is deterministic byte for byte: CSV cells carry 17
//! significant digits (exact round trip for doubles), JSON uses the shortest
//! exact representation.

use crate::engel::GroupPoint;
use crate::expmap::{exp_arc, exp_lightlike, t_supr};
use crate::maxwell::maxwell_report;
use crate::util::fmt_g17;
use crate::validate;
use crate::vertical::{classify, energy, vertical_flow, CausalFamily, Covector};
use crate::{Error, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "engelsl",
    version,
    about = "Extremal trajectories of the sub-Lorentzian structure on the Engel group"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample one extremal trajectory on a uniform time grid.
    Trace(TraceArgs),
    /// Print the stratum of a covector.
    Classify(CovectorArgs),
    /// Maxwell times and cut-time bound for a covector, as JSON.
    Maxwell(CovectorArgs),
    /// Run the seeded self-validation suites.
    Validate(ValidateArgs),
    /// Sample a lightlike trajectory on a uniform time grid (CSV).
    Lightlike(LightlikeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CausalArg {
    Timelike,
    Spacelike,
    Lightlike,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CovectorCausalArg {
    Timelike,
    Spacelike,
}

impl CovectorCausalArg {
    fn family(self) -> CausalFamily {
        match self {
            CovectorCausalArg::Timelike => CausalFamily::Timelike,
            CovectorCausalArg::Spacelike => CausalFamily::Spacelike,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn parse_branch(s: &str) -> std::result::Result<f64, String> {
    match s {
        "+1" | "1" => Ok(1.0),
        "-1" => Ok(-1.0),
        _ => Err(format!("branch must be +1 or -1, got {s:?}")),
    }
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    /// Causal type of the trajectory.
    #[arg(long, value_enum)]
    pub causal: CausalArg,
    /// Initial pendulum angle (ignored for lightlike).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
    /// Initial costate component h3 (ignored for lightlike).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c: f64,
    /// Costate component h4 (ignored for lightlike).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Branch sign of the Hamiltonian chart.
    #[arg(long, value_parser = parse_branch, default_value = "+1", allow_hyphen_values = true)]
    pub branch: f64,
    /// Final time of the grid.
    #[arg(long = "t-end", allow_hyphen_values = true)]
    pub t_end: f64,
    /// Number of grid rows, including t = 0 and t = t_end.
    #[arg(long, default_value_t = 65)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CovectorArgs {
    #[arg(long, value_enum)]
    pub causal: CovectorCausalArg,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Run a single suite (elliptic, oracle, symmetry, positivity,
    /// conservation) instead of all of them.
    #[arg(long)]
    pub only: Option<String>,
    /// RNG seed for the sampled checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replace every default tolerance (negative-control aid).
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct LightlikeArgs {
    #[arg(long, value_parser = parse_branch, default_value = "+1", allow_hyphen_values = true)]
    pub branch: f64,
    #[arg(long = "t-end", allow_hyphen_values = true)]
    pub t_end: f64,
    #[arg(long, default_value_t = 65)]
    pub samples: usize,
}

/// Validated run configuration for the trace command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub causal: CausalArg,
    pub theta: f64,
    pub c: f64,
    pub alpha: f64,
    pub branch_sign: f64,
    pub t_end: f64,
    pub samples: usize,
}

impl RunConfig {
    /// Check the grid invariants and, for covector trajectories, that the
    /// final time sits strictly inside the domain of the closed forms.
    pub fn validated(args: &TraceArgs) -> Result<RunConfig> {
        let cfg = RunConfig {
            causal: args.causal,
            theta: args.theta,
            c: args.c,
            alpha: args.alpha,
            branch_sign: args.branch,
            t_end: args.t_end,
            samples: args.samples,
        };
        if cfg.samples < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 samples, got {}",
                cfg.samples
            )));
        }
        if !(cfg.t_end > 0.0) {
            return Err(Error::Domain(format!(
                "need t-end > 0, got {}",
                cfg.t_end
            )));
        }
        if let Some(lambda) = cfg.covector() {
            let ts = t_supr(&lambda)?;
            if !(cfg.t_end < ts) {
                return Err(Error::Domain(format!(
                    "t-end = {} is not below the explosion time {ts}",
                    cfg.t_end
                )));
            }
        }
        Ok(cfg)
    }

    fn covector(&self) -> Option<Covector> {
        let causal = match self.causal {
            CausalArg::Timelike => CausalFamily::Timelike,
            CausalArg::Spacelike => CausalFamily::Spacelike,
            CausalArg::Lightlike => return None,
        };
        Some(Covector {
            causal,
            theta: self.theta,
            c: self.c,
            alpha: self.alpha,
            branch_sign: self.branch_sign,
        })
    }

    fn grid(&self) -> Vec<f64> {
        (0..self.samples)
            .map(|i| self.t_end * i as f64 / (self.samples - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
struct TraceRow {
    t: f64,
    x1: f64,
    x2: f64,
    y: f64,
    z: f64,
    theta: f64,
    c: f64,
    #[serde(rename = "H")]
    h: f64,
    #[serde(rename = "E")]
    e: f64,
}

#[derive(Debug, Serialize)]
struct TraceOutput {
    causal: String,
    branch: f64,
    theta: f64,
    c: f64,
    alpha: f64,
    t_end: f64,
    samples: usize,
    rows: Vec<TraceRow>,
}

const TRACE_HEADER: [&str; 9] = ["t", "x1", "x2", "y", "z", "theta", "c", "H", "E"];

fn trace_rows(cfg: &RunConfig) -> Result<Vec<TraceRow>> {
    let times = cfg.grid();
    match cfg.covector() {
        None => Ok(times
            .iter()
            .map(|&t| {
                // theta, c, H, E are identically zero on lightlike curves
                let q = exp_lightlike(cfg.branch_sign, t);
                row(t, q, 0.0, 0.0, 0.0, 0.0)
            })
            .collect()),
        Some(lambda) => {
            let points = exp_arc(&lambda, &times)?;
            let h = match lambda.causal {
                CausalFamily::Timelike => -0.5,
                CausalFamily::Spacelike => 0.5,
            };
            times
                .iter()
                .zip(points)
                .map(|(&t, q)| {
                    let lt = vertical_flow(&lambda, t)?;
                    Ok(row(t, q, lt.theta, lt.c, h, energy(&lt)))
                })
                .collect()
        }
    }
}

fn row(t: f64, q: GroupPoint, theta: f64, c: f64, h: f64, e: f64) -> TraceRow {
    TraceRow {
        t,
        x1: q.x1,
        x2: q.x2,
        y: q.y,
        z: q.z,
        theta,
        c,
        h,
        e,
    }
}

fn write_rows_csv<W: Write>(w: W, rows: &[TraceRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(TRACE_HEADER)?;
    for r in rows {
        wtr.write_record([
            fmt_g17(r.t),
            fmt_g17(r.x1),
            fmt_g17(r.x2),
            fmt_g17(r.y),
            fmt_g17(r.z),
            fmt_g17(r.theta),
            fmt_g17(r.c),
            fmt_g17(r.h),
            fmt_g17(r.e),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

fn cmd_trace(args: &TraceArgs) -> Result<()> {
    let cfg = RunConfig::validated(args)?;
    let rows = trace_rows(&cfg)?;
    let mut buf: Vec<u8> = Vec::new();
    match args.format {
        Format::Csv => write_rows_csv(&mut buf, &rows)?,
        Format::Json => {
            let out = TraceOutput {
                causal: format!("{:?}", cfg.causal).to_lowercase(),
                branch: cfg.branch_sign,
                theta: cfg.theta,
                c: cfg.c,
                alpha: cfg.alpha,
                t_end: cfg.t_end,
                samples: cfg.samples,
                rows,
            };
            buf = serde_json::to_vec_pretty(&out)?;
            buf.push(b'\n');
        }
    }
    match &args.out {
        Some(path) => std::fs::write(path, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ClassifyOutput {
    stratum: &'static str,
    causal: String,
    theta: f64,
    c: f64,
    alpha: f64,
    energy: f64,
    /// Explosion time; absent when infinite.
    #[serde(skip_serializing_if = "Option::is_none")]
    t_supr: Option<f64>,
}

fn cmd_classify(args: &CovectorArgs) -> Result<()> {
    let lambda = Covector {
        causal: args.causal.family(),
        theta: args.theta,
        c: args.c,
        alpha: args.alpha,
        branch_sign: 1.0,
    };
    let stratum = classify(&lambda)?;
    let ts = t_supr(&lambda)?;
    let out = ClassifyOutput {
        stratum: stratum.tag(),
        causal: format!("{:?}", args.causal).to_lowercase(),
        theta: args.theta,
        c: args.c,
        alpha: args.alpha,
        energy: energy(&lambda),
        t_supr: ts.is_finite().then_some(ts),
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn cmd_maxwell(args: &CovectorArgs) -> Result<()> {
    let lambda = Covector {
        causal: args.causal.family(),
        theta: args.theta,
        c: args.c,
        alpha: args.alpha,
        branch_sign: 1.0,
    };
    let report = maxwell_report(&lambda)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<i32> {
    let summary = validate::run(args.seed, args.only.as_deref(), args.tol)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(if summary.passed { 0 } else { 3 })
}

fn cmd_lightlike(args: &LightlikeArgs) -> Result<()> {
    let trace = TraceArgs {
        causal: CausalArg::Lightlike,
        theta: 0.0,
        c: 0.0,
        alpha: 0.0,
        branch: args.branch,
        t_end: args.t_end,
        samples: args.samples,
        format: Format::Csv,
        out: None,
    };
    cmd_trace(&trace)
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Trace(a) => cmd_trace(a).map(|()| 0),
        Command::Classify(a) => cmd_classify(a).map(|()| 0),
        Command::Maxwell(a) => cmd_maxwell(a).map(|()| 0),
        Command::Validate(a) => cmd_validate(a),
        Command::Lightlike(a) => cmd_lightlike(a).map(|()| 0),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}
