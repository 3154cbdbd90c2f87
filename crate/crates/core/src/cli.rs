//! The `cnn` command line: generate, rectify, run, verify, ratio, unit and
//! render. Exit codes: 0 success, 1 verification failure, 2 usage or parse
//! error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{parse_trace, run, serialize_trace};
use crate::error::Error;
use crate::generators::{fig2_scenario, random_orthogonal, serialize_pair, tight1, tight2};
use crate::geometry::Point;
use crate::instance::{
    parse_instance, parse_trajectory, rectify, serialize_instance, to_json_text, AlignedTrajectory,
    Instance,
};
use crate::monitor::{check_guarantee, competitive_ratio, serialize_report, verify_nondecreasing};
use crate::render::render_svg;
use crate::scalar::Scalar;
use crate::unit::{
    adversary_unit_square, bruteforce_opt_with_limit, ortho3_run, parse_requests, sweet4_run,
    OptResult, Ortho3, Sweet4, UnitOnline, UnitRun, DEFAULT_OPT_LIMIT,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const THREADS_ENV: &str = "CNN_BENCH_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "cnn",
    version,
    about = "Exact workbench for the continuous CNN problem"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Tight1,
    Tight2,
    Fig2,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Sweet4,
    Ortho3,
    Opt,
    Adversary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Against {
    Sweet4,
    Ortho3,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an instance together with an offline trajectory.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 1)]
        cycles: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of request segments (random only).
        #[arg(long, default_value_t = 16)]
        segments: usize,
        /// Coordinate bound (random only).
        #[arg(long, default_value_t = 4)]
        bound: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace diagonal request segments by axis-parallel staircases.
    Rectify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        epsilon: Scalar,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run Bishop-Rook on an instance and write the trace.
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        rectify_epsilon: Option<Scalar>,
    },
    /// Check that the potential never decreases along a trace.
    Verify {
        #[arg(long, required_unless_present = "random_batch")]
        trace: Option<PathBuf>,
        #[arg(long, required_unless_present = "random_batch")]
        opt: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Verify this many generated random pairs instead of files.
        #[arg(long, conflicts_with_all = ["trace", "opt"])]
        random_batch: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        segments: usize,
        #[arg(long, default_value_t = 4)]
        bound: u32,
    },
    /// Measured ratio of a trace against an offline trajectory.
    Ratio {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        opt: PathBuf,
    },
    /// Unit-cost algorithms, the exact offline optimum and the adversary.
    Unit {
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long, conflicts_with = "rounds")]
        requests: Option<PathBuf>,
        #[arg(long)]
        rounds: Option<usize>,
        /// Online algorithm played by the adversary.
        #[arg(long, value_enum, default_value = "ortho3")]
        against: Against,
        /// Start position, as `x,y`.
        #[arg(long, default_value = "0,0", value_parser = parse_point)]
        start: Point,
        /// Longest sequence the offline optimum accepts.
        #[arg(long, default_value_t = DEFAULT_OPT_LIMIT)]
        limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a trace (and optionally an offline trajectory) as SVG.
    Render {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        opt: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_point(text: &str) -> Result<Point, Error> {
    let (x, y) = text
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected x,y but got {text:?}")))?;
    Ok(Point::new(x.parse()?, y.parse()?))
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvariantBreach(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn is_pair(text: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(text)
        .map(|v| v.get("instance").is_some() && v.get("opt").is_some())
        .unwrap_or(false)
}

/// Reads an instance file, or the instance half of a generated pair.
fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = read(path)?;
    let inst = if is_pair(&text) {
        crate::generators::parse_pair(&text)?.instance
    } else {
        parse_instance(&text)?
    };
    Ok(inst)
}

/// Reads a trajectory file, or the offline half of a generated pair.
fn load_opt(path: &Path) -> Result<AlignedTrajectory, Failure> {
    let text = read(path)?;
    let opt = if is_pair(&text) {
        crate::generators::parse_pair(&text)?.opt
    } else {
        parse_trajectory(&text)?
    };
    Ok(opt)
}

fn exact(x: &Scalar) -> String {
    format!("{x} ({:.10})", x.to_f64())
}

pub fn batch_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn cmd_generate(
    kind: Kind,
    cycles: usize,
    seed: u64,
    segments: usize,
    bound: u32,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let pair = match kind {
        Kind::Tight1 => tight1(cycles)?,
        Kind::Tight2 => tight2(cycles)?,
        Kind::Fig2 => fig2_scenario()?,
        Kind::Random => random_orthogonal(seed, segments, bound)?,
    };
    write_or_print(path, &serialize_pair(&pair), out)
}

fn cmd_run(
    instance: &Path,
    trace_path: &Path,
    eps: Option<&Scalar>,
    out: &mut dyn Write,
) -> CmdResult {
    let mut inst = load_instance(instance)?;
    if let Some(i) = inst.first_diagonal() {
        match eps {
            Some(e) => inst = rectify(&inst, e)?,
            None => {
                return Err(Failure::Usage(format!(
                    "segment {i} is diagonal; pass --rectify-epsilon"
                )))
            }
        }
    }
    let trace = run(&inst)?;
    fs::write(trace_path, serialize_trace(&trace))
        .map_err(|e| Failure::Usage(format!("{}: {e}", trace_path.display())))?;
    let _ = writeln!(out, "ell_on = {}", exact(&trace.final_cost));
    Ok(())
}

fn verify_one(
    text_trace: &str,
    opt: &AlignedTrajectory,
) -> Result<crate::monitor::VerificationReport, Error> {
    let trace = parse_trace(text_trace)?;
    verify_nondecreasing(&trace, opt)
}

fn cmd_verify(
    trace: &Path,
    opt: &Path,
    report_path: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let trace_text = read(trace)?;
    let opt = load_opt(opt)?;
    let report = verify_one(&trace_text, &opt)?;
    if let Some(p) = report_path {
        fs::write(p, serialize_report(&report))
            .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    }
    match &report.first_decrease {
        None => {
            let _ = writeln!(
                out,
                "ok: potential non-decreasing over {} records",
                report.records.len()
            );
            Ok(())
        }
        Some(d) => Err(Failure::Check(format!(
            "potential decreases at s = {}: {} -> {}",
            exact(&d.s),
            exact(&d.phi_before),
            exact(&d.phi_after)
        ))),
    }
}

fn cmd_verify_batch(
    n: u64,
    seed: u64,
    segments: usize,
    bound: u32,
    out: &mut dyn Write,
) -> CmdResult {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(batch_threads())
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let results: Vec<(u64, Result<bool, Error>)> = pool.install(|| {
        (seed..seed.saturating_add(n))
            .into_par_iter()
            .map(|s| {
                let r = random_orthogonal(s, segments, bound).and_then(|pair| {
                    let trace = run(&pair.instance)?;
                    Ok(verify_nondecreasing(&trace, &pair.opt)?.ok)
                });
                (s, r)
            })
            .collect()
    });
    let mut failed = Vec::new();
    for (s, r) in results {
        match r {
            Ok(true) => {}
            Ok(false) => failed.push(s),
            Err(e) => return Err(Failure::Usage(format!("seed {s}: {e}"))),
        }
    }
    if failed.is_empty() {
        let _ = writeln!(out, "ok: {n} random pairs verified");
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{} of {n} pairs decrease; first seed {}",
            failed.len(),
            failed[0]
        )))
    }
}

fn cmd_ratio(trace: &Path, opt: &Path, out: &mut dyn Write) -> CmdResult {
    let trace = parse_trace(&read(trace)?)?;
    let opt = load_opt(opt)?;
    let ratio = competitive_ratio(&trace, &opt)?;
    let g = check_guarantee(&trace, &opt)?;
    let shown = match &ratio {
        crate::monitor::Ratio::Finite(r) => exact(r),
        crate::monitor::Ratio::Unbounded => "unbounded".to_string(),
    };
    let _ = writeln!(out, "ell_on = {}", exact(&g.ell_on));
    let _ = writeln!(out, "ell_opt = {}", exact(&opt.length()));
    let _ = writeln!(out, "ratio = {shown}");
    if g.holds {
        let _ = writeln!(
            out,
            "guarantee holds (charged ell_opt = {})",
            exact(&g.ell_opt)
        );
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "guarantee fails: ell_on = {} > (3 + 2·√3)·{}",
            g.ell_on, g.ell_opt
        )))
    }
}

#[derive(Serialize)]
struct UnitTranscript {
    algo: String,
    start: Point,
    requests: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    online: Option<UnitRun>,
    #[serde(skip_serializing_if = "Option::is_none")]
    opt: Option<OptResult>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_unit(
    algo: Algo,
    requests: Option<&Path>,
    rounds: Option<usize>,
    against: Against,
    start: &Point,
    limit: usize,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let transcript = if algo == Algo::Adversary {
        let rounds =
            rounds.ok_or_else(|| Failure::Usage("--algo adversary needs --rounds".into()))?;
        let mut online: Box<dyn UnitOnline> = match against {
            Against::Sweet4 => Box::new(Sweet4::new(start.clone())),
            Against::Ortho3 => Box::new(Ortho3::new(start.clone())),
        };
        let (reqs, run) = adversary_unit_square(online.as_mut(), rounds)?;
        let opt = bruteforce_opt_with_limit(start, &reqs, limit.max(rounds))?;
        let _ = writeln!(out, "online = {}", run.dollars);
        let _ = writeln!(out, "opt = {}", opt.dollars);
        UnitTranscript {
            algo: format!(
                "adversary-vs-{}",
                against
                    .to_possible_value()
                    .map(|v| v.get_name().to_string())
                    .unwrap_or_default()
            ),
            start: start.clone(),
            requests: reqs,
            online: Some(run),
            opt: Some(opt),
        }
    } else {
        let path_in =
            requests.ok_or_else(|| Failure::Usage("this algorithm needs --requests".into()))?;
        let reqs = parse_requests(&read(path_in)?)?;
        let (online, opt) = match algo {
            Algo::Sweet4 => (Some(sweet4_run(start, &reqs)?), None),
            Algo::Ortho3 => (Some(ortho3_run(start, &reqs)?), None),
            _ => (None, Some(bruteforce_opt_with_limit(start, &reqs, limit)?)),
        };
        if let Some(r) = &online {
            let _ = writeln!(out, "cost = {}", r.dollars);
        }
        if let Some(o) = &opt {
            let _ = writeln!(out, "opt = {}", o.dollars);
        }
        UnitTranscript {
            algo: algo
                .to_possible_value()
                .map(|v| v.get_name().to_string())
                .unwrap_or_default(),
            start: start.clone(),
            requests: reqs,
            online,
            opt,
        }
    };
    match path {
        Some(p) => write_or_print(Some(p), &to_json_text(&transcript), out),
        None => Ok(()),
    }
}

fn cmd_render(trace: &Path, opt: Option<&Path>, path: &Path) -> CmdResult {
    let trace = parse_trace(&read(trace)?)?;
    let opt = opt.map(load_opt).transpose()?;
    let svg = render_svg(&trace, opt.as_ref());
    fs::write(path, svg).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Generate {
            kind,
            cycles,
            seed,
            segments,
            bound,
            out: path,
        } => cmd_generate(kind, cycles, seed, segments, bound, path.as_deref(), out),
        Command::Rectify {
            instance,
            epsilon,
            out: path,
        } => {
            let inst = rectify(&load_instance(&instance)?, &epsilon)?;
            write_or_print(path.as_deref(), &serialize_instance(&inst), out)
        }
        Command::Run {
            instance,
            trace,
            rectify_epsilon,
        } => cmd_run(&instance, &trace, rectify_epsilon.as_ref(), out),
        Command::Verify {
            trace,
            opt,
            report,
            random_batch,
            seed,
            segments,
            bound,
        } => match (random_batch, trace, opt) {
            (Some(n), _, _) => cmd_verify_batch(n, seed, segments, bound, out),
            (None, Some(t), Some(o)) => cmd_verify(&t, &o, report.as_deref(), out),
            _ => Err(Failure::Usage("verify needs --trace and --opt".into())),
        },
        Command::Ratio { trace, opt } => cmd_ratio(&trace, &opt, out),
        Command::Unit {
            algo,
            requests,
            rounds,
            against,
            start,
            limit,
            out: path,
        } => cmd_unit(
            algo,
            requests.as_deref(),
            rounds,
            against,
            &start,
            limit,
            path.as_deref(),
            out,
        ),
        Command::Render {
            trace,
            opt,
            out: path,
        } => cmd_render(&trace, opt.as_deref(), &path),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_cli(
            std::iter::once("cnn").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(
            call(&["generate", "--kind", "tight1", "--cycles", "0"]).0,
            2
        );
        assert_eq!(call(&["generate", "--kind", "nope"]).0, 2);
        assert_eq!(call(&["verify"]).0, 2);
        assert_eq!(call(&["unit", "--algo", "adversary"]).0, 2);
    }

    #[test]
    fn point_flag() {
        assert_eq!(
            parse_point("1/2,-3").unwrap(),
            Point::new(Scalar::ratio(1, 2), Scalar::from_int(-3))
        );
        assert!(parse_point("12").is_err());
    }

    #[test]
    fn adversary_against_ortho3() {
        let (code, out, _) = call(&["unit", "--algo", "adversary", "--rounds", "12"]);
        assert_eq!(code, 0);
        assert!(out.contains("online = 12"), "{out}");
    }

    #[test]
    fn help_is_success() {
        assert_eq!(call(&["--help"]).0, 0);
    }
}
