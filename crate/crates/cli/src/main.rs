//! `horseshoe`: certify covering relations, fixed points, periodic
//! orbits, zero branches, and grid-level cutting arguments from a TOML
//! job description.
//!
//! The JSON report goes to stdout (or `--out`); per-check summary lines
//! go to stderr. Exit codes: 0 when everything checked is certified, 2
//! when anything is rigorously falsified, 3 when something stayed
//! inconclusive (and nothing failed), 4 for usage or config errors.

mod config;
mod jobs;
mod render;
mod report;

use anyhow::{anyhow, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use config::{Job, Lane, Overrides};
use report::{to_json, write_csv, JobOutput, Report};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "horseshoe", version, about = "Rigorous horseshoe and covering certification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// TOML job config (required).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Subdivision tolerance, e.g. 1e-9 or 1/512.
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Longest period for chaos-report.
    #[arg(long, global = true)]
    max_period: Option<usize>,
    /// Work budget (boxes processed or grid cells).
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Seed for sampling falsifiers.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Rayon thread count (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Reject piecewise-map evaluation on boxes that straddle strips.
    #[arg(long, global = true)]
    strict_strips: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Check the stretching/covering relations declared in the config.
    VerifyCovering,
    /// Search regions for certified fixed points.
    FixedPoints,
    /// Certify periodic orbits for the configured symbol words.
    PeriodicOrbits,
    /// Certify all itineraries up to a period and bound the entropy.
    ChaosReport,
    /// Track a connected branch of zeros across a parameter range.
    BranchTrack,
    /// Run cutting-set experiments on a grid fixture.
    CuttingLab,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::VerifyCovering => "verify-covering",
            Cmd::FixedPoints => "fixed-points",
            Cmd::PeriodicOrbits => "periodic-orbits",
            Cmd::ChaosReport => "chaos-report",
            Cmd::BranchTrack => "branch-track",
            Cmd::CuttingLab => "cutting-lab",
        }
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            4
        }
    }
}

fn dispatch(cmd: Cmd, job: &Job, ov: &Overrides, lane: Lane) -> Result<JobOutput> {
    if let Cmd::CuttingLab = cmd {
        return jobs::run_cutting_lab(job);
    }
    match lane {
        Lane::F64 => lane_dispatch::<f64>(cmd, job, ov),
        Lane::F32 => lane_dispatch::<f32>(cmd, job, ov),
        Lane::Rational => lane_dispatch::<horseshoe::Rational>(cmd, job, ov),
    }
}

fn lane_dispatch<S: horseshoe::Scalar>(cmd: Cmd, job: &Job, ov: &Overrides) -> Result<JobOutput> {
    match cmd {
        Cmd::VerifyCovering => jobs::run_verify_covering::<S>(job, ov),
        Cmd::FixedPoints => jobs::run_fixed_points::<S>(job, ov),
        Cmd::PeriodicOrbits => jobs::run_periodic_orbits::<S>(job, ov),
        Cmd::ChaosReport => jobs::run_chaos_report::<S>(job, ov),
        Cmd::BranchTrack => jobs::run_branch_track::<S>(job, ov),
        Cmd::CuttingLab => unreachable!("handled before lane dispatch"),
    }
}

fn run(cli: Cli) -> Result<i32> {
    let start = Instant::now();
    let config_path = cli
        .config
        .ok_or_else(|| anyhow!("--config <FILE> is required (see --help)"))?;
    let job = Job::load(&config_path)?;
    let lane = job.lane().map_err(|e| anyhow!("{e}"))?;
    let ov = Overrides {
        tol: cli.tol,
        max_period: cli.max_period,
        budget: cli.budget,
        seed: cli.seed,
        workers: cli.workers,
        strict_strips: if cli.strict_strips { Some(true) } else { None },
    }
    .with_env()?;
    if let Some(w) = ov.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| anyhow!("cannot size the worker pool: {e}"))?;
    }

    let out = dispatch(cli.cmd, &job, &ov, lane)?;
    let seed = ov.seed.or(job.config.seed);
    let report =
        Report::assemble(cli.cmd.name(), &job.hash, lane.name(), seed, &out, start.elapsed().as_millis());
    let text = to_json(&report);

    for line in &out.lines {
        eprintln!("{line}");
    }
    eprintln!("overall: {} (exit {})", out.class.word(), out.class.code());

    match &cli.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| anyhow!("cannot write report to {}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    if let Some(csv_path) = &job.config.csv {
        write_csv(&job.dir.join(csv_path), &out.csv)?;
    }
    Ok(out.class.code())
}
