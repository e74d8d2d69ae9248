//! `mutloc`: solve relative camera-to-camera poses from reciprocal marker
//! observations, or run the Monte-Carlo noise study.
//!
//! Exit codes: 0 success, 1 configuration/parse/flag error, 2 at least one
//! observation record failed to solve, 3 selftest failure. Every error path
//! prints a single `error: <context>: <message>` line to standard error.
//! Set `MUTLOC_LOG=info` (or `debug`) for progress diagnostics.

mod config;
mod records;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use log::{debug, info};
use mutloc::geometry::Pose;
use mutloc::sim::{run_noise_sweep, summaries_to_csv, trials_to_csv, ScenarioSpec};
use mutloc::solver::solve_mutual_pose_with;
use nalgebra::{Rotation3, Vector3};

use config::ConfigFile;
use records::{load_observations, solve_record, FailureRecord};

#[derive(Parser)]
#[command(name = "mutloc", version, about = "Mutual localization from reciprocal marker observations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve each observation record against a rig configuration.
    Solve {
        /// Rig configuration (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Observation records (JSON Lines).
        #[arg(long)]
        obs: PathBuf,
        /// Disable the physical-plausibility root filter.
        #[arg(long)]
        no_filter: bool,
        /// Override the near-real root acceptance tolerance.
        #[arg(long)]
        imag_tol: Option<f64>,
    },
    /// Monte-Carlo noise sweep; writes trials.csv and summary.csv.
    Sweep {
        /// Rig configuration (TOML); `[scenario]` controls the geometry.
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated noise levels in pixels, e.g. `0,2,4,6,8,10`.
        #[arg(long)]
        sigmas: String,
        /// Trials per noise level.
        #[arg(long)]
        trials: usize,
        /// RNG seed; reruns with the same seed are byte-identical.
        #[arg(long)]
        seed: u64,
        /// Output directory for the CSV files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the embedded sanity suite.
    Selftest,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("MUTLOC_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error: usage: {}", first_line(&e.to_string()));
            return ExitCode::from(1);
        }
    };
    match cli.command {
        Command::Solve {
            config,
            obs,
            no_filter,
            imag_tol,
        } => cmd_solve(&config, &obs, no_filter, imag_tol),
        Command::Sweep {
            config,
            sigmas,
            trials,
            seed,
            out,
        } => cmd_sweep(&config, &sigmas, trials, seed, &out),
        Command::Selftest => cmd_selftest(),
    }
}

fn first_line(s: &str) -> &str {
    s.lines().next().unwrap_or(s)
}

fn cmd_solve(
    config_path: &PathBuf,
    obs_path: &PathBuf,
    no_filter: bool,
    imag_tol: Option<f64>,
) -> ExitCode {
    let config = match ConfigFile::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: config: {e}");
            return ExitCode::from(1);
        }
    };
    let observations = match load_observations(obs_path) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: observations: {e}");
            return ExitCode::from(1);
        }
    };
    let rig = config.rig();
    let params = config.solver_params(no_filter, imag_tol);
    info!(
        "solving {} records with imag_tol={:.1e} filter={}",
        observations.len(),
        params.imag_tol,
        params.plausibility_filter
    );

    let mut all_ok = true;
    for record in &observations {
        let mut obs = record.observation();
        let markers_used = match (obs.m4.is_some(), rig.p4.is_some()) {
            (true, true) => 4,
            (false, _) => 3,
            (true, false) => {
                all_ok = false;
                emit(&FailureRecord {
                    frame: record.frame.clone(),
                    ok: false,
                    markers_used: 3,
                    error: "observation has m4 but the config defines no markers.p4".into(),
                });
                continue;
            }
        };
        if markers_used == 3 {
            obs.m4 = None;
        }
        let start = Instant::now();
        match solve_mutual_pose_with(&rig, &obs, &params) {
            Ok(report) => {
                debug!(
                    "frame {}: cost {:.3e}, {} candidates, {:?}",
                    record.frame,
                    report.best.cost,
                    report.candidates.len(),
                    start.elapsed()
                );
                emit(&solve_record(&record.frame, markers_used, &report));
            }
            Err(e) => {
                all_ok = false;
                emit(&FailureRecord {
                    frame: record.frame.clone(),
                    ok: false,
                    markers_used,
                    error: e.to_string(),
                });
            }
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn emit<T: serde::Serialize>(record: &T) {
    println!(
        "{}",
        serde_json::to_string(record).expect("result records are always serializable")
    );
}

fn cmd_sweep(
    config_path: &PathBuf,
    sigmas_flag: &str,
    trials: usize,
    seed: u64,
    out: &PathBuf,
) -> ExitCode {
    let config = match ConfigFile::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: config: {e}");
            return ExitCode::from(1);
        }
    };
    let mut sigmas = Vec::new();
    for part in sigmas_flag.split(',') {
        match part.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => sigmas.push(v),
            _ => {
                eprintln!("error: flags: --sigmas entry {part:?} is not a non-negative number");
                return ExitCode::from(1);
            }
        }
    }
    if sigmas.is_empty() {
        eprintln!("error: flags: --sigmas must list at least one noise level");
        return ExitCode::from(1);
    }
    if trials == 0 {
        eprintln!("error: flags: --trials must be at least 1");
        return ExitCode::from(1);
    }

    // Facing geometry at the configured separation: camera q turned back
    // toward camera p with a mild offset, as in the noise study.
    let rotation = Rotation3::from_euler_angles(0.05, std::f64::consts::PI - 0.08, 0.06);
    let spec = ScenarioSpec {
        rig: config.rig(),
        pose_gt: Pose::new(
            *rotation.matrix(),
            Vector3::new(0.12, -0.08, config.scenario.separation),
        ),
        image_size: (config.scenario.image_width, config.scenario.image_height),
        noise_sigma: 0.0,
        trials,
        seed,
    };
    if let Err(e) = spec.validate() {
        eprintln!("error: scenario: {e}");
        return ExitCode::from(1);
    }

    let start = Instant::now();
    let sweep = match run_noise_sweep(&spec, &sigmas) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: sweep: {e}");
            return ExitCode::from(1);
        }
    };
    info!("swept {} noise levels in {:?}", sigmas.len(), start.elapsed());

    if let Err(e) = std::fs::create_dir_all(out) {
        eprintln!("error: out: {}: {e}", out.display());
        return ExitCode::from(1);
    }
    for (name, content) in [
        ("trials.csv", trials_to_csv(&sweep.trials)),
        ("summary.csv", summaries_to_csv(&sweep.summaries)),
    ] {
        let path = out.join(name);
        if let Err(e) = std::fs::write(&path, content) {
            eprintln!("error: out: {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    for s in &sweep.summaries {
        println!(
            "sigma={} trials={} successes={} median_trans_err_m={:.6} median_rot_err_deg={:.6}",
            s.sigma, s.trials, s.successes, s.median_translation_error_m, s.median_rotation_error_deg
        );
    }
    ExitCode::SUCCESS
}

fn cmd_selftest() -> ExitCode {
    let start = Instant::now();
    match selftest::run() {
        Ok(()) => {
            println!("selftest: all checks passed in {:.2?}", start.elapsed());
            ExitCode::SUCCESS
        }
        Err((check, reason)) => {
            eprintln!("error: selftest: {check}: {reason}");
            ExitCode::from(3)
        }
    }
}
