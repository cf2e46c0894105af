//! Batch front end: run a JSON-configured simulation, execute an
//! experiment preset, or audit a kernel.
//!
//! Exit codes: 0 all checks pass, 1 tolerance failure, 2 usage error,
//! 3 runtime abort (NaN / boundary guard / singular time).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nhsim::config;
use nhsim::io;
use nhsim::kernels::{audit_assumptions, audit_kernel_bound, PotentialSpec};
use nhsim::preset::{run_preset, PresetError};
use nhsim::solver::run_simulation;

#[derive(Parser)]
#[command(
    name = "nhsim",
    about = "Hartree-equation simulator with growing interactions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a simulation described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a named acceptance experiment.
    Preset {
        /// One of the built-in preset names (try an invalid one to list them).
        name: String,
        #[arg(long, default_value = "nhsim_out")]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Audit the kernel bounds and structural assumptions at one gamma.
    Audit {
        #[arg(long)]
        gamma: f64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run { config } => run_config(&config),
        Command::Preset { name, out, seed } => preset(&name, &out, seed),
        Command::Audit { gamma } => audit(gamma),
    }
}

fn run_config(path: &std::path::Path) -> ExitCode {
    let cfg = match config::parse_config(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(name) = &cfg.preset {
        return preset(name, std::path::Path::new(&cfg.output_dir), 7);
    }
    let run = match cfg.build() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let out_dir = PathBuf::from(&cfg.output_dir);
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        eprintln!("cannot create {}: {e}", out_dir.display());
        return ExitCode::from(2);
    }
    match run_simulation(&run) {
        Ok(out) => {
            let dim = run.initial.grid().dim();
            if let Err(e) = io::emit_series(&out.series, dim, &out_dir.join("series.csv")) {
                eprintln!("write error: {e}");
                return ExitCode::from(3);
            }
            if let Err(e) = io::write_snapshot(&out.final_state, &out_dir.join("final.snap")) {
                eprintln!("write error: {e}");
                return ExitCode::from(3);
            }
            println!(
                "done: {} records, drifts: mass {:.3e} (rel), energy {:.3e}, momentum {:.3e}, \
                 com-law {:.3e}",
                out.series.len(),
                out.drifts.mass_rel,
                out.drifts.energy_abs,
                out.drifts.momentum_abs,
                out.drifts.com_law_abs
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("run aborted: {e}");
            ExitCode::from(3)
        }
    }
}

fn preset(name: &str, out: &std::path::Path, seed: u64) -> ExitCode {
    match run_preset(name, out, seed) {
        Ok(report) => {
            print!("{}", report.render());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(PresetError::Unknown { name, available }) => {
            eprintln!("unknown preset `{name}`; available presets:");
            for p in available {
                eprintln!("  {p}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("preset aborted: {e}");
            ExitCode::from(3)
        }
    }
}

fn audit(gamma: f64) -> ExitCode {
    let mut pass = true;
    if gamma > 1.0 && gamma <= 2.0 {
        match audit_kernel_bound(gamma, 100.0, 10.0, 400, 400) {
            Ok(a) => {
                println!("{}", a.summary());
                pass &= a.passed();
            }
            Err(e) => {
                eprintln!("audit error: {e}");
                return ExitCode::from(2);
            }
        }
    } else {
        println!("gamma={gamma}: remainder-kernel bound needs gamma in (1, 2], skipping that scan");
    }
    let spec = match PotentialSpec::power(gamma, 1.0) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("audit error: {e}");
            return ExitCode::from(2);
        }
    };
    match audit_assumptions(&spec, 100.0, 10.0, 401) {
        Ok(a) => {
            print!("{}", a.render());
            pass &= a.passed();
        }
        Err(e) => {
            eprintln!("audit error: {e}");
            return ExitCode::from(2);
        }
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
