use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

/// Radial ground states of coupled NLS systems.
///
/// Exit codes: 0 ok, 1 configuration or input error, 2 numerical failure,
/// 3 certification failure, 4 sweep finished with failed rows.
#[derive(Parser)]
#[command(name = "pohozaev", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scalar ground state of the `f` equation; writes u0.csv and u0.report.
    Scalar {
        config: PathBuf,
        /// Overrides output.dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coupled ground state at `beta`; writes state.csv and state.report.
    Coupled {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ground states over `beta_list`; writes sweep.csv.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certifies a stored `r,u,v` state against the config.
    Check { config: PathBuf, state: PathBuf },
}

fn main() -> ExitCode {
    // clap's own failure code (2) would collide with the numerical one.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                commands::CONFIG
            } else {
                commands::OK
            });
        }
    };
    let code = match cli.command {
        Command::Scalar { config, out } => commands::scalar(&config, out),
        Command::Coupled { config, out } => commands::coupled(&config, out),
        Command::Sweep { config, out } => commands::sweep(&config, out),
        Command::Check { config, state } => commands::check(&config, &state),
    };
    ExitCode::from(code)
}
