use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use viafill::cli::{execute, exit_code_for, Command};
use viafill::config::{parse_config, RunConfig};

/// Copper electrodeposition into blind microvias under megasonic agitation.
#[derive(Parser)]
#[command(name = "viafill", version, disable_help_subcommand = true)]
struct Args {
    /// Configuration file; defaults apply for every key it omits.
    #[arg(long, value_name = "PATH", global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV files.
    #[arg(long, value_name = "DIR", default_value = "out", global = true)]
    out: PathBuf,

    /// Print the effective configuration (defaults plus file) and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Print hydrodynamic, acoustic and effective boundary-layer thickness.
    Delta,
    /// Run one simulation; writes profile.csv and summary.csv.
    Simulate,
    /// Run the full factorial; writes doe.csv and summary.csv.
    Doe,
    /// Check the numeric solver against the closed-form pore profile.
    OracleCheck,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(err) => {
            // Help and version requests are not usage errors.
            if err.use_stderr() {
                eprintln!("error: usage: {}", err.kind());
                let _ = err.print();
                return ExitCode::from(1);
            }
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
    };

    let cfg = match &args.config {
        Some(path) => match parse_config(path) {
            Ok(cfg) => cfg,
            Err(err) => {
                eprintln!("error: config: {err}");
                return ExitCode::from(1);
            }
        },
        None => RunConfig::default(),
    };

    if args.dump_config {
        print!("{}", cfg.dump());
        return ExitCode::SUCCESS;
    }

    let Some(cmd) = args.command else {
        eprintln!("error: usage: missing command (delta | simulate | doe | oracle-check)");
        return ExitCode::from(1);
    };
    let command = match cmd {
        Cmd::Delta => Command::Delta,
        Cmd::Simulate => Command::Simulate,
        Cmd::Doe => Command::Doe,
        Cmd::OracleCheck => Command::OracleCheck,
    };

    match execute(command, &cfg, &args.out) {
        Ok(code) => ExitCode::from(u8::try_from(code).unwrap_or(2)),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(u8::try_from(exit_code_for(&err)).unwrap_or(2))
        }
    }
}
