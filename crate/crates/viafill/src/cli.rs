//! Command execution behind the `viafill` binary.
//!
//! Commands: `delta` (boundary-layer thicknesses for the configured field
//! and flow), `simulate` (one run, writing `profile.csv` and `summary.csv`),
//! `doe` (the full factorial, writing `doe.csv` and `summary.csv`) and
//! `oracle-check` (numeric solver against the closed-form pore profile).
//!
//! Exit codes: 0 success, 1 usage/config error, 2 numerical failure,
//! 3 oracle-check above tolerance.

use std::path::Path;

use crate::config::RunConfig;
use crate::hydro;
use crate::output::{
    sci, write_doe_csv, write_doe_summary_csv, write_profile_csv, write_summary_csv,
};
use crate::viasim::oracle_suite;
use crate::{doe, Error, Result};

/// Relative error the oracle check must stay under.
pub const ORACLE_TOLERANCE: f64 = 0.005;

/// The four CLI commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Delta,
    Simulate,
    Doe,
    OracleCheck,
}

/// Runs `command` under `cfg`, writing any files into `out_dir`. Returns the
/// process exit code for success paths (0, or 3 for a failed oracle check);
/// hard failures come back as errors and map to exit codes in `main`.
pub fn execute(command: Command, cfg: &RunConfig, out_dir: &Path) -> Result<i32> {
    match command {
        Command::Delta => {
            let hydro_delta = hydro::hydrodynamic_delta(&cfg.electrolyte, &cfg.flow);
            let acoustic = hydro::acoustic_delta(&cfg.electrolyte, &cfg.field);
            let effective = hydro::effective_delta(&cfg.electrolyte, &cfg.field, &cfg.flow);
            println!("hydrodynamic_delta_m = {}", sci(hydro_delta));
            println!("acoustic_delta_m = {}", sci(acoustic));
            println!("effective_delta_m = {}", sci(effective));
            Ok(0)
        }
        Command::Simulate => {
            let result = crate::viasim::run_simulation(&cfg.sim_config())?;
            ensure_dir(out_dir)?;
            write_profile_csv(&result, &out_dir.join("profile.csv"))?;
            write_summary_csv(&result.metrics, &out_dir.join("summary.csv"))?;
            println!(
                "outcome = {} fill_fraction = {} t = {} s",
                result.outcome,
                sci(result.metrics.fill_fraction),
                sci(result.final_state.t)
            );
            Ok(0)
        }
        Command::Doe => {
            let table = doe::run_full_factorial(&cfg.doe_factors())?;
            let summary = doe::summarize(&table);
            ensure_dir(out_dir)?;
            write_doe_csv(&table, &out_dir.join("doe.csv"))?;
            write_doe_summary_csv(&summary, &out_dir.join("summary.csv"))?;
            println!(
                "rows = {} dc_sufficient = {} angle_invariant = {}",
                table.rows.len(),
                summary.dc_sufficient,
                summary.angle_invariant
            );
            Ok(0)
        }
        Command::OracleCheck => {
            let cases = oracle_suite(cfg.geometry.cells);
            let mut worst = 0.0f64;
            for case in &cases {
                println!(
                    "m_l = {} max_rel_err = {}",
                    sci(case.m_l),
                    sci(case.max_rel_err)
                );
                worst = worst.max(case.max_rel_err);
            }
            println!("max_rel_err = {}", sci(worst));
            if worst > ORACLE_TOLERANCE {
                eprintln!(
                    "error: acceptance: oracle deviation {} exceeds {}",
                    sci(worst),
                    sci(ORACLE_TOLERANCE)
                );
                Ok(3)
            } else {
                Ok(0)
            }
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })
}

/// Maps an error to its process exit code: config and I/O problems are usage
/// errors (1), domain and numerical failures are numerical errors (2).
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Io { .. } => 1,
        Error::Domain(_) | Error::Numerical(_) => 2,
    }
}
