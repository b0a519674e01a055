//! Command-line driver for `entraj-core` ensembles.
//!
//! Every run is described by a [`RunManifest`]; output files are a pure
//! function of the manifest (minus its timestamp), whatever the worker count.

pub mod args;
pub mod error;
pub mod format;
pub mod manifest;
pub mod output;

pub use args::{parse_cli, run_timestamp, Invocation};
pub use error::CliError;
pub use manifest::{ExperimentKind, ModelParams, RunManifest};
pub use output::{simulate, write_outputs, RunResult};

use std::ffi::OsString;

/// Simulate an invocation and write its files.
pub fn execute(inv: &Invocation) -> Result<RunResult, CliError> {
    let run = simulate(&inv.manifest, inv.workers)?;
    write_outputs(&inv.out, &run)?;
    Ok(run)
}

/// Process entry point; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match <args::Cli as clap::Parser>::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = args::invocation(cli).and_then(|inv| execute(&inv).map(|run| (inv, run)));
    match result {
        Ok((inv, run)) => {
            let s = &run.stats;
            let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
            println!(
                "{}: {} hits, {} failures, ks {}, l1 {}{} -> {}",
                inv.manifest.kind().name(),
                s.n_hits,
                run.output.failures.len(),
                show(s.ks_statistic),
                show(s.l1_distance),
                s.up_fraction
                    .map_or(String::new(), |u| format!(", up fraction {u:.4}")),
                inv.out.display()
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
