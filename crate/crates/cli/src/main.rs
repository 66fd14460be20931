//! fgrlab binary: exit code 0 on success, 1 on a computational anomaly or
//! failure, 2 on a usage error.

use std::process::ExitCode;

use clap::Parser;
use fgrlab::{run, Cli, UsageError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("FGRLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Ignore the error if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(&cli) {
        Ok(manifest) if manifest.anomalies.is_empty() => ExitCode::SUCCESS,
        Ok(manifest) => {
            for a in &manifest.anomalies {
                eprintln!("anomaly: {a}");
            }
            ExitCode::from(1)
        }
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
