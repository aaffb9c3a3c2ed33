//! Experiment orchestration: config parsing, the run loop wiring policy to
//! environment, regret/violation/EE metrics, seed sweeps, CSV persistence and
//! brute-force oracle checks for small instances.

pub mod config;
pub mod csv;
pub mod oracle;
pub mod run;
pub mod sweep;

pub use config::{EnvConfig, PolicyId, RegimeId, RunConfig, TauSetting};
pub use csv::{read_csv, write_records_csv, write_sweep_csv};
pub use run::{run_experiment, RoundRecord, RunResult};
pub use sweep::{sweep, SweepResult};

/// Diagnostic verbosity from the `AOEECC_LOG` environment variable:
/// 0 silent (default), 1 run summaries, 2 per-checkpoint traces.
pub fn log_level() -> u8 {
    std::env::var("AOEECC_LOG")
        .ok()
        .and_then(|v| v.trim().parse::<u8>().ok())
        .unwrap_or(0)
}
