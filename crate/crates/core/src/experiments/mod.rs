//! Config-driven experiment harness: SNR against phase resolution, against
//! transmit power, and against MA–TRIS distance, plus single debug runs.

mod config;
mod output;
mod rng;
mod runner;

pub use config::{ExperimentConfig, Scenario};
pub use output::{
    csv_string, format_real, write_csv, write_outputs, write_trace, WrittenFiles, CSV_COLUMNS,
    SCHEMA_VERSION,
};
pub use rng::{stream_id, StreamRng};
pub use runner::{
    run_nf_ff_sweep, run_scenario, run_single, run_snr_vs_bits, run_snr_vs_power, ResultRow,
    ScenarioOutput, BASELINE_COUNTS,
};
