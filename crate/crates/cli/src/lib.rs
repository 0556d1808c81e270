//! Library side of the `cascade-protect` command: configuration parsing and
//! bit-stable output formatting, kept separate from the binary so they can
//! be tested directly.

pub mod config;
pub mod output;

pub use config::{parse_config, serialize_config, ExperimentConfig, OracleInputs, ParseError};
pub use output::{oracle_block, series_csv, sweep_csv, SERIES_HEADER, SWEEP_HEADER};
