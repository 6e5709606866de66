//! Configuration, initial data and file formats.

mod config;
mod files;
mod initial;

pub use config::{
    parse_config, parse_config_with, serialize_config, Command, ConfigDocument, EnergySettings,
    ExperimentSettings, RunConfig,
};
pub use files::{
    read_file, seal, trace_from_csv, trace_to_csv, trajectory_from_text, trajectory_to_text,
    unseal, validate_summary, write_file, Check, Summary, FORMAT_VERSION,
};
pub use initial::{
    make_initial_data, DataSpec, InitialDataKind, ModeList, ModeTerm, CRITICAL_EXCESS,
};
