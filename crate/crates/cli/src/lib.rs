//! Command-line front end for vector OFDM experiments: presets, pipeline
//! commands and the file formats they share.

pub mod config;
pub mod generic;
pub mod io;
pub mod plot;
pub mod presets;

pub use config::{
    ConfigOverrides, ExperimentConfig, NullRule, OutputFormat, PlotKind, Preset, SolveMode,
};
pub use presets::{run_preset, Check, Summary};
