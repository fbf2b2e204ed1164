//! Experiment configuration, seeded execution and result persistence.

pub mod bands;
pub mod config;
pub mod output;
pub mod runner;
pub mod stream;
pub mod suites;

pub use bands::Bands;
pub use config::{ExperimentConfig, OutputFormat, Target};
pub use output::{emit_results, read_results, ResultRow};
pub use runner::run_config;
pub use stream::{derive_substream, Substream};
