//! Command-line companion to `trackinr-core`: file IO, the training loop,
//! compression pipelines, benchmark suites, and configuration.

pub mod bench;
pub mod config;
pub mod io;
pub mod train;

pub use bench::{BenchRecord, Scale, SweepSpec};
pub use config::CliConfig;
pub use train::{
    compress, compress_with_source, evaluate_full, train, EpochRecord, SamplerMethod, SamplerSpec,
    TrainConfig, TrainLog,
};
