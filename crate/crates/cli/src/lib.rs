//! Instance files, seeded generators, experiment sweeps, report files and
//! the verification suite behind the `frugal` command.

pub mod error;
pub mod experiment;
pub mod generate;
pub mod instance;
pub mod report;
pub mod verify;

pub use error::{CliError, Result};
pub use experiment::{
    run_experiment, write_csv, ExperimentConfig, ExperimentReport, ExperimentRow, CSV_COLUMNS,
};
pub use generate::{generate, instance_seeds, Generator, GeneratorKind};
pub use instance::{
    parse_instance, read_instance, to_text, write_instance, Instance, InstanceFile, SystemSpec,
};
pub use report::{benchmark_file, run_records, BenchmarkFile, ReportFile, RunRecord};
pub use verify::{fixture_pack, verify_suite, VerifyReport};
