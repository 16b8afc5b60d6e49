//! Configuration, pipeline orchestration, and report rendering for the
//! forged-spectra command-line tool.

pub mod config;
pub mod pipeline;
pub mod report;

pub use config::{ConfigError, Mode, Overrides, RunConfig};
pub use pipeline::{run_pipeline, AnsatzRecord, Pipeline, PipelineError, RunArtifacts};
pub use report::{
    comparison_csv, deviation_pair, deviation_report, text_report, DeviationReport, PairDeviation,
    ReportError,
};
