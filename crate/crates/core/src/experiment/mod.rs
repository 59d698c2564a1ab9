//! Desk-scale experiments: hunts, resonated-moment pipelines and their outputs.

mod config;
mod hunt;
mod output;
mod pipeline;

pub use config::{ExperimentConfig, GridSection, PrecisionSection, ResonatorSection, RunSection};
pub use hunt::{
    h_floor, run_hunt, theoretical_scale, validate_hunt, GridStats, HuntOutcome, HuntReport, MeanValueCheck, SignBest,
};
pub use output::{
    emit_outputs, hunt_rows, read_csv, write_csv, CsvRow, ExperimentKind, ExperimentReport, OutputPaths, CSV_HEADER,
    REPORT_SCHEMA,
};
pub use pipeline::{pipeline_kernel, run_pipeline, PipelineReport, PipelineTerm};

use crate::error::Result;

/// Runs an experiment and returns its report and CSV rows.
pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<(ExperimentReport, Vec<CsvRow>)> {
    match kind {
        ExperimentKind::Hunt => {
            let outcome = run_hunt(cfg)?;
            let rows = hunt_rows(&outcome);
            Ok((ExperimentReport::hunt(cfg, outcome.report), rows))
        }
        ExperimentKind::Pipeline => Ok((ExperimentReport::pipeline(cfg, run_pipeline(cfg)?), vec![])),
    }
}

/// Re-runs the experiment recorded in a report.
pub fn replay(report: &ExperimentReport) -> Result<(ExperimentReport, Vec<CsvRow>)> {
    run_experiment(report.kind.clone(), &report.config)
}
