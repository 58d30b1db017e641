//! Experiment configuration, orchestration and CSV output.

mod config;
mod run;

pub use config::{Driver, ExperimentConfig, OuterCombine, ProblemKind};
pub use run::{
    build_problem, per_step_path, run_experiment, simulate, summary_line, summary_path, sweep, write_per_step,
    write_summary, BuiltProblem, ExperimentOutcome, SweepRow, PER_STEP_HEADER, SUMMARY_HEADER,
};
