//! DIRK time stepping over windows of stages: all-at-once matrices, the
//! linear fixed-point driver and the pipelined outer iteration.

mod fixed_point;
mod linsolve;
mod matrices;
mod pipeline;
mod problem;
mod stats;
mod tableau;
mod window;

pub use fixed_point::{fixed_point_run, linear_fixed_point_solve, FixedPointOutcome};
pub use linsolve::StageSolver;
pub use matrices::{build_window_matrices, full_stage_matrices, window_matrices, TimeSteppingMatrices};
pub use pipeline::{pipelined_nonlinear_run, PipelineState};
pub use problem::{LinearProblem, Linearization, ProblemOps};
pub use stats::{
    EngineEvent, EngineSettings, Observer, OuterTolerance, RunOutput, SolverStats, StepStats,
};
pub use tableau::{iota, ButcherTableau, TableauKind};
pub use window::{assemble_b0, rhs_block, split_residual_rhs, stage_times, window_residual, StepData};
