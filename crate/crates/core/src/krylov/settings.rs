use crate::error::{Error, Result};

/// Which residual columns must meet the reduction target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceMode {
    AllColumns,
    FirstColumn,
}

impl std::str::FromStr for ConvergenceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_columns" | "all" => Ok(Self::AllColumns),
            "first_column" | "first" => Ok(Self::FirstColumn),
            other => Err(Error::Config(format!("unknown convergence mode '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveSettings {
    /// Target defect reduction `‖B − AX‖ ≤ reduction · ‖B − AX0‖` per column.
    pub reduction: f64,
    pub max_iters: usize,
    pub convergence_mode: ConvergenceMode,
}

impl SolveSettings {
    pub fn new(reduction: f64, max_iters: usize, convergence_mode: ConvergenceMode) -> Result<Self> {
        let s = Self {
            reduction,
            max_iters,
            convergence_mode,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.reduction > 0.0 && self.reduction < 1.0) {
            return Err(Error::InvalidInput(format!(
                "reduction must lie in (0, 1), got {}",
                self.reduction
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    /// Whether `defects` meet the target relative to `initial`.
    pub fn is_converged(&self, defects: &[f64], initial: &[f64]) -> bool {
        let ok = |c: usize| defects[c] <= self.reduction * initial[c];
        match self.convergence_mode {
            ConvergenceMode::AllColumns => (0..defects.len()).all(ok),
            ConvergenceMode::FirstColumn => defects.is_empty() || ok(0),
        }
    }
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            reduction: 1e-8,
            max_iters: 1000,
            convergence_mode: ConvergenceMode::AllColumns,
        }
    }
}

/// Termination status of a block Krylov solve.
#[derive(Clone, Debug, PartialEq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    /// The block recurrence lost all search directions; `column` names the
    /// first right-hand side affected.
    Breakdown { column: usize, reason: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrylovReport {
    pub iterations: usize,
    pub converged: bool,
    pub status: SolveStatus,
    /// Recomputed `‖B − AX‖` per column at return.
    pub final_defects: Vec<f64>,
    pub initial_defects: Vec<f64>,
    /// Preconditioner setup seconds (copied from the preconditioner).
    pub setup_time: f64,
    pub solve_time: f64,
}

/// Block solver choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Cg,
    BiCgStab,
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cg" | "block_cg" => Ok(Self::Cg),
            "bicgstab" | "block_bicgstab" => Ok(Self::BiCgStab),
            other => Err(Error::Config(format!("unknown solver '{other}'"))),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Cg => "cg",
            Self::BiCgStab => "bicgstab",
        })
    }
}
