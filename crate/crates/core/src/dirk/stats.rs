use crate::error::{Error, Result};
use crate::krylov::{ConvergenceMode, PreconditionerKind, SolveSettings, SolverKind};

/// Outer stopping rule on the residual norm: below `absolute`, or below
/// `relative` times the reference residual. With `require_both` a positive
/// absolute and a positive relative bound must hold at the same time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OuterTolerance {
    pub absolute: f64,
    pub relative: f64,
    pub require_both: bool,
}

impl OuterTolerance {
    pub fn absolute(eps: f64) -> Self {
        Self {
            absolute: eps,
            relative: 0.0,
            require_both: false,
        }
    }

    pub fn relative(eps: f64) -> Self {
        Self {
            absolute: 0.0,
            relative: eps,
            require_both: false,
        }
    }

    /// Either bound suffices.
    pub fn combined(absolute: f64, relative: f64) -> Self {
        Self {
            absolute,
            relative,
            require_both: false,
        }
    }

    /// Both bounds must hold.
    pub fn both(absolute: f64, relative: f64) -> Self {
        Self {
            absolute,
            relative,
            require_both: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| (0.0..1.0).contains(&v);
        if !ok(self.absolute) || !ok(self.relative) || (self.absolute == 0.0 && self.relative == 0.0) {
            return Err(Error::InvalidInput(format!(
                "outer tolerances must lie in [0, 1) with at least one positive, got {} / {}",
                self.absolute, self.relative
            )));
        }
        Ok(())
    }

    pub fn converged(&self, residual: f64, reference: f64) -> bool {
        let abs = residual <= self.absolute;
        let rel = residual <= self.relative * reference;
        if self.require_both && self.absolute > 0.0 && self.relative > 0.0 {
            abs && rel
        } else {
            abs || rel
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngineSettings {
    pub solver: SolverKind,
    pub preconditioner: PreconditionerKind,
    pub inner: SolveSettings,
    pub outer: OuterTolerance,
    pub max_outer: usize,
}

impl Default for EngineSettings {
    fn default() -> Self {
        Self {
            solver: SolverKind::BiCgStab,
            preconditioner: PreconditionerKind::Ilu0,
            inner: SolveSettings {
                reduction: 1e-8,
                max_iters: 1000,
                convergence_mode: ConvergenceMode::AllColumns,
            },
            outer: OuterTolerance::absolute(1e-8),
            max_outer: 50,
        }
    }
}

impl EngineSettings {
    pub fn validate(&self) -> Result<()> {
        self.inner.validate()?;
        self.outer.validate()?;
        if self.max_outer == 0 {
            return Err(Error::InvalidInput("max_outer must be at least 1".into()));
        }
        Ok(())
    }
}

/// Counters of one time step. `time_step` is 1-based: entry `n` covers the
/// work that produced `y^n`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepStats {
    pub time_step: usize,
    pub nl_iterations: usize,
    pub ls_iterations: usize,
    pub ls_time: f64,
    pub prec_setup_time: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolverStats {
    pub s: usize,
    pub per_step: Vec<StepStats>,
}

impl SolverStats {
    pub fn nl_iterations(&self) -> usize {
        self.per_step.iter().map(|p| p.nl_iterations).sum()
    }

    pub fn ls_iterations(&self) -> usize {
        self.per_step.iter().map(|p| p.ls_iterations).sum()
    }

    pub fn ls_time(&self) -> f64 {
        self.per_step.iter().map(|p| p.ls_time).sum()
    }

    pub fn prec_setup_time(&self) -> f64 {
        self.per_step.iter().map(|p| p.prec_setup_time).sum()
    }
}

/// Progress notifications emitted by the drivers.
#[derive(Debug)]
pub enum EngineEvent<'a> {
    /// One outer iteration: a linear block solve.
    LinearSolve {
        time_step: usize,
        stage: usize,
        iterations: usize,
        converged: bool,
    },
    /// The leading stage met the outer tolerance after `outer_iterations` solves.
    StageAccepted {
        time_step: usize,
        stage: usize,
        outer_iterations: usize,
    },
    /// `y^{time_step}` is final.
    StepCompleted {
        time_step: usize,
        time: f64,
        state: &'a [f64],
    },
}

/// Result of a full time integration.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub final_state: Vec<f64>,
    /// `y^1, y^2, …` when requested.
    pub trajectory: Vec<Vec<f64>>,
    pub stats: SolverStats,
}

pub type Observer<'o> = Option<&'o mut dyn FnMut(&EngineEvent)>;
