use crate::dirk::linsolve::StageSolver;
use crate::dirk::window::{assemble_b0, stage_times, window_residual, StepData};
use crate::dirk::{
    iota, window_matrices, ButcherTableau, EngineEvent, EngineSettings, Observer, ProblemOps, RunOutput,
    SolverStats, StepStats, TimeSteppingMatrices,
};
use crate::error::{Error, Result};
use crate::krylov::SolveStatus;
use crate::sparse::{norm_columns, BlockVector, CsrMatrix};

/// Window of in-flight stages for the pipelined outer iteration.
///
/// Column 0 of `y` is the oldest unconverged stage, stage `k` (1-based) of
/// step `n`; column `j` is stage `ι(n, k + j)`.
#[derive(Clone, Debug)]
pub struct PipelineState {
    tab: ButcherTableau,
    tau: f64,
    step: StepData,
    k: usize,
    total_stages: usize,
    pub y: BlockVector,
    /// Implicit stages of the most recently completed step.
    pub completed: Vec<Vec<f64>>,
}

impl PipelineState {
    /// Starts at stage 1 of step 0 with every column set to `y0`.
    /// `columns` is clipped to the number of stages in `n_steps` steps.
    pub fn new(
        problem: &dyn ProblemOps,
        tab: &ButcherTableau,
        tau: f64,
        y0: &[f64],
        columns: usize,
        n_steps: usize,
    ) -> Result<Self> {
        if !tab.stiffly_accurate() {
            return Err(Error::Unsupported("pipelining requires a stiffly accurate tableau".into()));
        }
        if columns == 0 {
            return Err(Error::InvalidInput("window needs at least one column".into()));
        }
        let total_stages = n_steps * tab.implicit_stages();
        Ok(Self {
            tab: tab.clone(),
            tau,
            step: StepData::new(problem, tab, tau, 0, y0.to_vec()),
            k: 1,
            total_stages,
            y: BlockVector::replicate(y0, columns.min(total_stages.max(1))),
            completed: Vec::new(),
        })
    }

    /// Time-step index `n` of the leading stage.
    pub fn n(&self) -> usize {
        self.step.n
    }

    /// 1-based stage index `k` of the leading stage within its step.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Global implicit-stage index of column 0.
    pub fn front(&self) -> usize {
        self.step.n * self.tab.implicit_stages() + self.k - 1
    }

    /// `(step, stage)` of column `j`.
    pub fn column_stage(&self, j: usize) -> (usize, usize) {
        iota(self.step.n, self.k + j, self.tab.implicit_stages())
    }

    pub fn finished(&self) -> bool {
        self.front() >= self.total_stages
    }

    /// Converged stages of the current step.
    pub fn history(&self) -> &[Vec<f64>] {
        self.step.history()
    }

    pub fn step_start(&self) -> &[f64] {
        &self.step.y_n
    }

    pub fn matrices(&self) -> Result<TimeSteppingMatrices> {
        window_matrices(&self.tab, self.tau, self.front(), self.y.width())
    }

    pub fn b0(&self, tsm: &TimeSteppingMatrices) -> Result<BlockVector> {
        assemble_b0(&self.step, &self.tab, tsm)
    }

    /// Stage-equation residual of the current window.
    pub fn residual(&self, problem: &dyn ProblemOps) -> Result<BlockVector> {
        let tsm = self.matrices()?;
        window_residual(problem, &self.tab, &self.y, &self.b0(&tsm)?, &tsm)
    }

    /// Accepts column 0, moves the window one stage forward and duplicates the
    /// last column as the guess for the entering stage. Returns `y^{n+1}`
    /// when the accepted stage completed step `n`.
    pub fn shift(&mut self, problem: &dyn ProblemOps) -> Option<Vec<f64>> {
        let mp = self.tab.implicit_stages();
        let accepted = self.y.column(0);
        let t = stage_times(&self.tab, self.tau, self.front(), 1)[0];
        let done = if self.k < mp {
            self.step.push_stage(problem, t, accepted);
            self.k += 1;
            None
        } else {
            let mut stages = self.step.history().to_vec();
            stages.push(accepted.clone());
            self.completed = stages;
            self.step = StepData::new(problem, &self.tab, self.tau, self.step.n + 1, accepted.clone());
            self.k = 1;
            Some(accepted)
        };
        self.y.shift_left();
        let remaining = self.total_stages.saturating_sub(self.front());
        self.y.truncate_columns(remaining);
        done
    }
}

/// Pipelined outer iteration over `n_steps` steps with `columns` in-flight
/// stages.
///
/// For every leading stage: evaluate the window residual `R`; accept and
/// shift once `‖R_0‖` meets the outer tolerance; otherwise build
/// `J = Mass'(Y_0)/τ + β Df(t_0, Y_0)` from column 0, solve `J V = R` for the
/// whole block and update `Y ← Y − V`.
#[allow(clippy::too_many_arguments)]
pub fn pipelined_nonlinear_run(
    problem: &dyn ProblemOps,
    tab: &ButcherTableau,
    tau: f64,
    n_steps: usize,
    columns: usize,
    y0: &[f64],
    settings: &EngineSettings,
    keep_trajectory: bool,
    mut observer: Observer,
) -> Result<RunOutput> {
    settings.validate()?;
    let mp = tab.implicit_stages();
    let mut state = PipelineState::new(problem, tab, tau, y0, columns, n_steps)?;
    let mut stats = SolverStats {
        s: columns.div_ceil(mp),
        per_step: (1..=n_steps)
            .map(|i| StepStats {
                time_step: i,
                ..Default::default()
            })
            .collect(),
    };
    let mut trajectory = Vec::new();
    let mut final_state = y0.to_vec();
    let constrained = problem.constrained_dofs();
    let mut cached: Option<(f64, StageSolver)> = None;
    // Residual norm of each column when its stage entered the window.
    let mut entry_norms: Vec<Option<f64>> = vec![None; state.y.width()];

    while !state.finished() {
        let (n, k) = (state.n(), state.k());
        let tsm = state.matrices()?;
        let b0 = state.b0(&tsm)?;
        let t0 = stage_times(tab, tau, tsm.start, 1)[0];
        let entry = &mut stats.per_step[n];
        let mut guard = Vec::new();
        let mut history = Vec::new();
        let mut outer = 0;
        loop {
            let mut r = window_residual(problem, tab, &state.y, &b0, &tsm)?;
            if !problem.is_linear() && reset_diverging_columns(&mut state.y, &norm_columns(&r), &mut guard) {
                r = window_residual(problem, tab, &state.y, &b0, &tsm)?;
            }
            let norms = norm_columns(&r);
            for (e, &v) in entry_norms.iter_mut().zip(&norms) {
                e.get_or_insert(v);
            }
            let r0 = norms[0];
            history.push(r0);
            let reference = entry_norms[0].unwrap_or(r0);
            if settings.outer.converged(r0, reference) {
                break;
            }
            if outer >= settings.max_outer {
                return Err(Error::NonConvergence {
                    step: n + 1,
                    stage: k,
                    iterations: outer,
                    last: r0,
                    residual_history: history,
                });
            }
            let mut setup = 0.0;
            if !problem.is_linear() || cached.as_ref().is_none_or(|(b, _)| *b != tsm.beta) {
                let y_front = state.y.column(0);
                let j = CsrMatrix::linear_combination(
                    1.0 / tau,
                    &problem.linearized_mass(&y_front),
                    tsm.beta,
                    &problem.stiffness(t0, &y_front),
                )?;
                let fresh = StageSolver::new(j, constrained, settings.solver, settings.preconditioner, settings.inner)?;
                setup = fresh.setup_time();
                cached = Some((tsm.beta, fresh));
            }
            let solver = &cached.as_ref().expect("stage solver").1;
            let zero = BlockVector::zeros(r.n_rows(), r.width());
            let (v, report) = solver.solve(&r, &zero)?;
            if let SolveStatus::Breakdown { column, reason } = &report.status {
                if report.iterations == 0 || !v.as_slice().iter().all(|x| x.is_finite()) {
                    return Err(Error::LinearSolver {
                        step: n + 1,
                        stage: k,
                        reason: format!("breakdown in column {column}: {reason}"),
                    });
                }
            }
            state.y.axpy(-1.0, &v)?;
            outer += 1;
            entry.nl_iterations += 1;
            entry.ls_iterations += report.iterations;
            entry.ls_time += report.solve_time;
            entry.prec_setup_time += setup;
            if let Some(obs) = observer.as_deref_mut() {
                obs(&EngineEvent::LinearSolve {
                    time_step: n + 1,
                    stage: k,
                    iterations: report.iterations,
                    converged: report.converged,
                });
            }
        }
        if let Some(obs) = observer.as_deref_mut() {
            obs(&EngineEvent::StageAccepted {
                time_step: n + 1,
                stage: k,
                outer_iterations: outer,
            });
        }
        let shifted = state.shift(problem);
        entry_norms.remove(0);
        entry_norms.push(None);
        entry_norms.truncate(state.y.width());
        if let Some(y_next) = shifted {
            if let Some(obs) = observer.as_deref_mut() {
                obs(&EngineEvent::StepCompleted {
                    time_step: n + 1,
                    time: (n + 1) as f64 * tau,
                    state: &y_next,
                });
            }
            if keep_trajectory {
                trajectory.push(y_next.clone());
            }
            final_state = y_next;
        }
    }
    Ok(RunOutput {
        final_state,
        trajectory,
        stats,
    })
}

/// Trailing columns are iterated with the front column's Jacobian and can
/// drift away in strongly nonlinear regimes. A column whose residual exceeds
/// the one it had when the window was formed is reset to its left
/// neighbour, the same predictor used for newly entering columns.
fn reset_diverging_columns(y: &mut BlockVector, norms: &[f64], guard: &mut Vec<f64>) -> bool {
    if guard.is_empty() {
        guard.extend_from_slice(norms);
        return false;
    }
    let mut changed = false;
    for c in 1..y.width() {
        if norms[c] > guard[c] || !norms[c].is_finite() {
            let left = y.column(c - 1);
            y.set_column(c, &left).expect("column length");
            changed = true;
        }
    }
    changed
}
