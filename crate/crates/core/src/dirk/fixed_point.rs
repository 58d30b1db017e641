use crate::dirk::linsolve::StageSolver;
use crate::dirk::window::{assemble_b0, rhs_block, split_residual_rhs, stage_times, window_residual, StepData};
use crate::dirk::{
    window_matrices, ButcherTableau, EngineEvent, EngineSettings, Observer, ProblemOps, RunOutput, SolverStats,
    StepStats,
};
use crate::error::{Error, Result};
use crate::sparse::{BlockVector, CsrMatrix};

/// Outcome of one window of the linear fixed-point iteration.
#[derive(Clone, Debug)]
pub struct FixedPointOutcome {
    /// `y^{n+1}, …, y^{n+s}`.
    pub states: Vec<Vec<f64>>,
    pub outer_iterations: usize,
    pub ls_iterations: usize,
    /// Krylov iterations and convergence flag of each outer iteration.
    pub ls_per_outer: Vec<(usize, bool)>,
    pub ls_time: f64,
    pub prec_setup_time: f64,
    /// Frobenius norm of the all-at-once residual before each iteration and at the end.
    pub residual_history: Vec<f64>,
}

/// Solves `s` time steps of a linear problem at once by iterating
/// `(M/τ + βK) Y^j = −M Y^{j−1}(A1 − I/τ)ᵀ − K Y^{j−1}(A2 − βI)ᵀ + B A2ᵀ + B0`
/// until the all-at-once residual meets the outer tolerance.
pub fn linear_fixed_point_solve(
    problem: &dyn ProblemOps,
    tab: &ButcherTableau,
    tau: f64,
    n: usize,
    s: usize,
    y_n: &[f64],
    settings: &EngineSettings,
) -> Result<FixedPointOutcome> {
    settings.validate()?;
    if !problem.is_linear() {
        return Err(Error::Unsupported("the fixed-point driver needs a linear problem".into()));
    }
    if s == 0 {
        return Err(Error::InvalidInput("window needs at least one time step".into()));
    }
    if s > 1 && !tab.stiffly_accurate() {
        return Err(Error::Unsupported(
            "several time steps per window require a stiffly accurate tableau".into(),
        ));
    }
    let mp = tab.implicit_stages();
    let tsm = window_matrices(tab, tau, n * mp, s * mp)?;
    let step = StepData::new(problem, tab, tau, n, y_n.to_vec());
    let b0 = assemble_b0(&step, tab, &tsm)?;
    let times = stage_times(tab, tau, tsm.start, tsm.window);
    let b = rhs_block(problem, &times);
    let m = problem.mass();
    let k = problem.stiffness(times[0], y_n);
    let j = CsrMatrix::linear_combination(1.0 / tau, m, tsm.beta, &k)?;
    let solver = StageSolver::new(
        j,
        problem.constrained_dofs(),
        settings.solver,
        settings.preconditioner,
        settings.inner,
    )?;

    let mut y = BlockVector::replicate(y_n, tsm.window);
    let r0 = window_residual(problem, tab, &y, &b0, &tsm)?.frobenius_norm();
    let mut history = vec![r0];
    let mut out = FixedPointOutcome {
        states: Vec::new(),
        outer_iterations: 0,
        ls_iterations: 0,
        ls_per_outer: Vec::new(),
        ls_time: 0.0,
        prec_setup_time: solver.setup_time(),
        residual_history: Vec::new(),
    };
    let mut res = r0;
    while !settings.outer.converged(res, r0) {
        if out.outer_iterations >= settings.max_outer {
            return Err(Error::NonConvergence {
                step: n + 1,
                stage: 1,
                iterations: out.outer_iterations,
                last: res,
                residual_history: history,
            });
        }
        let rhs = split_residual_rhs(&y, m, &k, &b, &b0, &tsm)?;
        let (y_new, report) = solver.solve(&rhs, &y)?;
        y = y_new;
        out.outer_iterations += 1;
        out.ls_iterations += report.iterations;
        out.ls_per_outer.push((report.iterations, report.converged));
        out.ls_time += report.solve_time;
        res = window_residual(problem, tab, &y, &b0, &tsm)?.frobenius_norm();
        history.push(res);
    }
    out.residual_history = history;
    out.states = (0..s).map(|p| y.column((p + 1) * mp - 1)).collect();
    Ok(out)
}

/// Integrates `n_steps` steps in windows of `s` steps with the linear
/// fixed-point iteration; the last window shrinks to the remaining steps.
/// Window totals are booked on the last step of each window.
#[allow(clippy::too_many_arguments)]
pub fn fixed_point_run(
    problem: &dyn ProblemOps,
    tab: &ButcherTableau,
    tau: f64,
    n_steps: usize,
    s: usize,
    y0: &[f64],
    settings: &EngineSettings,
    keep_trajectory: bool,
    mut observer: Observer,
) -> Result<RunOutput> {
    let mut stats = SolverStats {
        s,
        per_step: Vec::new(),
    };
    let mut y = y0.to_vec();
    let mut trajectory = Vec::new();
    let mut n = 0;
    while n < n_steps {
        let width = s.min(n_steps - n);
        let w = linear_fixed_point_solve(problem, tab, tau, n, width, &y, settings)?;
        if let Some(obs) = observer.as_deref_mut() {
            for &(iterations, converged) in &w.ls_per_outer {
                obs(&EngineEvent::LinearSolve {
                    time_step: n + width,
                    stage: 1,
                    iterations,
                    converged,
                });
            }
            obs(&EngineEvent::StageAccepted {
                time_step: n + width,
                stage: 1,
                outer_iterations: w.outer_iterations,
            });
        }
        for (p, state) in w.states.iter().enumerate() {
            let mut entry = StepStats {
                time_step: n + p + 1,
                ..Default::default()
            };
            if p + 1 == width {
                entry.nl_iterations = w.outer_iterations;
                entry.ls_iterations = w.ls_iterations;
                entry.ls_time = w.ls_time;
                entry.prec_setup_time = w.prec_setup_time;
            }
            stats.per_step.push(entry);
            if let Some(obs) = observer.as_deref_mut() {
                obs(&EngineEvent::StepCompleted {
                    time_step: n + p + 1,
                    time: (n + p + 1) as f64 * tau,
                    state,
                });
            }
            if keep_trajectory {
                trajectory.push(state.clone());
            }
        }
        y = w.states.last().expect("non-empty window").clone();
        n += width;
    }
    Ok(RunOutput {
        final_state: y,
        trajectory,
        stats,
    })
}
