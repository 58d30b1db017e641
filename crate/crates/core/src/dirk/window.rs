//! Right-hand sides and residuals of the windowed stage equations.

use crate::dirk::{ButcherTableau, ProblemOps, TimeSteppingMatrices};
use crate::error::{mismatch, Error, Result};
use crate::sparse::{stage_couple, BlockVector, CsrMatrix};

/// Time points of `width` consecutive implicit stages starting at global index `start`.
pub fn stage_times(tab: &ButcherTableau, tau: f64, start: usize, width: usize) -> Vec<f64> {
    let mp = tab.implicit_stages();
    let c = tab.c_impl();
    (start..start + width)
        .map(|g| ((g / mp) as f64 + c[g % mp]) * tau)
        .collect()
}

/// Data of the step currently in progress: the step start `y^n` and the
/// already converged stages of this step, reduced to what the stage
/// equations need.
#[derive(Clone, Debug)]
pub struct StepData {
    pub n: usize,
    pub y_n: Vec<f64>,
    /// `Mass(y^n) / τ`.
    mass_term: Vec<f64>,
    /// `f(t^n, y^n)`, needed when an explicit first stage was eliminated.
    f_n: Option<Vec<f64>>,
    /// `f(t_j, y_j)` of the converged implicit stages of this step.
    history_f: Vec<Vec<f64>>,
    history: Vec<Vec<f64>>,
}

impl StepData {
    pub fn new(problem: &dyn ProblemOps, tab: &ButcherTableau, tau: f64, n: usize, y_n: Vec<f64>) -> Self {
        let mut mass_term = vec![0.0; y_n.len()];
        problem.apply_mass(&y_n, &mut mass_term);
        mass_term.iter_mut().for_each(|v| *v /= tau);
        let f_n = tab.explicit_first_stage().then(|| {
            let mut f = vec![0.0; y_n.len()];
            problem.apply_f(n as f64 * tau, &y_n, &mut f);
            f
        });
        Self {
            n,
            y_n,
            mass_term,
            f_n,
            history_f: Vec::new(),
            history: Vec::new(),
        }
    }

    /// Records a converged stage of this step.
    pub fn push_stage(&mut self, problem: &dyn ProblemOps, t: f64, y: Vec<f64>) {
        let mut f = vec![0.0; y.len()];
        problem.apply_f(t, &y, &mut f);
        self.history_f.push(f);
        self.history.push(y);
    }

    /// Converged implicit stages of this step, in order.
    pub fn history(&self) -> &[Vec<f64>] {
        &self.history
    }
}

/// Assembles `B0` for a window: a column belonging to the current step `n`
/// holds `Mass(y^n)/τ − Σ_{j<k} a_{i,j} f(t_j, y_j)` (plus `− a_{i,1} f(t^n, y^n)`
/// for an eliminated explicit stage); columns of later steps are zero.
pub fn assemble_b0(step: &StepData, tab: &ButcherTableau, tsm: &TimeSteppingMatrices) -> Result<BlockVector> {
    let mp = tab.implicit_stages();
    let front_step = tsm.start / mp;
    let front_stage = tsm.start % mp;
    if front_step != step.n {
        return Err(Error::MissingHistory(format!(
            "window starts in step {front_step} but step data is for step {}",
            step.n
        )));
    }
    if step.history_f.len() != front_stage {
        return Err(Error::MissingHistory(format!(
            "window starts at stage {} of step {} but {} earlier stages are recorded",
            front_stage + 1,
            step.n,
            step.history_f.len()
        )));
    }
    let a = tab.a_impl();
    let coupling = tab.explicit_coupling();
    let n_rows = step.mass_term.len();
    let mut b0 = BlockVector::zeros(n_rows, tsm.window);
    for p in 0..tsm.window {
        let g = tsm.start + p;
        if g / mp != step.n {
            break;
        }
        let k = g % mp;
        let mut col = step.mass_term.clone();
        for (j, fj) in step.history_f.iter().enumerate() {
            let w = a.get(k, j);
            if w != 0.0 {
                col.iter_mut().zip(fj).for_each(|(c, f)| *c -= w * f);
            }
        }
        if let Some(f_n) = &step.f_n {
            let w = coupling[k];
            if w != 0.0 {
                col.iter_mut().zip(f_n).for_each(|(c, f)| *c -= w * f);
            }
        }
        b0.set_column(p, &col)?;
    }
    Ok(b0)
}

fn check_window(y: &BlockVector, tsm: &TimeSteppingMatrices, op: &'static str) -> Result<()> {
    if y.width() != tsm.window {
        return Err(mismatch(op, tsm.window, y.width()));
    }
    Ok(())
}

/// Right-hand side of the split fixed-point equation
/// `(M/τ + βK) Y = −M Y (A1 − I/τ)ᵀ − K Y (A2 − βI)ᵀ + B A2ᵀ + B0`.
pub fn split_residual_rhs(
    y: &BlockVector,
    m: &CsrMatrix,
    k: &CsrMatrix,
    b: &BlockVector,
    b0: &BlockVector,
    tsm: &TimeSteppingMatrices,
) -> Result<BlockVector> {
    check_window(y, tsm, "split_residual_rhs (Y width)")?;
    check_window(b, tsm, "split_residual_rhs (B width)")?;
    check_window(b0, tsm, "split_residual_rhs (B0 width)")?;
    let a1_off = tsm.a1.minus_identity(1.0 / tsm.tau);
    let a2_off = tsm.a2.minus_identity(tsm.beta);
    let mut out = stage_couple(b, &tsm.a2)?;
    out.axpy(1.0, b0)?;
    if tsm.window > 1 {
        let my = stage_couple(&m.spbop(y)?, &a1_off)?;
        let ky = stage_couple(&k.spbop(y)?, &a2_off)?;
        out.axpy(-1.0, &my)?;
        out.axpy(-1.0, &ky)?;
    }
    Ok(out)
}

/// Stage-equation residual `R(Y) = Mass(Y) A1ᵀ + F(T, Y) A2ᵀ − B0`; zero
/// exactly when every column solves its DIRK stage equation.
pub fn window_residual(
    problem: &dyn ProblemOps,
    tab: &ButcherTableau,
    y: &BlockVector,
    b0: &BlockVector,
    tsm: &TimeSteppingMatrices,
) -> Result<BlockVector> {
    check_window(y, tsm, "window_residual (Y width)")?;
    let times = stage_times(tab, tsm.tau, tsm.start, tsm.window);
    let mass = problem.apply_mass_block(y);
    let f = problem.apply_f_block(&times, y);
    let mut r = stage_couple(&mass, &tsm.a1)?;
    r.axpy(1.0, &stage_couple(&f, &tsm.a2)?)?;
    r.axpy(-1.0, b0)?;
    Ok(r)
}

/// `b(t)` for every column of a window.
pub fn rhs_block(problem: &dyn ProblemOps, times: &[f64]) -> BlockVector {
    let n = problem.size();
    let mut out = BlockVector::zeros(n, times.len());
    let mut buf = vec![0.0; n];
    for (c, &t) in times.iter().enumerate() {
        problem.rhs(t, &mut buf);
        out.set_column(c, &buf).expect("column length");
    }
    out
}
