use crate::dirk::ButcherTableau;
use crate::error::{Error, Result};
use crate::sparse::SmallDense;

/// Stage coupling matrices of a window of consecutive implicit stages.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSteppingMatrices {
    pub a1: SmallDense,
    pub a2: SmallDense,
    pub beta: f64,
    pub tau: f64,
    /// Number of in-flight columns.
    pub window: usize,
    /// Global implicit-stage index of column 0.
    pub start: usize,
}

/// Matrices for `s` full time steps starting at the beginning of a step.
pub fn build_window_matrices(tab: &ButcherTableau, tau: f64, s: usize) -> Result<TimeSteppingMatrices> {
    if s == 0 {
        return Err(Error::InvalidInput("window needs at least one time step".into()));
    }
    if s > 1 && !tab.stiffly_accurate() {
        return Err(Error::Unsupported(
            "several time steps per window require a stiffly accurate tableau".into(),
        ));
    }
    window_matrices(tab, tau, 0, s * tab.implicit_stages())
}

/// Matrices for `width` consecutive implicit stages whose first column is
/// global implicit stage `start` (stage `start % m′` of step `start / m′`).
///
/// Each stage couples to the stages of its own step through `A_impl`; a
/// stage in a later step couples to the last stage of the previous step
/// (the previous step's update) through the `−1/τ` entries of `A1` and, for
/// an eliminated explicit stage, the `a_{i,1}` entries of `A2`.
pub fn window_matrices(tab: &ButcherTableau, tau: f64, start: usize, width: usize) -> Result<TimeSteppingMatrices> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidInput(format!("time step must be positive, got {tau}")));
    }
    if width == 0 {
        return Err(Error::InvalidInput("window width must be positive".into()));
    }
    let mp = tab.implicit_stages();
    if !tab.stiffly_accurate() && (start % mp) + width > mp {
        return Err(Error::Unsupported(
            "windows crossing a step boundary require a stiffly accurate tableau".into(),
        ));
    }
    let a_impl = tab.a_impl();
    let coupling = tab.explicit_coupling();
    let mut a1 = SmallDense::zeros(width, width);
    let mut a2 = SmallDense::zeros(width, width);
    for p in 0..width {
        let (sp, kp) = ((start + p) / mp, (start + p) % mp);
        a1.set(p, p, 1.0 / tau);
        for q in 0..=p {
            let (sq, kq) = ((start + q) / mp, (start + q) % mp);
            if sq == sp {
                a2.set(p, q, a_impl.get(kp, kq));
            } else if sq + 1 == sp && kq == mp - 1 {
                a1.set(p, q, -1.0 / tau);
                a2.set(p, q, coupling[kp]);
            }
        }
    }
    let beta = a2.get(0, 0);
    if !(beta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "diagonal coefficient of the leading stage must be positive, got {beta}"
        )));
    }
    Ok(TimeSteppingMatrices {
        a1,
        a2,
        beta,
        tau,
        window: width,
        start,
    })
}

/// Unreduced single-step matrices over all `m` stages. An explicit first
/// stage is represented by the constraint row `y^{(n,1)} = y^n`, i.e. a unit
/// row in `A1` (scaled by `1/τ`) and a zero row in `A2`.
pub fn full_stage_matrices(tab: &ButcherTableau, tau: f64) -> (SmallDense, SmallDense) {
    let m = tab.stages();
    let a1 = SmallDense::identity(m).scaled(1.0 / tau);
    let mut a2 = tab.a().clone();
    if tab.explicit_first_stage() {
        for j in 0..m {
            a2.set(0, j, 0.0);
        }
    }
    (a1, a2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn implicit_euler_single() {
        let t = build_window_matrices(&ButcherTableau::implicit_euler(), 0.5, 1).unwrap();
        assert_eq!(t.a1.get(0, 0), 2.0);
        assert_eq!(t.a2.get(0, 0), 1.0);
        assert_eq!(t.beta, 1.0);
    }

    #[test]
    fn non_stiffly_accurate_multi_step_rejected() {
        let gl = ButcherTableau::new(vec![vec![0.5]], vec![1.0], vec![0.5]).unwrap();
        assert!(build_window_matrices(&gl, 0.1, 1).is_ok());
        assert!(matches!(build_window_matrices(&gl, 0.1, 2), Err(Error::Unsupported(_))));
    }
}
