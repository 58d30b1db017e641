use crate::sparse::{BlockVector, CsrMatrix};

/// How the outer iteration linearizes `f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Linearization {
    /// Exact Jacobian `Df`.
    Newton,
    /// Constant `L` replacing the derivative of a nonlinear mass term.
    LScheme(f64),
}

/// Semi-discrete problem `d/dt Mass(y) + f(t, y) = 0` with `f(t, y) = K[y] y − b(t)`.
///
/// Dirichlet-constrained unknowns listed by [`ProblemOps::constrained_dofs`]
/// have zero mass rows and `f_i = y_i − g_i(t)`, so the stage equations pin
/// them to the boundary data.
pub trait ProblemOps {
    fn size(&self) -> usize;

    /// Constant mass matrix (for a nonlinear mass, the matrix the nonlinear
    /// term is lumped against).
    fn mass(&self) -> &CsrMatrix;

    /// `Mass(y)`; `M y` unless the time derivative is nonlinear.
    fn apply_mass(&self, y: &[f64], out: &mut [f64]) {
        self.mass().spmv_into(y, out).expect("state length matches mass matrix");
    }

    /// Mass part of the outer-iteration operator at state `y`.
    fn linearized_mass(&self, _y: &[f64]) -> CsrMatrix {
        self.mass().clone()
    }

    /// Linearized stiffness at `(t, y)`: the Jacobian `Df` for Newton, the
    /// operator `K[y]` otherwise. Linear problems return `K`.
    fn stiffness(&self, t: f64, y: &[f64]) -> CsrMatrix;

    /// `b(t)`.
    fn rhs(&self, t: f64, out: &mut [f64]);

    /// `f(t, y)`.
    fn apply_f(&self, t: f64, y: &[f64], out: &mut [f64]);

    fn linearization(&self) -> Linearization {
        Linearization::Newton
    }

    /// Whether `K` and `Mass` are independent of `y`.
    fn is_linear(&self) -> bool {
        false
    }

    fn constrained_dofs(&self) -> &[usize] {
        &[]
    }

    fn initial_state(&self) -> Vec<f64>;

    /// `Mass(Y)` column by column.
    fn apply_mass_block(&self, y: &BlockVector) -> BlockVector {
        if self.is_linear() {
            return self.mass().spbop(y).expect("block rows match mass matrix");
        }
        let mut out = BlockVector::zeros(y.n_rows(), y.width());
        let mut buf = vec![0.0; y.n_rows()];
        for c in 0..y.width() {
            self.apply_mass(&y.column(c), &mut buf);
            out.set_column(c, &buf).expect("column length");
        }
        out
    }

    /// `F(T, Y) = (f(T_0, Y_0), …)`.
    fn apply_f_block(&self, times: &[f64], y: &BlockVector) -> BlockVector {
        let mut out = BlockVector::zeros(y.n_rows(), y.width());
        let mut buf = vec![0.0; y.n_rows()];
        for c in 0..y.width() {
            self.apply_f(times[c], &y.column(c), &mut buf);
            out.set_column(c, &buf).expect("column length");
        }
        out
    }
}

/// Linear problem given by explicit matrices, `f(t, y) = K y − b(t)`.
pub struct LinearProblem<B: Fn(f64, &mut [f64])> {
    pub mass: CsrMatrix,
    pub stiffness: CsrMatrix,
    pub rhs: B,
    pub initial: Vec<f64>,
}

impl<B: Fn(f64, &mut [f64])> ProblemOps for LinearProblem<B> {
    fn size(&self) -> usize {
        self.mass.n_rows()
    }

    fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    fn stiffness(&self, _t: f64, _y: &[f64]) -> CsrMatrix {
        self.stiffness.clone()
    }

    fn rhs(&self, t: f64, out: &mut [f64]) {
        (self.rhs)(t, out)
    }

    fn apply_f(&self, t: f64, y: &[f64], out: &mut [f64]) {
        self.stiffness.spmv_into(y, out).expect("state length matches stiffness");
        let mut b = vec![0.0; out.len()];
        (self.rhs)(t, &mut b);
        out.iter_mut().zip(&b).for_each(|(o, bi)| *o -= bi);
    }

    fn is_linear(&self) -> bool {
        true
    }

    fn initial_state(&self) -> Vec<f64> {
        self.initial.clone()
    }

    fn apply_f_block(&self, times: &[f64], y: &BlockVector) -> BlockVector {
        let mut out = self.stiffness.spbop(y).expect("block rows match stiffness");
        let mut b = vec![0.0; y.n_rows()];
        for (c, &t) in times.iter().enumerate() {
            (self.rhs)(t, &mut b);
            for (i, bi) in b.iter().enumerate() {
                let v = out.get(i, c) - bi;
                out.set(i, c, v);
            }
        }
        out
    }
}
