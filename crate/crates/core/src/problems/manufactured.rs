//! Semi-discrete heat equation with a known exact solution, for measuring
//! temporal convergence without spatial error.

use std::f64::consts::PI;

use crate::dirk::ProblemOps;
use crate::error::{Error, Result};
use crate::sparse::{BlockVector, CsrMatrix};

/// `y' + K y = b(t)` with `K` the scaled 1D Dirichlet Laplacian and `b`
/// chosen so that `y(t) = cos(t) v`, `v_i = sin(π x_i)`, solves it exactly.
pub struct ManufacturedHeat {
    mass: CsrMatrix,
    stiffness: CsrMatrix,
    shape: Vec<f64>,
    k_shape: Vec<f64>,
}

impl ManufacturedHeat {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("need at least one interior node".into()));
        }
        let h = 1.0 / (n + 1) as f64;
        let c = 1.0 / (h * h);
        let mut trip = Vec::with_capacity(3 * n);
        for i in 0..n {
            trip.push((i, i, 2.0 * c));
            if i > 0 {
                trip.push((i, i - 1, -c));
            }
            if i + 1 < n {
                trip.push((i, i + 1, -c));
            }
        }
        let stiffness = CsrMatrix::from_triplets(n, n, &trip)?;
        let shape: Vec<f64> = (1..=n).map(|i| (PI * i as f64 * h).sin()).collect();
        let k_shape = stiffness.spmv(&shape)?;
        Ok(Self {
            mass: CsrMatrix::identity(n),
            stiffness,
            shape,
            k_shape,
        })
    }

    pub fn exact(&self, t: f64) -> Vec<f64> {
        self.shape.iter().map(|v| v * t.cos()).collect()
    }
}

impl ProblemOps for ManufacturedHeat {
    fn size(&self) -> usize {
        self.shape.len()
    }

    fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    fn stiffness(&self, _t: f64, _y: &[f64]) -> CsrMatrix {
        self.stiffness.clone()
    }

    fn rhs(&self, t: f64, out: &mut [f64]) {
        let (s, c) = t.sin_cos();
        for ((o, v), kv) in out.iter_mut().zip(&self.shape).zip(&self.k_shape) {
            *o = -s * v + c * kv;
        }
    }

    fn apply_f(&self, t: f64, y: &[f64], out: &mut [f64]) {
        self.stiffness.spmv_into(y, out).expect("state length");
        let mut b = vec![0.0; out.len()];
        self.rhs(t, &mut b);
        out.iter_mut().zip(&b).for_each(|(o, bi)| *o -= bi);
    }

    fn is_linear(&self) -> bool {
        true
    }

    fn initial_state(&self) -> Vec<f64> {
        self.exact(0.0)
    }

    fn apply_f_block(&self, times: &[f64], y: &BlockVector) -> BlockVector {
        let mut out = self.stiffness.spbop(y).expect("block rows");
        let mut b = vec![0.0; y.n_rows()];
        for (c, &t) in times.iter().enumerate() {
            self.rhs(t, &mut b);
            for (i, bi) in b.iter().enumerate() {
                let v = out.get(i, c) - bi;
                out.set(i, c, v);
            }
        }
        out
    }
}
