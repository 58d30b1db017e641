//! Nonlinear diffusion-reaction with a moving sink, bilinear elements.

use crate::dirk::{Linearization, ProblemOps};
use crate::error::{Error, Result};
use crate::problems::{Q1Space, StructuredGrid};
use crate::sparse::CsrMatrix;

/// Coefficients of `∂t u − ∇·((1−u)u ∇u) + β(1−u)u = f`, where `f` equals
/// `source` inside a circle of radius `radius` moving along
/// `(0.5 + 0.25 cos(ωt), 0.5)`. The sink drives `u` slightly below zero,
/// where `(1−u)u` would turn into backward diffusion; with
/// `clamp_diffusion` the coefficient is `max((1−u)u, 0)` instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffReactData {
    pub beta: f64,
    pub source: f64,
    pub radius: f64,
    pub omega: f64,
    pub initial: f64,
    pub clamp_diffusion: bool,
}

impl Default for DiffReactData {
    fn default() -> Self {
        Self {
            beta: 1.0,
            source: -0.1,
            radius: 0.1,
            omega: 6.0,
            initial: 0.5,
            clamp_diffusion: true,
        }
    }
}

// Sub-samples per direction for the discontinuous source.
const SOURCE_SAMPLES: usize = 8;

pub struct DiffReact {
    pub space: Q1Space,
    pub data: DiffReactData,
    mass: CsrMatrix,
}

impl DiffReact {
    pub fn new(nx: usize, ny: usize, data: DiffReactData) -> Result<Self> {
        if !(data.radius > 0.0) || !data.beta.is_finite() || !data.source.is_finite() {
            return Err(Error::InvalidInput(format!("invalid diffusion-reaction data {data:?}")));
        }
        let space = Q1Space::new(StructuredGrid::unit_square(nx, ny)?);
        let mass = space.mass_matrix();
        Ok(Self { space, data, mass })
    }

    pub fn benchmark(nx: usize, ny: usize) -> Result<Self> {
        Self::new(nx, ny, DiffReactData::default())
    }

    pub fn source_center(&self, t: f64) -> (f64, f64) {
        (0.5 + 0.25 * (self.data.omega * t).cos(), 0.5)
    }

    /// Pointwise source term.
    pub fn source(&self, t: f64, x: f64, y: f64) -> f64 {
        let (cx, cy) = self.source_center(t);
        if (x - cx).powi(2) + (y - cy).powi(2) < self.data.radius.powi(2) {
            self.data.source
        } else {
            0.0
        }
    }

    /// Diffusion coefficient and its derivative.
    #[inline]
    pub fn diffusion(&self, u: f64) -> (f64, f64) {
        let a = (1.0 - u) * u;
        if self.data.clamp_diffusion && a < 0.0 {
            (0.0, 0.0)
        } else {
            (a, 1.0 - 2.0 * u)
        }
    }
}

impl ProblemOps for DiffReact {
    fn size(&self) -> usize {
        self.space.n_dofs()
    }

    fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    /// Newton Jacobian of `f`.
    fn stiffness(&self, _t: f64, y: &[f64]) -> CsrMatrix {
        let sp = &self.space;
        let beta = self.data.beta;
        sp.assemble_matrix(|ex, ey, local| {
            let loc = sp.gather(y, &sp.element_nodes(ex, ey));
            for q in 0..4 {
                let (u, g) = sp.eval(&loc, q);
                let (a, da) = self.diffusion(u);
                let dr = beta * (1.0 - 2.0 * u);
                let w = sp.weight;
                for i in 0..4 {
                    let gi = sp.grad[q][i];
                    let flux_i = g[0] * gi[0] + g[1] * gi[1];
                    for j in 0..4 {
                        let gj = sp.grad[q][j];
                        let pj = sp.phi[q][j];
                        local[i][j] += w
                            * (a * (gj[0] * gi[0] + gj[1] * gi[1]) + da * pj * flux_i + dr * pj * sp.phi[q][i]);
                    }
                }
            }
        })
    }

    fn rhs(&self, t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let sp = &self.space;
        let g = sp.grid;
        let (hx, hy) = (g.hx(), g.hy());
        let (cx, cy) = self.source_center(t);
        let r = self.data.radius;
        let span = |c: f64, h: f64, n: usize| {
            let lo = ((c - r) / h).floor().max(0.0) as usize;
            let hi = (((c + r) / h).ceil().max(0.0) as usize).min(n);
            lo..hi
        };
        let d = 1.0 / SOURCE_SAMPLES as f64;
        let w = hx * hy * d * d;
        for ey in span(cy, hy, g.ny) {
            for ex in span(cx, hx, g.nx) {
                let nodes = sp.element_nodes(ex, ey);
                for sy in 0..SOURCE_SAMPLES {
                    let eta = (sy as f64 + 0.5) * d;
                    for sx in 0..SOURCE_SAMPLES {
                        let xi = (sx as f64 + 0.5) * d;
                        let f = self.source(t, (ex as f64 + xi) * hx, (ey as f64 + eta) * hy);
                        if f == 0.0 {
                            continue;
                        }
                        let phi = [(1.0 - xi) * (1.0 - eta), xi * (1.0 - eta), (1.0 - xi) * eta, xi * eta];
                        for a in 0..4 {
                            out[nodes[a]] += w * f * phi[a];
                        }
                    }
                }
            }
        }
    }

    fn apply_f(&self, t: f64, y: &[f64], out: &mut [f64]) {
        let sp = &self.space;
        let beta = self.data.beta;
        let v = sp.assemble_vector(|ex, ey, local| {
            let loc = sp.gather(y, &sp.element_nodes(ex, ey));
            for q in 0..4 {
                let (u, g) = sp.eval(&loc, q);
                let (a, _) = self.diffusion(u);
                let react = beta * (1.0 - u) * u;
                for i in 0..4 {
                    let gi = sp.grad[q][i];
                    local[i] += sp.weight * (a * (g[0] * gi[0] + g[1] * gi[1]) + react * sp.phi[q][i]);
                }
            }
        });
        self.rhs(t, out);
        out.iter_mut().zip(&v).for_each(|(o, vi)| *o = vi - *o);
    }

    fn linearization(&self) -> Linearization {
        Linearization::Newton
    }

    fn initial_state(&self) -> Vec<f64> {
        vec![self.data.initial; self.size()]
    }
}
