//! Richards equation in pressure-head form, bilinear elements with a lumped
//! water-content term, linearized by the L-scheme.

use crate::dirk::{Linearization, ProblemOps};
use crate::error::{Error, Result};
use crate::problems::{Q1Space, StructuredGrid, VanGenuchten};
use crate::sparse::CsrMatrix;

/// Trench infiltration setup on `(0, 2) × (0, 3)`: a trench on the top edge
/// for `x ≤ 1` whose head ramps from `-2` to `0.2` over `ramp_time`, and a
/// hydrostatic water table on the right edge for `z ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RichardsData {
    pub soil: VanGenuchten,
    pub l: f64,
    pub ramp_time: f64,
}

impl Default for RichardsData {
    fn default() -> Self {
        Self {
            soil: VanGenuchten::silt_loam(),
            l: 4.501e-2,
            ramp_time: 1.0 / 16.0,
        }
    }
}

pub const WIDTH: f64 = 2.0;
pub const HEIGHT: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Boundary {
    Trench,
    WaterTable,
}

pub struct Richards {
    pub space: Q1Space,
    pub data: RichardsData,
    /// Lumped mass with zero rows on Dirichlet nodes.
    mass: CsrMatrix,
    lumped: Vec<f64>,
    dirichlet: Vec<usize>,
    kind: Vec<Option<Boundary>>,
}

impl Richards {
    pub fn new(nx: usize, nz: usize, data: RichardsData) -> Result<Self> {
        if !(data.l > 0.0) || !(data.ramp_time > 0.0) {
            return Err(Error::InvalidInput(format!("invalid Richards data {data:?}")));
        }
        let grid = StructuredGrid::new(nx, nz, WIDTH, HEIGHT)?;
        let space = Q1Space::new(grid);
        let eps = 1e-12;
        let mut kind = vec![None; grid.n_vertices()];
        for (v, k) in kind.iter_mut().enumerate() {
            let (i, j) = grid.vertex_ij(v);
            let (x, z) = grid.vertex_coords(i, j);
            if j == grid.ny && x <= 1.0 + eps {
                *k = Some(Boundary::Trench);
            } else if i == grid.nx && z <= 1.0 + eps {
                *k = Some(Boundary::WaterTable);
            }
        }
        let dirichlet: Vec<usize> = (0..kind.len()).filter(|&v| kind[v].is_some()).collect();
        let mut lumped = space.lumped_mass();
        for &d in &dirichlet {
            lumped[d] = 0.0;
        }
        let mass = CsrMatrix::from_diagonal(&lumped);
        Ok(Self {
            space,
            data,
            mass,
            lumped,
            dirichlet,
            kind,
        })
    }

    pub fn benchmark(nx: usize, nz: usize) -> Result<Self> {
        Self::new(nx, nz, RichardsData::default())
    }

    fn height(&self, v: usize) -> f64 {
        let (i, j) = self.space.grid.vertex_ij(v);
        self.space.grid.vertex_coords(i, j).1
    }

    /// Trench head at time `t`.
    pub fn trench_head(&self, t: f64) -> f64 {
        if t <= self.data.ramp_time {
            -2.0 + 2.2 * t / self.data.ramp_time
        } else {
            0.2
        }
    }

    /// Dirichlet value at vertex `v`, `None` for free vertices.
    pub fn boundary_value(&self, t: f64, v: usize) -> Option<f64> {
        self.kind[v].map(|k| match k {
            Boundary::Trench => self.trench_head(t),
            Boundary::WaterTable => 1.0 - self.height(v),
        })
    }

    /// Nodal water content.
    pub fn water_content(&self, psi: &[f64]) -> Vec<f64> {
        psi.iter().map(|&p| self.data.soil.theta(p)).collect()
    }

    /// Flux assembly `∫ K(ψ) ∇(ψ + z)·∇φ_i` over all vertices.
    fn flux(&self, psi: &[f64]) -> Vec<f64> {
        let sp = &self.space;
        let soil = &self.data.soil;
        sp.assemble_vector(|ex, ey, local| {
            let loc = sp.gather(psi, &sp.element_nodes(ex, ey));
            for q in 0..4 {
                let (p, g) = sp.eval(&loc, q);
                let k = soil.conductivity(p) * sp.weight;
                for (a, l) in local.iter_mut().enumerate() {
                    let ga = sp.grad[q][a];
                    *l += k * (g[0] * ga[0] + (g[1] + 1.0) * ga[1]);
                }
            }
        })
    }
}

impl ProblemOps for Richards {
    fn size(&self) -> usize {
        self.space.n_dofs()
    }

    fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    fn apply_mass(&self, y: &[f64], out: &mut [f64]) {
        for ((o, &m), &p) in out.iter_mut().zip(&self.lumped).zip(y) {
            *o = if m == 0.0 { 0.0 } else { m * self.data.soil.theta(p) };
        }
    }

    fn linearized_mass(&self, _y: &[f64]) -> CsrMatrix {
        self.mass.scaled(self.data.l)
    }

    /// `K[ψ]` with identity rows on Dirichlet vertices.
    fn stiffness(&self, _t: f64, y: &[f64]) -> CsrMatrix {
        let sp = &self.space;
        let soil = &self.data.soil;
        let mut k = sp.assemble_matrix(|ex, ey, local| {
            let loc = sp.gather(y, &sp.element_nodes(ex, ey));
            for q in 0..4 {
                let (p, _) = sp.eval(&loc, q);
                let c = soil.conductivity(p) * sp.weight;
                for a in 0..4 {
                    let ga = sp.grad[q][a];
                    for b in 0..4 {
                        let gb = sp.grad[q][b];
                        local[a][b] += c * (ga[0] * gb[0] + ga[1] * gb[1]);
                    }
                }
            }
        });
        let offsets = k.row_offsets().to_vec();
        let cols = k.col_indices().to_vec();
        let vals = k.values_mut();
        for &d in &self.dirichlet {
            for p in offsets[d]..offsets[d + 1] {
                vals[p] = if cols[p] == d { 1.0 } else { 0.0 };
            }
        }
        k
    }

    /// Boundary data on Dirichlet vertices, zero elsewhere.
    fn rhs(&self, t: f64, out: &mut [f64]) {
        for (v, o) in out.iter_mut().enumerate() {
            *o = self.boundary_value(t, v).unwrap_or(0.0);
        }
    }

    fn apply_f(&self, t: f64, y: &[f64], out: &mut [f64]) {
        let flux = self.flux(y);
        for (v, o) in out.iter_mut().enumerate() {
            *o = match self.boundary_value(t, v) {
                Some(g) => y[v] - g,
                None => flux[v],
            };
        }
    }

    fn linearization(&self) -> Linearization {
        Linearization::LScheme(self.data.l)
    }

    fn constrained_dofs(&self) -> &[usize] {
        &self.dirichlet
    }

    /// Hydrostatic head `1 − z`, which matches both boundary conditions at `t = 0`.
    fn initial_state(&self) -> Vec<f64> {
        (0..self.size()).map(|v| 1.0 - self.height(v)).collect()
    }
}
