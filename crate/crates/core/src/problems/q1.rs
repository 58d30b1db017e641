//! Bilinear finite elements on a structured grid with 2×2 Gauss quadrature.

use crate::problems::StructuredGrid;
use crate::sparse::CsrMatrix;

/// Values and physical gradients of the four bilinear basis functions at
/// the four Gauss points of an element, plus a precomputed sparsity pattern
/// and per-element scatter positions.
#[derive(Clone, Debug)]
pub struct Q1Space {
    pub grid: StructuredGrid,
    pattern: CsrMatrix,
    slots: Vec<[usize; 16]>,
    /// `phi[q][a]`
    pub phi: [[f64; 4]; 4],
    /// `grad[q][a] = (∂x, ∂y)`
    pub grad: [[[f64; 2]; 4]; 4],
    /// Reference coordinates of the Gauss points.
    pub points: [(f64, f64); 4],
    /// Quadrature weight (all four equal).
    pub weight: f64,
}

impl Q1Space {
    pub fn new(grid: StructuredGrid) -> Self {
        let g = 0.5 / 3f64.sqrt();
        let pts1 = [0.5 - g, 0.5 + g];
        let points = [(pts1[0], pts1[0]), (pts1[1], pts1[0]), (pts1[0], pts1[1]), (pts1[1], pts1[1])];
        let (hx, hy) = (grid.hx(), grid.hy());
        let mut phi = [[0.0; 4]; 4];
        let mut grad = [[[0.0; 2]; 4]; 4];
        for (q, &(xi, eta)) in points.iter().enumerate() {
            for a in 0..4 {
                let (ax, ay) = (a % 2, a / 2);
                let fx = if ax == 1 { xi } else { 1.0 - xi };
                let fy = if ay == 1 { eta } else { 1.0 - eta };
                let dx = if ax == 1 { 1.0 } else { -1.0 } / hx;
                let dy = if ay == 1 { 1.0 } else { -1.0 } / hy;
                phi[q][a] = fx * fy;
                grad[q][a] = [dx * fy, fx * dy];
            }
        }
        let mut trip = Vec::with_capacity(grid.n_cells() * 16);
        for ey in 0..grid.ny {
            for ex in 0..grid.nx {
                let nodes = Self::nodes_of(&grid, ex, ey);
                for &r in &nodes {
                    for &c in &nodes {
                        trip.push((r, c, 0.0));
                    }
                }
            }
        }
        let nv = grid.n_vertices();
        let pattern = CsrMatrix::from_triplets(nv, nv, &trip).expect("element pattern");
        let mut slots = Vec::with_capacity(grid.n_cells());
        for ey in 0..grid.ny {
            for ex in 0..grid.nx {
                let nodes = Self::nodes_of(&grid, ex, ey);
                let mut s = [0usize; 16];
                for (a, &r) in nodes.iter().enumerate() {
                    for (b, &c) in nodes.iter().enumerate() {
                        s[a * 4 + b] = pattern.position(r, c).expect("pattern entry");
                    }
                }
                slots.push(s);
            }
        }
        Self {
            grid,
            pattern,
            slots,
            phi,
            grad,
            points,
            weight: hx * hy / 4.0,
        }
    }

    fn nodes_of(grid: &StructuredGrid, ex: usize, ey: usize) -> [usize; 4] {
        [
            grid.vertex(ex, ey),
            grid.vertex(ex + 1, ey),
            grid.vertex(ex, ey + 1),
            grid.vertex(ex + 1, ey + 1),
        ]
    }

    /// Vertex numbers of element `(ex, ey)` in local order
    /// (lower-left, lower-right, upper-left, upper-right).
    pub fn element_nodes(&self, ex: usize, ey: usize) -> [usize; 4] {
        Self::nodes_of(&self.grid, ex, ey)
    }

    pub fn n_dofs(&self) -> usize {
        self.grid.n_vertices()
    }

    /// Physical coordinates of Gauss point `q` in element `(ex, ey)`.
    pub fn point(&self, ex: usize, ey: usize, q: usize) -> (f64, f64) {
        let (xi, eta) = self.points[q];
        ((ex as f64 + xi) * self.grid.hx(), (ey as f64 + eta) * self.grid.hy())
    }

    /// Value and gradient of the finite element function `u` at Gauss point `q`.
    #[inline]
    pub fn eval(&self, local: &[f64; 4], q: usize) -> (f64, [f64; 2]) {
        let mut v = 0.0;
        let mut g = [0.0; 2];
        for a in 0..4 {
            v += local[a] * self.phi[q][a];
            g[0] += local[a] * self.grad[q][a][0];
            g[1] += local[a] * self.grad[q][a][1];
        }
        (v, g)
    }

    pub fn gather(&self, u: &[f64], nodes: &[usize; 4]) -> [f64; 4] {
        [u[nodes[0]], u[nodes[1]], u[nodes[2]], u[nodes[3]]]
    }

    /// Assembles a matrix from local `4 × 4` contributions `local[a][b]`
    /// (row `a`, column `b`).
    pub fn assemble_matrix(&self, mut element: impl FnMut(usize, usize, &mut [[f64; 4]; 4])) -> CsrMatrix {
        let mut out = self.pattern.clone();
        let vals = out.values_mut();
        for ey in 0..self.grid.ny {
            for ex in 0..self.grid.nx {
                let mut local = [[0.0; 4]; 4];
                element(ex, ey, &mut local);
                let s = &self.slots[self.grid.cell(ex, ey)];
                for a in 0..4 {
                    for b in 0..4 {
                        vals[s[a * 4 + b]] += local[a][b];
                    }
                }
            }
        }
        out
    }

    /// Assembles a vector from local contributions.
    pub fn assemble_vector(&self, mut element: impl FnMut(usize, usize, &mut [f64; 4])) -> Vec<f64> {
        let mut out = vec![0.0; self.n_dofs()];
        for ey in 0..self.grid.ny {
            for ex in 0..self.grid.nx {
                let mut local = [0.0; 4];
                element(ex, ey, &mut local);
                for (a, n) in self.element_nodes(ex, ey).iter().enumerate() {
                    out[*n] += local[a];
                }
            }
        }
        out
    }

    /// Consistent mass matrix `∫ φ_j φ_i`.
    pub fn mass_matrix(&self) -> CsrMatrix {
        self.assemble_matrix(|_, _, local| {
            for q in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        local[a][b] += self.weight * self.phi[q][a] * self.phi[q][b];
                    }
                }
            }
        })
    }

    /// Row-sum lumped mass `∫ φ_i`.
    pub fn lumped_mass(&self) -> Vec<f64> {
        self.assemble_vector(|_, _, local| {
            for q in 0..4 {
                for a in 0..4 {
                    local[a] += self.weight * self.phi[q][a];
                }
            }
        })
    }
}
