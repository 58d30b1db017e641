//! Cell-centred finite volumes for linear convection-diffusion-reaction on
//! the unit square, with a moving Dirichlet inflow profile on the left edge.

use crate::dirk::ProblemOps;
use crate::error::{Error, Result};
use crate::problems::StructuredGrid;
use crate::sparse::{BlockVector, CsrMatrix};

/// Boundary data on the Dirichlet edges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InflowProfile {
    /// `|sin 2t|` on the left edge for `1/4 < y < 3/4 + |sin 2t|/4`, zero elsewhere.
    Pulsating,
    /// Homogeneous data.
    Zero,
}

/// Coefficients of `∂t u + ∇·(−a∇u + b u) + c u = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvDiffData {
    pub diffusion: f64,
    pub velocity: [f64; 2],
    pub reaction: f64,
    pub inflow: InflowProfile,
}

impl Default for ConvDiffData {
    fn default() -> Self {
        Self {
            diffusion: 1e-10,
            velocity: [1.0, -0.5],
            reaction: 1.0,
            inflow: InflowProfile::Pulsating,
        }
    }
}

/// Which kind of condition a boundary edge carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Edge {
    Dirichlet,
    Outflow,
}

// left (x = 0), right (x = 1), bottom (y = 0), top (y = 1)
const EDGES: [Edge; 4] = [Edge::Dirichlet, Edge::Outflow, Edge::Outflow, Edge::Dirichlet];

#[derive(Clone, Copy)]
struct BoundaryFace {
    cell: usize,
    edge: usize,
    /// Face midpoint coordinate along the edge.
    along: f64,
    area: f64,
    /// Normal distance from the cell centre to the face.
    dist: f64,
    /// `b · n` with `n` the outward normal.
    bn: f64,
}

/// Linear semi-discrete system `h_x h_y u' + K u − b(t) = 0`.
pub struct ConvDiff {
    pub grid: StructuredGrid,
    pub data: ConvDiffData,
    mass: CsrMatrix,
    stiffness: CsrMatrix,
    faces: Vec<BoundaryFace>,
}

impl ConvDiff {
    pub fn new(nx: usize, ny: usize, data: ConvDiffData) -> Result<Self> {
        let grid = StructuredGrid::unit_square(nx, ny)?;
        if !(data.diffusion >= 0.0) || !data.reaction.is_finite() || data.velocity.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid convection-diffusion data {data:?}")));
        }
        let (hx, hy) = (grid.hx(), grid.hy());
        let vol = hx * hy;
        let [bx, by] = data.velocity;
        let a = data.diffusion;
        let mut trip = Vec::with_capacity(5 * grid.n_cells());
        let mut faces = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let p = grid.cell(i, j);
                trip.push((p, p, data.reaction * vol));
                // (neighbour or boundary edge, outward b·n, face area, centre distance)
                let sides = [
                    (if i > 0 { Ok(grid.cell(i - 1, j)) } else { Err(0) }, -bx, hy, hx),
                    (if i + 1 < nx { Ok(grid.cell(i + 1, j)) } else { Err(1) }, bx, hy, hx),
                    (if j > 0 { Ok(grid.cell(i, j - 1)) } else { Err(2) }, -by, hx, hy),
                    (if j + 1 < ny { Ok(grid.cell(i, j + 1)) } else { Err(3) }, by, hx, hy),
                ];
                let (xc, yc) = grid.cell_center(i, j);
                for (nb, bn, area, dist) in sides {
                    match nb {
                        Ok(q) => {
                            let d = a * area / dist;
                            trip.push((p, p, d + bn.max(0.0) * area));
                            trip.push((p, q, -d + bn.min(0.0) * area));
                        }
                        Err(edge) => {
                            let along = if edge < 2 { yc } else { xc };
                            let face = BoundaryFace {
                                cell: p,
                                edge,
                                along,
                                area,
                                dist: dist / 2.0,
                                bn,
                            };
                            match EDGES[edge] {
                                Edge::Dirichlet => {
                                    trip.push((p, p, a * area / face.dist + bn.max(0.0) * area));
                                }
                                Edge::Outflow => trip.push((p, p, bn.max(0.0) * area)),
                            }
                            faces.push(face);
                        }
                    }
                }
            }
        }
        let n = grid.n_cells();
        let stiffness = CsrMatrix::from_triplets(n, n, &trip)?;
        let mass = CsrMatrix::from_diagonal(&vec![vol; n]);
        Ok(Self {
            grid,
            data,
            mass,
            stiffness,
            faces,
        })
    }

    /// Standard benchmark coefficients.
    pub fn benchmark(nx: usize, ny: usize) -> Result<Self> {
        Self::new(nx, ny, ConvDiffData::default())
    }

    /// Dirichlet value on edge `edge` at coordinate `along`.
    fn dirichlet(&self, t: f64, edge: usize, along: f64) -> f64 {
        match (self.data.inflow, edge) {
            (InflowProfile::Pulsating, 0) => {
                let g = (2.0 * t).sin().abs();
                if along > 0.25 && along < 0.75 + 0.25 * g {
                    g
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    pub fn stiffness_matrix(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// Net outward flux `∮ (−a∇u + b u)·n` through the boundary for state `u` at time `t`.
    pub fn boundary_flux(&self, t: f64, u: &[f64]) -> f64 {
        let a = self.data.diffusion;
        self.faces
            .iter()
            .map(|f| {
                let up = u[f.cell];
                match EDGES[f.edge] {
                    Edge::Dirichlet => {
                        let g = self.dirichlet(t, f.edge, f.along);
                        let conv = if f.bn > 0.0 { f.bn * up } else { f.bn * g };
                        (conv - a * (g - up) / f.dist) * f.area
                    }
                    Edge::Outflow => f.bn.max(0.0) * up * f.area,
                }
            })
            .sum()
    }
}

impl ProblemOps for ConvDiff {
    fn size(&self) -> usize {
        self.grid.n_cells()
    }

    fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    fn stiffness(&self, _t: f64, _y: &[f64]) -> CsrMatrix {
        self.stiffness.clone()
    }

    fn rhs(&self, t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let a = self.data.diffusion;
        for f in &self.faces {
            if EDGES[f.edge] != Edge::Dirichlet {
                continue;
            }
            let g = self.dirichlet(t, f.edge, f.along);
            if g != 0.0 {
                out[f.cell] += (a / f.dist - f.bn.min(0.0)) * f.area * g;
            }
        }
    }

    fn apply_f(&self, t: f64, y: &[f64], out: &mut [f64]) {
        self.stiffness.spmv_into(y, out).expect("state length matches grid");
        let mut b = vec![0.0; out.len()];
        self.rhs(t, &mut b);
        out.iter_mut().zip(&b).for_each(|(o, bi)| *o -= bi);
    }

    fn is_linear(&self) -> bool {
        true
    }

    fn initial_state(&self) -> Vec<f64> {
        vec![0.0; self.size()]
    }

    fn apply_f_block(&self, times: &[f64], y: &BlockVector) -> BlockVector {
        let mut out = self.stiffness.spbop(y).expect("block rows match grid");
        let mut b = vec![0.0; y.n_rows()];
        for (c, &t) in times.iter().enumerate() {
            self.rhs(t, &mut b);
            for (i, bi) in b.iter().enumerate() {
                if *bi != 0.0 {
                    let v = out.get(i, c) - bi;
                    out.set(i, c, v);
                }
            }
        }
        out
    }
}
