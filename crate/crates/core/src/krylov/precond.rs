//! Column-wise preconditioners sharing one setup across all right-hand sides.

use std::time::Instant;

use crate::error::{mismatch, Error, Result};
use crate::sparse::{BlockVector, CsrMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PreconditionerKind {
    Identity,
    Jacobi,
    Ssor(f64),
    Ilu0,
}

impl std::str::FromStr for PreconditionerKind {
    type Err = Error;

    /// Accepts `none`, `identity`, `jacobi`, `ilu0`, `ssor` and `ssor(<omega>)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "none" | "identity" => return Ok(Self::Identity),
            "jacobi" => return Ok(Self::Jacobi),
            "ilu0" | "ilu" => return Ok(Self::Ilu0),
            "ssor" => return Ok(Self::Ssor(1.0)),
            _ => {}
        }
        if let Some(inner) = t.strip_prefix("ssor(").and_then(|r| r.strip_suffix(')')) {
            let w: f64 = inner
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad ssor relaxation '{inner}'")))?;
            if !(w > 0.0 && w < 2.0) {
                return Err(Error::Config(format!("ssor relaxation must lie in (0, 2), got {w}")));
            }
            return Ok(Self::Ssor(w));
        }
        Err(Error::Config(format!("unknown preconditioner '{s}'")))
    }
}

impl std::fmt::Display for PreconditionerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Identity => f.write_str("none"),
            Self::Jacobi => f.write_str("jacobi"),
            Self::Ssor(w) => write!(f, "ssor({w})"),
            Self::Ilu0 => f.write_str("ilu0"),
        }
    }
}

/// Approximate inverse applied identically to every column.
pub trait Preconditioner {
    /// Writes `P⁻¹ r` into `out` (same shape as `r`).
    fn apply_into(&self, r: &BlockVector, out: &mut BlockVector);

    fn apply(&self, r: &BlockVector) -> BlockVector {
        let mut out = BlockVector::zeros(r.n_rows(), r.width());
        self.apply_into(r, &mut out);
        out
    }

    /// Seconds spent in setup.
    fn setup_time(&self) -> f64;
}

pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply_into(&self, r: &BlockVector, out: &mut BlockVector) {
        out.as_mut_slice().copy_from_slice(r.as_slice());
    }

    fn setup_time(&self) -> f64 {
        0.0
    }
}

fn checked_diagonal(a: &CsrMatrix) -> Result<Vec<f64>> {
    if a.n_rows() != a.n_cols() {
        return Err(mismatch("preconditioner (square matrix)", a.n_rows(), a.n_cols()));
    }
    let d = a.diagonal();
    if let Some(row) = d.iter().position(|&v| v == 0.0 || !v.is_finite()) {
        return Err(Error::ZeroDiagonal { row });
    }
    Ok(d)
}

pub struct Jacobi {
    inv_diag: Vec<f64>,
    setup: f64,
}

impl Jacobi {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let t = Instant::now();
        let inv_diag = checked_diagonal(a)?.iter().map(|d| 1.0 / d).collect();
        Ok(Self {
            inv_diag,
            setup: t.elapsed().as_secs_f64(),
        })
    }
}

impl Preconditioner for Jacobi {
    fn apply_into(&self, r: &BlockVector, out: &mut BlockVector) {
        for (i, &d) in self.inv_diag.iter().enumerate() {
            for (o, &v) in out.row_mut(i).iter_mut().zip(r.row(i)) {
                *o = d * v;
            }
        }
    }

    fn setup_time(&self) -> f64 {
        self.setup
    }
}

/// One forward and one backward relaxed Gauss-Seidel sweep starting from zero.
pub struct Ssor {
    a: CsrMatrix,
    diag: Vec<f64>,
    omega: f64,
    setup: f64,
}

impl Ssor {
    pub fn new(a: &CsrMatrix, omega: f64) -> Result<Self> {
        let t = Instant::now();
        if !(omega > 0.0 && omega < 2.0) {
            return Err(Error::InvalidInput(format!("ssor relaxation must lie in (0, 2), got {omega}")));
        }
        let diag = checked_diagonal(a)?;
        Ok(Self {
            a: a.clone(),
            diag,
            omega,
            setup: t.elapsed().as_secs_f64(),
        })
    }
}

impl Preconditioner for Ssor {
    fn apply_into(&self, r: &BlockVector, out: &mut BlockVector) {
        let k = r.width();
        let n = self.a.n_rows();
        out.fill(0.0);
        let mut acc = vec![0.0; k];
        let x = out.as_mut_slice();
        let mut sweep = |i: usize, x: &mut [f64]| {
            acc.copy_from_slice(r.row(i));
            let (cols, vals) = self.a.row(i);
            for (&j, &a) in cols.iter().zip(vals) {
                for c in 0..k {
                    acc[c] -= a * x[j * k + c];
                }
            }
            let f = self.omega / self.diag[i];
            for c in 0..k {
                x[i * k + c] += f * acc[c];
            }
        };
        for i in 0..n {
            sweep(i, x);
        }
        for i in (0..n).rev() {
            sweep(i, x);
        }
    }

    fn setup_time(&self) -> f64 {
        self.setup
    }
}

/// Incomplete LU factorization restricted to the sparsity pattern of `A`.
pub struct Ilu0 {
    lu: CsrMatrix,
    diag_pos: Vec<usize>,
    setup: f64,
}

impl Ilu0 {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let t = Instant::now();
        checked_diagonal(a)?;
        let n = a.n_rows();
        let mut lu = a.clone();
        let diag_pos: Vec<usize> = (0..n).map(|i| lu.position(i, i).expect("diagonal present")).collect();
        let offsets = lu.row_offsets().to_vec();
        let cols = lu.col_indices().to_vec();
        // column -> position in the current row, usize::MAX when absent
        let mut where_ = vec![usize::MAX; n];
        let vals = lu.values_mut();
        for i in 0..n {
            let (s, e) = (offsets[i], offsets[i + 1]);
            for p in s..e {
                where_[cols[p]] = p;
            }
            for p in s..e {
                let kcol = cols[p];
                if kcol >= i {
                    break;
                }
                let pivot = vals[diag_pos[kcol]];
                if pivot == 0.0 {
                    return Err(Error::ZeroPivot { row: kcol });
                }
                let l = vals[p] / pivot;
                vals[p] = l;
                for q in diag_pos[kcol] + 1..offsets[kcol + 1] {
                    let w = where_[cols[q]];
                    if w != usize::MAX {
                        vals[w] -= l * vals[q];
                    }
                }
            }
            for p in s..e {
                where_[cols[p]] = usize::MAX;
            }
            if vals[diag_pos[i]] == 0.0 || !vals[diag_pos[i]].is_finite() {
                return Err(Error::ZeroPivot { row: i });
            }
        }
        Ok(Self {
            lu,
            diag_pos,
            setup: t.elapsed().as_secs_f64(),
        })
    }
}

impl Preconditioner for Ilu0 {
    fn apply_into(&self, r: &BlockVector, out: &mut BlockVector) {
        let k = r.width();
        let n = self.lu.n_rows();
        let off = self.lu.row_offsets();
        let cols = self.lu.col_indices();
        let vals = self.lu.values();
        out.as_mut_slice().copy_from_slice(r.as_slice());
        let x = out.as_mut_slice();
        for i in 0..n {
            for p in off[i]..self.diag_pos[i] {
                let (j, l) = (cols[p], vals[p]);
                for c in 0..k {
                    x[i * k + c] -= l * x[j * k + c];
                }
            }
        }
        for i in (0..n).rev() {
            for p in self.diag_pos[i] + 1..off[i + 1] {
                let (j, u) = (cols[p], vals[p]);
                for c in 0..k {
                    x[i * k + c] -= u * x[j * k + c];
                }
            }
            let d = vals[self.diag_pos[i]];
            for c in 0..k {
                x[i * k + c] /= d;
            }
        }
    }

    fn setup_time(&self) -> f64 {
        self.setup
    }
}

pub fn make_preconditioner(kind: PreconditionerKind, a: &CsrMatrix) -> Result<Box<dyn Preconditioner>> {
    Ok(match kind {
        PreconditionerKind::Identity => Box::new(IdentityPreconditioner),
        PreconditionerKind::Jacobi => Box::new(Jacobi::new(a)?),
        PreconditionerKind::Ssor(w) => Box::new(Ssor::new(a, w)?),
        PreconditionerKind::Ilu0 => Box::new(Ilu0::new(a)?),
    })
}
