use std::time::Instant;

use crate::error::Result;
use crate::krylov::{block_solve, make_preconditioner, KrylovReport, Preconditioner, PreconditionerKind, SolveSettings, SolverKind};
use crate::sparse::{BlockVector, CsrMatrix};

/// Linear solver for `J X = R` that eliminates Dirichlet-constrained unknowns
/// symmetrically: constrained rows and columns are split off, their values
/// follow from the diagonal, and the couplings are lifted to the right-hand
/// side so the remaining operator keeps the symmetry of `J`.
pub struct StageSolver {
    operator: CsrMatrix,
    /// Entries of `J` in free rows and constrained columns.
    coupling: Option<CsrMatrix>,
    constrained: Vec<usize>,
    constrained_diag: Vec<f64>,
    prec: Box<dyn Preconditioner>,
    kind: SolverKind,
    settings: SolveSettings,
}

impl StageSolver {
    pub fn new(
        j: CsrMatrix,
        constrained: &[usize],
        kind: SolverKind,
        prec: PreconditionerKind,
        settings: SolveSettings,
    ) -> Result<Self> {
        let (operator, coupling, constrained_diag) = if constrained.is_empty() {
            (j, None, Vec::new())
        } else {
            let mut is_c = vec![false; j.n_rows()];
            constrained.iter().for_each(|&i| is_c[i] = true);
            let mut keep = Vec::with_capacity(j.nnz());
            let mut lift = Vec::new();
            for i in 0..j.n_rows() {
                let (cols, vals) = j.row(i);
                for (&c, &v) in cols.iter().zip(vals) {
                    if i == c || (!is_c[i] && !is_c[c]) {
                        keep.push((i, c, v));
                    } else if !is_c[i] {
                        lift.push((i, c, v));
                    }
                }
            }
            let diag = constrained.iter().map(|&i| j.get(i, i)).collect();
            (
                CsrMatrix::from_triplets(j.n_rows(), j.n_cols(), &keep)?,
                Some(CsrMatrix::from_triplets(j.n_rows(), j.n_cols(), &lift)?),
                diag,
            )
        };
        let prec = make_preconditioner(prec, &operator)?;
        Ok(Self {
            operator,
            coupling,
            constrained: constrained.to_vec(),
            constrained_diag,
            prec,
            kind,
            settings,
        })
    }

    pub fn setup_time(&self) -> f64 {
        self.prec.setup_time()
    }

    pub fn operator(&self) -> &CsrMatrix {
        &self.operator
    }

    pub fn solve(&self, rhs: &BlockVector, x0: &BlockVector) -> Result<(BlockVector, KrylovReport)> {
        let Some(coupling) = &self.coupling else {
            return block_solve(self.kind, &self.operator, rhs, x0, self.prec.as_ref(), &self.settings);
        };
        let start = Instant::now();
        let k = rhs.width();
        let mut fixed = BlockVector::zeros(rhs.n_rows(), k);
        let mut x_start = x0.clone();
        for (&i, &d) in self.constrained.iter().zip(&self.constrained_diag) {
            for c in 0..k {
                let v = rhs.get(i, c) / d;
                fixed.set(i, c, v);
                x_start.set(i, c, v);
            }
        }
        let mut lifted = rhs.clone();
        lifted.axpy(-1.0, &coupling.spbop(&fixed)?)?;
        let (x, mut report) = block_solve(self.kind, &self.operator, &lifted, &x_start, self.prec.as_ref(), &self.settings)?;
        report.solve_time = start.elapsed().as_secs_f64();
        Ok((x, report))
    }
}
