//! Block Krylov solvers for `AX = B` with a shared preconditioner.

mod bicgstab;
mod cg;
mod precond;
mod settings;

pub use bicgstab::block_bicgstab;
pub use cg::block_cg;
pub use precond::{
    make_preconditioner, IdentityPreconditioner, Ilu0, Jacobi, Preconditioner, PreconditionerKind, Ssor,
};
pub use settings::{ConvergenceMode, KrylovReport, SolveSettings, SolveStatus, SolverKind};

use crate::error::Result;
use crate::sparse::{BlockVector, CsrMatrix};

/// Dispatches to the selected block solver.
pub fn block_solve(
    kind: SolverKind,
    a: &CsrMatrix,
    b: &BlockVector,
    x0: &BlockVector,
    prec: &dyn Preconditioner,
    settings: &SolveSettings,
) -> Result<(BlockVector, KrylovReport)> {
    match kind {
        SolverKind::Cg => block_cg(a, b, x0, prec, settings),
        SolverKind::BiCgStab => block_bicgstab(a, b, x0, prec, settings),
    }
}
