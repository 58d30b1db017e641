//! Sparse matrices, block vectors and small dense helpers.

mod block;
mod csr;
mod dense;
pub mod io;

pub use block::{axpy_block, dot_columns, norm_columns, stage_couple, BlockVector};
pub use csr::CsrMatrix;
pub use dense::{dense_lu_solve, PivotedCholesky, PivotedSolve, SmallDense};
