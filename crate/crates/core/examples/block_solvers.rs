//! Several right-hand sides through one block Krylov solve.

use blockstep::krylov::{block_solve, make_preconditioner, ConvergenceMode, PreconditionerKind, SolveSettings, SolverKind};
use blockstep::sparse::{BlockVector, CsrMatrix};
use blockstep::Result;

/// Five-point operator on an `n × n` grid: `eps` diffusion plus upwinded
/// convection with velocity `(vx, 0)`.
fn operator(n: usize, eps: f64, vx: f64) -> Result<CsrMatrix> {
    let h = 1.0 / (n + 1) as f64;
    let d = eps / (h * h);
    let mut trip = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let r = i * n + j;
            trip.push((r, r, 4.0 * d + vx / h));
            if j > 0 {
                trip.push((r, r - 1, -d - vx / h));
            }
            if j + 1 < n {
                trip.push((r, r + 1, -d));
            }
            if i > 0 {
                trip.push((r, r - n, -d));
            }
            if i + 1 < n {
                trip.push((r, r + n, -d));
            }
        }
    }
    CsrMatrix::from_triplets(n * n, n * n, &trip)
}

fn main() -> Result<()> {
    let n = 48;
    let k = 4;
    let columns: Vec<Vec<f64>> = (0..k)
        .map(|c| (0..n * n).map(|i| ((i * (c + 1)) as f64 * 0.37).sin()).collect())
        .collect();
    let b = BlockVector::from_columns(&columns)?;
    let x0 = BlockVector::zeros(n * n, k);
    let settings = SolveSettings::new(1e-10, 2000, ConvergenceMode::AllColumns)?;

    for (label, a, solver) in [
        ("laplacian / block CG", operator(n, 1.0, 0.0)?, SolverKind::Cg),
        ("convection-diffusion / block BiCGStab", operator(n, 0.01, 1.0)?, SolverKind::BiCgStab),
    ] {
        println!("{label}");
        for kind in [PreconditionerKind::Identity, PreconditionerKind::Jacobi, PreconditionerKind::Ilu0] {
            let prec = make_preconditioner(kind, &a)?;
            let (_, rep) = block_solve(solver, &a, &b, &x0, prec.as_ref(), &settings)?;
            let worst = rep
                .final_defects
                .iter()
                .zip(&rep.initial_defects)
                .map(|(f, i)| f / i)
                .fold(0.0, f64::max);
            println!("  {kind:?}: {} iterations, worst reduction {worst:.2e}", rep.iterations);
        }
    }
    Ok(())
}
