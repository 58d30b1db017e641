use std::time::Instant;

use crate::error::Result;
use crate::krylov::cg::{check_shapes, true_residual, DROP_TOL};
use crate::krylov::{KrylovReport, Preconditioner, SolveSettings, SolveStatus};
use crate::sparse::{norm_columns, BlockVector, CsrMatrix};

/// Right-preconditioned block BiCGStab for general nonsingular `a`.
///
/// The k×k systems with `R̃ᵀAP̂` are solved with complete pivoting; columns
/// whose pivot falls below a relative 1e-13 are dropped from the update,
/// which covers duplicated right-hand sides.
pub fn block_bicgstab(
    a: &CsrMatrix,
    b: &BlockVector,
    x0: &BlockVector,
    prec: &dyn Preconditioner,
    settings: &SolveSettings,
) -> Result<(BlockVector, KrylovReport)> {
    settings.validate()?;
    check_shapes(a, b, x0, "block_bicgstab")?;
    let start = Instant::now();
    let mut x = x0.clone();
    let mut r = true_residual(a, b, &x)?;
    let initial = norm_columns(&r);
    let mut iterations = 0;
    let mut status = SolveStatus::MaxIterations;

    let first_live = |defects: &[f64]| defects.iter().position(|&d| d > 0.0).unwrap_or(0);

    'outer: loop {
        if settings.is_converged(&norm_columns(&r), &initial) {
            status = SolveStatus::Converged;
            break;
        }
        if iterations >= settings.max_iters {
            break;
        }
        let shadow = r.clone();
        let mut p = r.clone();
        let mut rho = shadow.gram(&r)?;
        loop {
            iterations += 1;
            let p_hat = prec.apply(&p);
            let v = a.spbop(&p_hat)?;
            let g = shadow.gram(&v)?;
            let sol = g.solve_pivoted(&rho, DROP_TOL)?;
            if sol.rank == 0 {
                status = SolveStatus::Breakdown {
                    column: first_live(&norm_columns(&r)),
                    reason: "shadow Gram matrix is singular".into(),
                };
                break 'outer;
            }
            let alpha = sol.solution;
            let mut s = r.clone();
            s.add_mul_small(&v, &alpha.scaled(-1.0))?;
            if settings.is_converged(&norm_columns(&s), &initial) {
                x.add_mul_small(&p_hat, &alpha)?;
                r = true_residual(a, b, &x)?;
                continue 'outer;
            }
            let s_hat = prec.apply(&s);
            let t = a.spbop(&s_hat)?;
            let tt = t.frobenius_dot(&t)?;
            let omega = if tt > 0.0 { t.frobenius_dot(&s)? / tt } else { 0.0 };
            if omega == 0.0 || !omega.is_finite() {
                x.add_mul_small(&p_hat, &alpha)?;
                status = SolveStatus::Breakdown {
                    column: first_live(&norm_columns(&s)),
                    reason: "stabilization parameter vanished".into(),
                };
                break 'outer;
            }
            x.add_mul_small(&p_hat, &alpha)?;
            x.axpy(omega, &s_hat)?;
            r = s;
            r.axpy(-omega, &t)?;
            if settings.is_converged(&norm_columns(&r), &initial) || iterations >= settings.max_iters {
                r = true_residual(a, b, &x)?;
                continue 'outer;
            }
            let rho_new = shadow.gram(&r)?;
            let beta = g.solve_pivoted(&rho_new, DROP_TOL)?.solution.scaled(1.0 / omega);
            rho = rho_new;
            // P = R + (P − ωV)β
            let mut pv = p;
            pv.axpy(-omega, &v)?;
            p = r.clone();
            p.add_mul_small(&pv, &beta)?;
        }
    }

    let final_defects = norm_columns(&true_residual(a, b, &x)?);
    let converged = status == SolveStatus::Converged;
    Ok((
        x,
        KrylovReport {
            iterations,
            converged,
            status,
            final_defects,
            initial_defects: initial,
            setup_time: prec.setup_time(),
            solve_time: start.elapsed().as_secs_f64(),
        },
    ))
}
