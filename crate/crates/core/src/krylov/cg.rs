use std::time::Instant;

use crate::error::{mismatch, Result};
use crate::krylov::{KrylovReport, Preconditioner, SolveSettings, SolveStatus};
use crate::sparse::{norm_columns, BlockVector, CsrMatrix, SmallDense};

/// Relative pivot below which a search direction is dropped.
pub(crate) const DROP_TOL: f64 = 1e-13;

pub(crate) fn check_shapes(a: &CsrMatrix, b: &BlockVector, x0: &BlockVector, op: &'static str) -> Result<()> {
    if a.n_rows() != a.n_cols() {
        return Err(mismatch(op, a.n_rows(), a.n_cols()));
    }
    if b.n_rows() != a.n_rows() {
        return Err(mismatch(op, a.n_rows(), b.n_rows()));
    }
    if !b.same_shape(x0) {
        return Err(mismatch(
            op,
            format!("{}x{}", b.n_rows(), b.width()),
            format!("{}x{}", x0.n_rows(), x0.width()),
        ));
    }
    Ok(())
}

pub(crate) fn true_residual(a: &CsrMatrix, b: &BlockVector, x: &BlockVector) -> Result<BlockVector> {
    let mut r = a.spbop(x)?;
    r.scale(-1.0);
    r.axpy(1.0, b)?;
    Ok(r)
}

/// A-orthonormal basis of the columns of `w`: returns `(P, AP)` where `P`
/// spans the numerically independent directions of `w` and `PᵀAP = I`.
fn orthonormalize(w: &BlockVector, aw: &BlockVector) -> Result<Option<(BlockVector, BlockVector)>> {
    let g = w.gram(aw)?;
    let k = g.rows();
    let scale: Vec<f64> = (0..k)
        .map(|i| {
            let d = g.get(i, i);
            if d > 0.0 && d.is_finite() {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut gs = SmallDense::zeros(k, k);
    for j in 0..k {
        for i in 0..k {
            // symmetrize against round-off in the Gram product
            let v = 0.5 * (g.get(i, j) + g.get(j, i));
            gs.set(i, j, scale[i] * v * scale[j]);
        }
    }
    let chol = gs.pivoted_cholesky(DROP_TOL)?;
    let r = chol.rank;
    if r == 0 {
        return Ok(None);
    }
    let sel = &chol.pivots[..r];
    // T = D_sel · C⁻¹ (upper-triangular inverse by back substitution)
    let c = &chol.factor;
    let mut t = SmallDense::zeros(r, r);
    for j in 0..r {
        for i in (0..=j).rev() {
            let mut s = if i == j { 1.0 } else { 0.0 };
            for l in i + 1..=j {
                s -= c.get(i, l) * t.get(l, j);
            }
            t.set(i, j, s / c.get(i, i));
        }
    }
    for i in 0..r {
        for j in 0..r {
            t.set(i, j, t.get(i, j) * scale[sel[i]]);
        }
    }
    let p = w.select_columns(sel).mul_small(&t)?;
    let ap = aw.select_columns(sel).mul_small(&t)?;
    Ok(Some((p, ap)))
}

/// Preconditioned block conjugate gradients for symmetric positive definite `a`.
///
/// Search directions are A-orthonormalized every iteration with a pivoted
/// Cholesky factorization of the k×k Gram matrix, so duplicated or converged
/// right-hand sides drop out instead of breaking the recurrence.
pub fn block_cg(
    a: &CsrMatrix,
    b: &BlockVector,
    x0: &BlockVector,
    prec: &dyn Preconditioner,
    settings: &SolveSettings,
) -> Result<(BlockVector, KrylovReport)> {
    settings.validate()?;
    check_shapes(a, b, x0, "block_cg")?;
    let start = Instant::now();
    let mut x = x0.clone();
    let mut r = true_residual(a, b, &x)?;
    let initial = norm_columns(&r);
    let mut iterations = 0;
    let mut status = SolveStatus::MaxIterations;

    'outer: loop {
        if settings.is_converged(&norm_columns(&r), &initial) {
            status = SolveStatus::Converged;
            break;
        }
        if iterations >= settings.max_iters {
            break;
        }
        let mut z = prec.apply(&r);
        let mut w = z.clone();
        loop {
            let aw = a.spbop(&w)?;
            iterations += 1;
            let Some((p, q)) = orthonormalize(&w, &aw)? else {
                let column = norm_columns(&r)
                    .iter()
                    .enumerate()
                    .filter(|(_, &d)| d > 0.0)
                    .map(|(c, _)| c)
                    .next()
                    .unwrap_or(0);
                status = SolveStatus::Breakdown {
                    column,
                    reason: "search block has rank zero".into(),
                };
                break 'outer;
            };
            let alpha = p.gram(&r)?;
            x.add_mul_small(&p, &alpha)?;
            r.add_mul_small(&q, &alpha.scaled(-1.0))?;
            if settings.is_converged(&norm_columns(&r), &initial) {
                // confirm with the true residual; restart the recurrence otherwise
                r = true_residual(a, b, &x)?;
                continue 'outer;
            }
            if iterations >= settings.max_iters {
                r = true_residual(a, b, &x)?;
                continue 'outer;
            }
            z = prec.apply(&r);
            let beta = q.gram(&z)?.scaled(-1.0);
            w = z.clone();
            w.add_mul_small(&p, &beta)?;
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
