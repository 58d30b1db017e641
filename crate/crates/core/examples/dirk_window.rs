//! Stage coupling matrices of a window, and the all-at-once fixed-point
//! solve of several Crank-Nicolson steps of a 1D heat problem.

use blockstep::dirk::{build_window_matrices, fixed_point_run, ButcherTableau, EngineSettings, OuterTolerance};
use blockstep::krylov::{ConvergenceMode, PreconditionerKind, SolveSettings, SolverKind};
use blockstep::problems::ManufacturedHeat;
use blockstep::Result;

fn main() -> Result<()> {
    let tab = ButcherTableau::crank_nicolson();
    let tau = 0.12;
    let tsm = build_window_matrices(&tab, tau, 3)?;
    println!("A1 (tau = {tau}, 3 steps):\n{}", tsm.a1);
    println!("A2:\n{}", tsm.a2);
    println!("beta = {}\n", tsm.beta);

    let heat = ManufacturedHeat::new(63)?;
    let settings = EngineSettings {
        solver: SolverKind::Cg,
        preconditioner: PreconditionerKind::Jacobi,
        inner: SolveSettings::new(1e-12, 1000, ConvergenceMode::AllColumns)?,
        outer: OuterTolerance::absolute(1e-9),
        max_outer: 200,
    };
    let tau = 0.05;
    let steps = 20;
    let exact = heat.exact(tau * steps as f64);
    for s in [1, 2, 4] {
        let run = fixed_point_run(&heat, &tab, tau, steps, s, &heat.exact(0.0), &settings, false, None)?;
        let err = run
            .final_state
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "s = {s}: {} outer, {} inner iterations, error {err:.3e}",
            run.stats.nl_iterations(),
            run.stats.ls_iterations()
        );
    }
    Ok(())
}
