//! Nonlinear diffusion-reaction with a moving sink, integrated with the
//! pipelined stage window at several widths.

use blockstep::harness::{simulate, ExperimentConfig};
use blockstep::Result;

fn main() -> Result<()> {
    let mut cfg = ExperimentConfig::parse_str(
        "problem = diffreact\nnx = 32\ntableau = crank_nicolson\ntau = 0.12\nn_steps = 20\n\
         inner_reduction = 1e-5\nouter_tolerance = 1e-8\nmax_outer = 50\nsolver = bicgstab\npreconditioner = ilu0\n",
    )?;
    let mut reference: Option<Vec<f64>> = None;
    for s in [1, 2, 4] {
        cfg.s = s;
        let o = simulate(&cfg)?;
        let per_step: Vec<usize> = o.stats.per_step.iter().map(|p| p.nl_iterations).collect();
        let diff = reference.as_ref().map_or(0.0, |r| {
            r.iter().zip(&o.final_state).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        });
        println!(
            "s = {s}: {} nonlinear, {} linear iterations, {:.2} s, max diff to s = 1: {diff:.1e}",
            o.stats.nl_iterations(),
            o.stats.ls_iterations(),
            o.wall_time
        );
        println!("  per step: {per_step:?}");
        reference.get_or_insert(o.final_state);
    }
    Ok(())
}
