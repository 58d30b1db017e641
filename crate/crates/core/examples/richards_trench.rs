//! Infiltration from a trench into silt loam with the L-scheme. Writes the
//! final pressure head and water content as a VTK file.

use blockstep::harness::{simulate, ExperimentConfig};
use blockstep::problems::{write_vtk, FieldLocation, Richards};
use blockstep::Result;

fn main() -> Result<()> {
    let (nx, nz) = (20, 30);
    let mut cfg = ExperimentConfig::parse_str(
        "problem = richards\ntableau = implicit_euler\ntau = 0.010416666666666666\nn_steps = 18\ns = 2\n\
         inner_reduction = 1e-6\nouter_tolerance = 1e-5\nouter_relative = 1e-5\nouter_combine = both\n\
         max_outer = 2000\nmax_inner = 2000\nsolver = cg\npreconditioner = ilu0\n",
    )?;
    cfg.nx = nx;
    cfg.ny = Some(nz);
    let o = simulate(&cfg)?;
    println!(
        "{} steps, {} L-scheme iterations, {} linear iterations",
        o.stats.per_step.len(),
        o.stats.nl_iterations(),
        o.stats.ls_iterations()
    );

    let problem = Richards::benchmark(nx, nz)?;
    let theta = problem.water_content(&o.final_state);
    let (lo, hi) = theta.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
    println!("water content in [{lo:.4}, {hi:.4}]");

    let path = std::env::temp_dir().join("richards_trench.vtk");
    write_vtk(
        &path,
        &problem.space.grid,
        FieldLocation::Vertices,
        &[("pressure_head", &o.final_state), ("water_content", &theta)],
    )?;
    println!("wrote {}", path.display());
    Ok(())
}
