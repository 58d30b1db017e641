//! Sweep over the number of steps per window for the convection-diffusion
//! benchmark. CSV output goes to a temporary directory unless a path is given.

use blockstep::harness::{summary_line, sweep, ExperimentConfig};
use blockstep::Result;

fn main() -> Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("blockstep_convdiff_sweep"), Into::into);
    let mut cfg = ExperimentConfig::parse_str(
        "problem = convdiff\nnx = 32\ntableau = crank_nicolson\ntau = 0.12\nn_steps = 20\n\
         outer_tolerance = 1e-8\nsolver = bicgstab\npreconditioner = ilu0\n",
    )?;
    cfg.out = out.clone();
    println!("{}", blockstep::harness::SUMMARY_HEADER);
    for (s, row) in sweep(&cfg, &[1, 2, 4, 8])? {
        match row {
            Ok(o) => println!("{}", summary_line(s, &o.stats)),
            Err(e) => println!("# s = {s} failed: {e}"),
        }
    }
    println!("# csv files in {}", out.display());
    Ok(())
}
