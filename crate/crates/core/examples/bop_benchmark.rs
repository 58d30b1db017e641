//! Measured block-product time per right-hand side next to the model
//! estimate. Pass the number of rows as the first argument.

use blockstep::perf::{ai_spbop, run_bop_microbenchmark, BenchConfig};
use blockstep::Result;

fn main() -> Result<()> {
    let n_rows = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1 << 18);
    let cfg = BenchConfig {
        n_rows,
        ..BenchConfig::default()
    };
    let report = run_bop_microbenchmark(&cfg)?;
    print!("{}", report.to_csv());
    let base = report.rows[0].time_per_rhs_ns;
    for row in &report.rows {
        println!(
            "# k = {:>2}: intensity {:.4}, measured speedup per rhs {:.2}",
            row.k,
            ai_spbop(row.k)?,
            base / row.time_per_rhs_ns
        );
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}
