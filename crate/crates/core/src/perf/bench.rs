//! Timing of the block product against the model prediction.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perf::{bop_counts_with, ecm_time, Binding, Machine, TrafficModel};
use crate::sparse::{BlockVector, CsrMatrix};

pub const BENCH_HEADER: &str = "k,time_per_rhs_ns,model_time_per_rhs_ns,binding";

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub n_rows: usize,
    pub nnz_per_row: usize,
    pub k_values: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub machine: Machine,
    pub traffic: TrafficModel,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n_rows: 1 << 20,
            nnz_per_row: 7,
            k_values: vec![1, 2, 4, 8, 16],
            repetitions: 5,
            seed: 7,
            machine: Machine::reference(),
            traffic: TrafficModel::Ecm,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub k: usize,
    /// Median wall time of one product divided by `k`.
    pub time_per_rhs_ns: f64,
    pub model_time_per_rhs_ns: f64,
    pub binding: Binding,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub warnings: Vec<String>,
}

impl BenchReport {
    pub fn row(&self, k: usize) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.k == k)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(BENCH_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.4},{:.4},{}\n",
                r.k, r.time_per_rhs_ns, r.model_time_per_rhs_ns, r.binding
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(self.to_csv().as_bytes())?;
        w.flush()?;
        Ok(())
    }
}

/// Square banded matrix with exactly `nnz_per_row` entries per row
/// (columns wrap around), values drawn from a seeded generator.
pub fn banded_matrix(n: usize, nnz_per_row: usize, seed: u64) -> Result<CsrMatrix> {
    if n == 0 || nnz_per_row == 0 || nnz_per_row > n {
        return Err(Error::InvalidInput(format!(
            "banded matrix needs 1 <= nnz_per_row <= n, got n={n}, nnz_per_row={nnz_per_row}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = nnz_per_row / 2;
    let mut offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(n * nnz_per_row);
    let mut vals = Vec::with_capacity(n * nnz_per_row);
    offsets.push(0);
    let mut row = Vec::with_capacity(nnz_per_row);
    for i in 0..n {
        row.clear();
        row.extend((0..nnz_per_row).map(|d| (i + n - half + d) % n));
        row.sort_unstable();
        for &c in &row {
            cols.push(c);
            vals.push(rng.gen_range(-1.0..1.0));
        }
        offsets.push(cols.len());
    }
    CsrMatrix::new(n, n, offsets, cols, vals)
}

/// Block-vector bytes touched by one product with `k` right-hand sides.
pub fn working_set_bytes(n_rows: usize, k: usize) -> usize {
    2 * n_rows * k * std::mem::size_of::<f64>()
}

fn timer_resolution() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..50 {
        let t0 = Instant::now();
        let mut t1 = Instant::now();
        while t1 == t0 {
            t1 = Instant::now();
        }
        best = best.min(t1 - t0);
    }
    best
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Times `Y = A X` for every `k` and pairs the median per-right-hand-side
/// time with the model estimate for the configured machine.
pub fn run_bop_microbenchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.k_values.is_empty() || cfg.k_values.contains(&0) {
        return Err(Error::InvalidInput("k values must be non-empty and positive".into()));
    }
    if cfg.repetitions == 0 {
        return Err(Error::InvalidInput("need at least one repetition".into()));
    }
    cfg.machine.validate()?;
    let a = banded_matrix(cfg.n_rows, cfg.nnz_per_row, cfg.seed)?;
    let resolution = timer_resolution();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut rows = Vec::with_capacity(cfg.k_values.len());
    let mut warnings = Vec::new();
    for &k in &cfg.k_values {
        let data: Vec<f64> = (0..cfg.n_rows * k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = BlockVector::from_row_major(cfg.n_rows, k, data)?;
        let mut y = BlockVector::zeros(cfg.n_rows, k);
        a.spbop_into(&x, &mut y)?;
        let mut samples = Vec::with_capacity(cfg.repetitions);
        for _ in 0..cfg.repetitions {
            let t0 = Instant::now();
            a.spbop_into(&x, &mut y)?;
            let dt = t0.elapsed();
            std::hint::black_box(&y);
            if dt < resolution * 100 {
                warnings.push(format!(
                    "k={k}: {dt:?} per product is within 100x of the timer resolution {resolution:?}"
                ));
            }
            samples.push(dt.as_secs_f64());
        }
        let t = median(&mut samples);
        let counts = bop_counts_with(a.nnz(), k, cfg.traffic)?;
        let (model, binding) = ecm_time(&counts, &cfg.machine);
        rows.push(BenchRow {
            k,
            time_per_rhs_ns: t * 1e9 / k as f64,
            model_time_per_rhs_ns: model * 1e9 / k as f64,
            binding,
        });
    }
    warnings.dedup();
    Ok(BenchReport { rows, warnings })
}

/// Whether the target has vector instructions the block kernels can use.
pub fn simd_available() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("sse2")
    }
    #[cfg(target_arch = "aarch64")]
    {
        std::arch::is_aarch64_feature_detected!("neon")
    }
    #[cfg(not(any(target_arch = "x86_64", target_arch = "aarch64")))]
    {
        false
    }
}
