//! Performance model and microbenchmark for the sparse block product.

mod bench;
mod model;

pub use bench::{
    banded_matrix, median, run_bop_microbenchmark, simd_available, working_set_bytes, BenchConfig, BenchReport,
    BenchRow, BENCH_HEADER,
};
pub use model::{
    ai_spbop, ai_spmv, bop_counts, bop_counts_with, ecm_time, Binding, KernelCounts, Machine, TrafficModel,
};
