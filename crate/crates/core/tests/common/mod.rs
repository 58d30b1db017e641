#![allow(dead_code)]

pub mod oracles;

use blockstep::sparse::{BlockVector, CsrMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 5-point Laplacian on an n×n interior grid (Dirichlet), unscaled.
pub fn laplacian_2d(n: usize) -> CsrMatrix {
    let idx = |i: usize, j: usize| i * n + j;
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            t.push((idx(i, j), idx(i, j), 4.0));
            if i > 0 {
                t.push((idx(i, j), idx(i - 1, j), -1.0));
            }
            if i + 1 < n {
                t.push((idx(i, j), idx(i + 1, j), -1.0));
            }
            if j > 0 {
                t.push((idx(i, j), idx(i, j - 1), -1.0));
            }
            if j + 1 < n {
                t.push((idx(i, j), idx(i, j + 1), -1.0));
            }
        }
    }
    CsrMatrix::from_triplets(n * n, n * n, &t).unwrap()
}

pub fn laplacian_1d(n: usize) -> CsrMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, 2.0));
        if i > 0 {
            t.push((i, i - 1, -1.0));
        }
        if i + 1 < n {
            t.push((i, i + 1, -1.0));
        }
    }
    CsrMatrix::from_triplets(n, n, &t).unwrap()
}

/// Upwind convection-diffusion on an n×n grid, velocity (1, −0.5).
pub fn upwind_convdiff(n: usize, eps: f64) -> CsrMatrix {
    let h = 1.0 / (n as f64 + 1.0);
    let (bx, by) = (1.0_f64, -0.5_f64);
    let idx = |i: usize, j: usize| i * n + j;
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let r = idx(i, j);
            let d = eps / (h * h);
            t.push((r, r, 4.0 * d + bx.abs() / h + by.abs() / h));
            // x-direction along j, upwind from the left for bx > 0
            if j > 0 {
                t.push((r, idx(i, j - 1), -d - bx.max(0.0) / h));
            }
            if j + 1 < n {
                t.push((r, idx(i, j + 1), -d + bx.min(0.0) / h));
            }
            if i > 0 {
                t.push((r, idx(i - 1, j), -d - by.max(0.0) / h));
            }
            if i + 1 < n {
                t.push((r, idx(i + 1, j), -d + by.min(0.0) / h));
            }
        }
    }
    CsrMatrix::from_triplets(n * n, n * n, &t).unwrap()
}

/// Random sparse matrix with roughly `per_row` entries per row.
pub fn random_csr(rng: &mut ChaCha8Rng, n_rows: usize, n_cols: usize, per_row: usize) -> CsrMatrix {
    let mut t = Vec::new();
    for i in 0..n_rows {
        for _ in 0..per_row {
            t.push((i, rng.gen_range(0..n_cols), rng.gen_range(-1.0..1.0)));
        }
    }
    CsrMatrix::from_triplets(n_rows, n_cols, &t).unwrap()
}

/// Random sparse SPD matrix: diagonally dominant symmetric.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, per_row: usize) -> CsrMatrix {
    let mut t = Vec::new();
    let mut rowsum = vec![0.0; n];
    for i in 0..n {
        for _ in 0..per_row {
            let j = rng.gen_range(0..n);
            if j == i {
                continue;
            }
            let v: f64 = rng.gen_range(-1.0..1.0);
            t.push((i, j, v));
            t.push((j, i, v));
            rowsum[i] += v.abs();
            rowsum[j] += v.abs();
        }
    }
    for (i, s) in rowsum.iter().enumerate() {
        t.push((i, i, s + rng.gen_range(0.1..1.0)));
    }
    CsrMatrix::from_triplets(n, n, &t).unwrap()
}

pub fn random_block(rng: &mut ChaCha8Rng, n: usize, k: usize) -> BlockVector {
    BlockVector::from_row_major(n, k, (0..n * k).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// Row-major dense copy built entry by entry from the CSR arrays.
pub fn dense(a: &CsrMatrix) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; a.n_cols()]; a.n_rows()];
    for i in 0..a.n_rows() {
        let (c, v) = a.row(i);
        for (&j, &x) in c.iter().zip(v) {
            d[i][j] += x;
        }
    }
    d
}

pub fn dense_matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
