//! Small dense matrices for stage-coupling coefficients and block Gram systems.

use crate::error::{mismatch, Error, Result};

/// Dense matrix of small size, stored column-major.
///
/// Used for the stage/time coupling matrices of a window and for the
/// k×k Gram matrices of the block Krylov solvers.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallDense {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

/// Outcome of a pivoted solve that may drop near-singular directions.
#[derive(Clone, Debug)]
pub struct PivotedSolve {
    pub solution: SmallDense,
    pub rank: usize,
    /// Unknowns that were set to zero because their pivot fell below tolerance.
    pub dropped: Vec<usize>,
}

/// Result of a diagonally pivoted Cholesky factorization `G[p,p] = CᵀC`.
#[derive(Clone, Debug)]
pub struct PivotedCholesky {
    /// Selected indices in pivot order; only the first `rank` are factored.
    pub pivots: Vec<usize>,
    pub rank: usize,
    /// Upper-triangular factor, `rank × rank`.
    pub factor: SmallDense,
}

impl SmallDense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from column-major values.
    pub fn from_col_major(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(mismatch("SmallDense::from_col_major", rows * cols, values.len()));
        }
        Ok(Self { rows, cols, values })
    }

    /// Builds from a slice of rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut out = Self::zeros(n, m);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != m {
                return Err(mismatch("SmallDense::from_rows", m, r.len()));
            }
            for (j, &v) in r.iter().enumerate() {
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.values[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.values[j * self.rows + i] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.values[j * self.rows + i] += v;
    }

    pub fn col_major(&self) -> &[f64] {
        &self.values
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(mismatch("SmallDense::matmul", self.cols, other.rows));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            for l in 0..self.cols {
                let b = other.get(l, j);
                if b == 0.0 {
                    continue;
                }
                for i in 0..self.rows {
                    out.add_to(i, j, self.get(i, l) * b);
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    /// `self - alpha * I`.
    pub fn minus_identity(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out.add_to(i, i, -alpha);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.cols).all(|j| (0..j.min(self.rows)).all(|i| self.get(i, j) == 0.0))
    }

    /// Solves `self · X = rhs` by Gaussian elimination with complete pivoting.
    ///
    /// Elimination stops once the largest remaining pivot drops below
    /// `rel_tol · max|self|`; the unknowns left over are set to zero and
    /// reported in `dropped`. A full-rank system is solved exactly.
    pub fn solve_pivoted(&self, rhs: &SmallDense, rel_tol: f64) -> Result<PivotedSolve> {
        let n = self.rows;
        if self.cols != n {
            return Err(mismatch("SmallDense::solve_pivoted (square)", n, self.cols));
        }
        if rhs.rows != n {
            return Err(mismatch("SmallDense::solve_pivoted (rhs rows)", n, rhs.rows));
        }
        let nrhs = rhs.cols;
        let mut a = self.clone();
        let mut b = rhs.clone();
        // column permutation: position -> unknown index
        let mut colperm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        let mut rank = 0;
        if scale > 0.0 && scale.is_finite() {
            for k in 0..n {
                let (mut pi, mut pj, mut pmax) = (k, k, 0.0_f64);
                for j in k..n {
                    for i in k..n {
                        let v = a.get(i, j).abs();
                        if v > pmax {
                            pmax = v;
                            pi = i;
                            pj = j;
                        }
                    }
                }
                if !(pmax > rel_tol * scale) {
                    break;
                }
                if pi != k {
                    for j in 0..n {
                        let t = a.get(k, j);
                        a.set(k, j, a.get(pi, j));
                        a.set(pi, j, t);
                    }
                    for j in 0..nrhs {
                        let t = b.get(k, j);
                        b.set(k, j, b.get(pi, j));
                        b.set(pi, j, t);
                    }
                }
                if pj != k {
                    for i in 0..n {
                        let t = a.get(i, k);
                        a.set(i, k, a.get(i, pj));
                        a.set(i, pj, t);
                    }
                    colperm.swap(k, pj);
                }
                let piv = a.get(k, k);
                for i in k + 1..n {
                    let l = a.get(i, k) / piv;
                    if l == 0.0 {
                        continue;
                    }
                    a.set(i, k, 0.0);
                    for j in k + 1..n {
                        a.add_to(i, j, -l * a.get(k, j));
                    }
                    for j in 0..nrhs {
                        b.add_to(i, j, -l * b.get(k, j));
                    }
                }
                rank += 1;
            }
        }
        let mut x = SmallDense::zeros(n, nrhs);
        for j in 0..nrhs {
            for k in (0..rank).rev() {
                let mut s = b.get(k, j);
                for l in k + 1..rank {
                    s -= a.get(k, l) * x.get(colperm[l], j);
                }
                x.set(colperm[k], j, s / a.get(k, k));
            }
        }
        let mut dropped: Vec<usize> = colperm[rank..].to_vec();
        dropped.sort_unstable();
        Ok(PivotedSolve {
            solution: x,
            rank,
            dropped,
        })
    }

    /// Cholesky factorization with diagonal pivoting of a symmetric positive
    /// semi-definite matrix. Stops when the largest remaining diagonal falls
    /// below `rel_tol · max diag`.
    pub fn pivoted_cholesky(&self, rel_tol: f64) -> Result<PivotedCholesky> {
        let n = self.rows;
        if self.cols != n {
            return Err(mismatch("SmallDense::pivoted_cholesky (square)", n, self.cols));
        }
        let mut a = self.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let scale = (0..n).fold(0.0_f64, |m, i| m.max(a.get(i, i)));
        let mut rank = 0;
        if scale > 0.0 && scale.is_finite() {
            for k in 0..n {
                let mut best = k;
                for i in k + 1..n {
                    if a.get(i, i) > a.get(best, best) {
                        best = i;
                    }
                }
                let d = a.get(best, best);
                if !(d > rel_tol * scale) {
                    break;
                }
                if best != k {
                    // symmetric swap of rows and columns k <-> best
                    for j in 0..n {
                        let t = a.get(k, j);
                        a.set(k, j, a.get(best, j));
                        a.set(best, j, t);
                    }
                    for i in 0..n {
                        let t = a.get(i, k);
                        a.set(i, k, a.get(i, best));
                        a.set(i, best, t);
                    }
                    piv.swap(k, best);
                }
                let r = a.get(k, k).sqrt();
                a.set(k, k, r);
                for j in k + 1..n {
                    let v = a.get(k, j) / r;
                    a.set(k, j, v);
                }
                for j in k + 1..n {
                    for i in k + 1..=j {
                        let v = a.get(i, j) - a.get(k, i) * a.get(k, j);
                        a.set(i, j, v);
                        a.set(j, i, v);
                    }
                }
                rank += 1;
            }
        }
        let mut factor = SmallDense::zeros(rank, rank);
        for j in 0..rank {
            for i in 0..=j {
                factor.set(i, j, a.get(i, j));
            }
        }
        Ok(PivotedCholesky {
            pivots: piv,
            rank,
            factor,
        })
    }
}

impl std::fmt::Display for SmallDense {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:>12.5e}", self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Solves a dense square system with partial pivoting; fails on an exactly
/// singular matrix. Row-major input, used for small direct solves.
pub fn dense_lu_solve(n: usize, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != n * n || b.len() != n {
        return Err(mismatch("dense_lu_solve", n * n, a.len()));
    }
    let mut a = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .unwrap_or(k);
        if a[p * n + k] == 0.0 {
            return Err(Error::InvalidInput(format!("singular matrix at column {k}")));
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        for i in k + 1..n {
            let l = a[i * n + k] / a[k * n + k];
            if l != 0.0 {
                for j in k..n {
                    a[i * n + j] -= l * a[k * n + j];
                }
                x[i] -= l * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= a[k * n + j] * x[j];
        }
        x[k] = s / a[k * n + k];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_full_rank_exact() {
        let a = SmallDense::from_rows(&[vec![4.0, 1.0], vec![2.0, 3.0]]).unwrap();
        let b = SmallDense::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        let s = a.solve_pivoted(&b, 1e-13).unwrap();
        assert_eq!(s.rank, 2);
        assert!((s.solution.get(0, 0) - 0.1).abs() < 1e-15);
        assert!((s.solution.get(1, 0) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn solve_drops_duplicate_direction() {
        let a = SmallDense::from_rows(&[vec![2.0, 2.0], vec![2.0, 2.0]]).unwrap();
        let b = SmallDense::from_rows(&[vec![4.0, 4.0], vec![4.0, 4.0]]).unwrap();
        let s = a.solve_pivoted(&b, 1e-13).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.dropped.len(), 1);
        // A·X reproduces rhs even though one unknown was dropped
        let ax = a.matmul(&s.solution).unwrap();
        assert!((ax.get(0, 0) - 4.0).abs() < 1e-14 && (ax.get(1, 1) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let a = SmallDense::zeros(3, 3);
        let s = a.solve_pivoted(&SmallDense::identity(3), 1e-13).unwrap();
        assert_eq!(s.rank, 0);
        assert_eq!(s.solution.max_abs(), 0.0);
    }

    #[test]
    fn pivoted_cholesky_reconstructs() {
        let g = SmallDense::from_rows(&[
            vec![4.0, 2.0, 0.4],
            vec![2.0, 5.0, 1.0],
            vec![0.4, 1.0, 3.0],
        ])
        .unwrap();
        let ch = g.pivoted_cholesky(1e-13).unwrap();
        assert_eq!(ch.rank, 3);
        let ctc = ch.factor.transpose().matmul(&ch.factor).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let gij = g.get(ch.pivots[i], ch.pivots[j]);
                assert!((ctc.get(i, j) - gij).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pivoted_cholesky_rank_deficient() {
        let g = SmallDense::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let ch = g.pivoted_cholesky(1e-13).unwrap();
        assert_eq!(ch.rank, 1);
    }

    #[test]
    fn dense_lu_matches_known() {
        let x = dense_lu_solve(2, &[0.0, 1.0, 1.0, 0.0], &[3.0, 5.0]).unwrap();
        assert_eq!(x, vec![5.0, 3.0]);
    }
}
