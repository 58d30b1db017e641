//! Compressed sparse row storage and the spMV / spBOP kernels.

use crate::error::{mismatch, Error, Result};
use crate::sparse::BlockVector;

/// Sparse matrix in compressed sparse row form.
///
/// Column indices are strictly increasing within every row. Stored zeros
/// are allowed (assembly patterns keep them).
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from raw CSR arrays, validating every structural invariant.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 {
            return Err(mismatch("CsrMatrix::new row_offsets", n_rows + 1, row_offsets.len()));
        }
        if row_offsets[0] != 0 {
            return Err(Error::InvalidInput("row_offsets[0] must be 0".into()));
        }
        let nnz = row_offsets[n_rows];
        if col_indices.len() != nnz || values.len() != nnz {
            return Err(mismatch("CsrMatrix::new nnz", nnz, col_indices.len().max(values.len())));
        }
        for i in 0..n_rows {
            let (s, e) = (row_offsets[i], row_offsets[i + 1]);
            if e < s {
                return Err(Error::InvalidInput(format!("row_offsets decreasing at row {i}")));
            }
            for p in s..e {
                if col_indices[p] >= n_cols {
                    return Err(Error::InvalidInput(format!(
                        "column index {} out of range in row {i}",
                        col_indices[p]
                    )));
                }
                if p > s && col_indices[p] <= col_indices[p - 1] {
                    return Err(Error::InvalidInput(format!(
                        "column indices not strictly increasing in row {i}"
                    )));
                }
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; n_rows + 1];
        for &(i, j, _) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::InvalidInput(format!(
                    "triplet ({i}, {j}) outside {n_rows}x{n_cols}"
                )));
            }
            counts[i + 1] += 1;
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        let mut next = counts.clone();
        for &(i, j, v) in triplets {
            cols[next[i]] = j;
            vals[next[i]] = v;
            next[i] += 1;
        }
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        row_offsets.push(0);
        let mut out_cols = Vec::with_capacity(triplets.len());
        let mut out_vals = Vec::with_capacity(triplets.len());
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for i in 0..n_rows {
            scratch.clear();
            scratch.extend((counts[i]..counts[i + 1]).map(|p| (cols[p], vals[p])));
            // stable sort keeps the summation order of duplicates deterministic
            scratch.sort_by_key(|&(j, _)| j);
            for &(j, v) in &scratch {
                match out_cols.last() {
                    Some(&last) if last == j && out_cols.len() > row_offsets[i] => {
                        *out_vals.last_mut().unwrap() += v;
                    }
                    _ => {
                        out_cols.push(j);
                        out_vals.push(v);
                    }
                }
            }
            row_offsets.push(out_cols.len());
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices: out_cols,
            values: out_vals,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Builds from a row-major dense array, skipping exact zeros.
    pub fn from_dense(n_rows: usize, n_cols: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n_rows * n_cols {
            return Err(mismatch("CsrMatrix::from_dense", n_rows * n_cols, dense.len()));
        }
        let mut trip = Vec::new();
        for i in 0..n_rows {
            for j in 0..n_cols {
                let v = dense[i * n_cols + j];
                if v != 0.0 {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n_rows, n_cols, &trip)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_rows * self.n_cols];
        for i in 0..self.n_rows {
            for p in self.row_offsets[i]..self.row_offsets[i + 1] {
                d[i * self.n_cols + self.col_indices[p]] += self.values[p];
            }
        }
        d
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of stored entries.
    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable access to the values; the sparsity pattern is fixed.
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    /// Storage position of entry `(i, j)` if it is in the pattern.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (cols, _) = self.row(i);
        cols.binary_search(&j).ok().map(|p| p + self.row_offsets[i])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.values[p])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `alpha · a + beta · b` over the union of both patterns.
    pub fn linear_combination(alpha: f64, a: &Self, beta: f64, b: &Self) -> Result<Self> {
        if a.n_rows != b.n_rows || a.n_cols != b.n_cols {
            return Err(mismatch(
                "CsrMatrix::linear_combination",
                format!("{}x{}", a.n_rows, a.n_cols),
                format!("{}x{}", b.n_rows, b.n_cols),
            ));
        }
        let mut row_offsets = Vec::with_capacity(a.n_rows + 1);
        row_offsets.push(0);
        let mut cols = Vec::with_capacity(a.nnz().max(b.nnz()));
        let mut vals = Vec::with_capacity(a.nnz().max(b.nnz()));
        for i in 0..a.n_rows {
            let (ca, va) = a.row(i);
            let (cb, vb) = b.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let ja = ca.get(p).copied().unwrap_or(usize::MAX);
                let jb = cb.get(q).copied().unwrap_or(usize::MAX);
                if ja == jb {
                    cols.push(ja);
                    vals.push(alpha * va[p] + beta * vb[q]);
                    p += 1;
                    q += 1;
                } else if ja < jb {
                    cols.push(ja);
                    vals.push(alpha * va[p]);
                    p += 1;
                } else {
                    cols.push(jb);
                    vals.push(beta * vb[q]);
                    q += 1;
                }
            }
            row_offsets.push(cols.len());
        }
        Ok(Self {
            n_rows: a.n_rows,
            n_cols: a.n_cols,
            row_offsets,
            col_indices: cols,
            values: vals,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut trip = Vec::with_capacity(self.nnz());
        for i in 0..self.n_rows {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                trip.push((j, i, a));
            }
        }
        Self::from_triplets(self.n_cols, self.n_rows, &trip).expect("transpose of a valid matrix")
    }

    /// Largest absolute entry-wise asymmetry `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.n_rows {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                m = m.max((a - self.get(j, i)).abs());
            }
        }
        m
    }

    /// Sparse matrix-vector product `y = A x` with left-to-right row accumulation.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n_rows];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.n_cols {
            return Err(mismatch("spmv (x length)", self.n_cols, x.len()));
        }
        if y.len() != self.n_rows {
            return Err(mismatch("spmv (y length)", self.n_rows, y.len()));
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut sum = 0.0;
            for (&j, &a) in cols.iter().zip(vals) {
                sum += a * x[j];
            }
            *yi = sum;
        }
        Ok(())
    }

    /// Sparse operator applied to a block vector, `Y = A X`.
    pub fn spbop(&self, x: &BlockVector) -> Result<BlockVector> {
        let mut y = BlockVector::zeros(self.n_rows, x.width());
        self.spbop_into(x, &mut y)?;
        Ok(y)
    }

    /// `Y = A X`; every matrix entry is loaded once and applied to the `k`
    /// adjacent entries of the corresponding block-vector row.
    pub fn spbop_into(&self, x: &BlockVector, y: &mut BlockVector) -> Result<()> {
        if x.n_rows() != self.n_cols {
            return Err(mismatch("spbop (X rows)", self.n_cols, x.n_rows()));
        }
        if y.n_rows() != self.n_rows || y.width() != x.width() {
            return Err(mismatch(
                "spbop (Y shape)",
                format!("{}x{}", self.n_rows, x.width()),
                format!("{}x{}", y.n_rows(), y.width()),
            ));
        }
        let xs = x.as_slice();
        let ys = y.as_mut_slice();
        match x.width() {
            0 => {}
            1 => self.spbop_fixed::<1>(xs, ys),
            2 => self.spbop_fixed::<2>(xs, ys),
            3 => self.spbop_fixed::<3>(xs, ys),
            4 => self.spbop_fixed::<4>(xs, ys),
            8 => self.spbop_fixed::<8>(xs, ys),
            16 => self.spbop_fixed::<16>(xs, ys),
            k => self.spbop_dyn(k, xs, ys),
        }
        Ok(())
    }

    fn spbop_fixed<const K: usize>(&self, x: &[f64], y: &mut [f64]) {
        for (yrow, i) in y.chunks_exact_mut(K).zip(0..self.n_rows) {
            let (cols, vals) = self.row(i);
            let mut acc = [0.0_f64; K];
            for (&j, &a) in cols.iter().zip(vals) {
                let xr: &[f64; K] = x[j * K..j * K + K].try_into().expect("block row");
                for c in 0..K {
                    acc[c] += a * xr[c];
                }
            }
            yrow.copy_from_slice(&acc);
        }
    }

    fn spbop_dyn(&self, k: usize, x: &[f64], y: &mut [f64]) {
        for (yrow, i) in y.chunks_exact_mut(k).zip(0..self.n_rows) {
            yrow.fill(0.0);
            let (cols, vals) = self.row(i);
            for (&j, &a) in cols.iter().zip(vals) {
                let xr = &x[j * k..j * k + k];
                for (acc, &xv) in yrow.iter_mut().zip(xr) {
                    *acc += a * xv;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_spmv() {
        let i3 = CsrMatrix::identity(3);
        assert_eq!(i3.spmv(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn one_by_one() {
        let a = CsrMatrix::from_diagonal(&[2.0]);
        assert_eq!(a.spmv(&[3.0]).unwrap(), vec![6.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let a = CsrMatrix::identity(3);
        assert!(matches!(a.spmv(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
        assert!(a.spbop(&BlockVector::zeros(2, 4)).is_err());
    }

    #[test]
    fn identity_spbop_keeps_block() {
        let x = BlockVector::from_row_major(3, 4, (0..12).map(|v| v as f64 * 0.5 - 1.0).collect()).unwrap();
        assert_eq!(CsrMatrix::identity(3).spbop(&x).unwrap(), x);
    }

    #[test]
    fn triplets_merge_duplicates() {
        let a = CsrMatrix::from_triplets(2, 2, &[(1, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0), (0, 0, 1.0)]).unwrap();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(1, 0), 4.0);
        assert_eq!(a.to_dense(), vec![1.0, 2.0, 4.0, 0.0]);
    }

    #[test]
    fn new_rejects_bad_structure() {
        assert!(CsrMatrix::new(2, 2, vec![0, 2, 1], vec![0, 1, 0], vec![1.0; 3]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 2], vec![1, 0], vec![1.0; 2]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![2], vec![1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![1, 1], vec![], vec![]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 2], vec![0, 1], vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn linear_combination_union_pattern() {
        let a = CsrMatrix::from_dense(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        let b = CsrMatrix::from_dense(2, 2, &[0.0, 3.0, 1.0, 1.0]).unwrap();
        let c = CsrMatrix::linear_combination(2.0, &a, -1.0, &b).unwrap();
        assert_eq!(c.to_dense(), vec![2.0, -3.0, -1.0, 3.0]);
    }
}
