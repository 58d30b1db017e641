//! Row-contiguous block vectors (N × k multi right-hand sides).

use crate::error::{mismatch, Result};
use crate::sparse::SmallDense;

/// An `N × k` block of vectors stored row-major: the `k` entries of a row
/// are adjacent in memory, which is the axis the block kernels vectorize over.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVector {
    n_rows: usize,
    width: usize,
    data: Vec<f64>,
}

impl BlockVector {
    pub fn zeros(n_rows: usize, width: usize) -> Self {
        Self {
            n_rows,
            width,
            data: vec![0.0; n_rows * width],
        }
    }

    pub fn from_row_major(n_rows: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_rows * width {
            return Err(mismatch("BlockVector::from_row_major", n_rows * width, data.len()));
        }
        Ok(Self { n_rows, width, data })
    }

    /// Stacks equally long columns side by side.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let width = columns.len();
        let n_rows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut out = Self::zeros(n_rows, width);
        for (c, col) in columns.iter().enumerate() {
            out.set_column(c, col.as_ref())?;
        }
        Ok(out)
    }

    /// `width` copies of one column.
    pub fn replicate(column: &[f64], width: usize) -> Self {
        let mut data = Vec::with_capacity(column.len() * width);
        for &v in column {
            data.extend(std::iter::repeat(v).take(width));
        }
        Self {
            n_rows: column.len(),
            width,
            data,
        }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Position of entry `(i, c)` in the flat storage. Layout probe: the
    /// entries of row `i` occupy `offset(i, 0) .. offset(i, 0) + width`.
    #[inline]
    pub fn offset(&self, i: usize, c: usize) -> usize {
        i * self.width + c
    }

    #[inline]
    pub fn get(&self, i: usize, c: usize) -> f64 {
        assert!(c < self.width);
        self.data[i * self.width + c]
    }

    #[inline]
    pub fn set(&mut self, i: usize, c: usize, v: f64) {
        assert!(c < self.width);
        self.data[i * self.width + c] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        assert!(c < self.width);
        self.data.iter().skip(c).step_by(self.width).copied().collect()
    }

    pub fn set_column(&mut self, c: usize, values: &[f64]) -> Result<()> {
        if values.len() != self.n_rows {
            return Err(mismatch("BlockVector::set_column", self.n_rows, values.len()));
        }
        assert!(c < self.width);
        let w = self.width;
        for (i, &v) in values.iter().enumerate() {
            self.data[i * w + c] = v;
        }
        Ok(())
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.width).map(|c| self.column(c)).collect()
    }

    /// Keeps the selected columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.n_rows, cols.len());
        for i in 0..self.n_rows {
            let src = self.row(i);
            let dst = out.row_mut(i);
            for (d, &c) in dst.iter_mut().zip(cols) {
                *d = src[c];
            }
        }
        out
    }

    pub fn fill(&mut self, v: f64) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.n_rows == other.n_rows && self.width == other.width
    }

    fn check_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(mismatch(
                op,
                format!("{}x{}", self.n_rows, self.width),
                format!("{}x{}", other.n_rows, other.width),
            ))
        }
    }

    /// `self += alpha · x`
    pub fn axpy(&mut self, alpha: f64, x: &Self) -> Result<()> {
        self.check_shape(x, "BlockVector::axpy")?;
        for (y, &v) in self.data.iter_mut().zip(&x.data) {
            *y += alpha * v;
        }
        Ok(())
    }

    /// `self *= alpha`
    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    /// Frobenius inner product over all entries.
    pub fn frobenius_dot(&self, other: &Self) -> Result<f64> {
        self.check_shape(other, "BlockVector::frobenius_dot")?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Block inner product `selfᵀ · other`, a `width × other.width` matrix.
    pub fn gram(&self, other: &Self) -> Result<SmallDense> {
        if self.n_rows != other.n_rows {
            return Err(mismatch("BlockVector::gram", self.n_rows, other.n_rows));
        }
        let (ka, kb) = (self.width, other.width);
        let mut acc = vec![0.0; ka * kb];
        for i in 0..self.n_rows {
            let a = self.row(i);
            let b = other.row(i);
            for (q, &bv) in b.iter().enumerate() {
                let col = &mut acc[q * ka..(q + 1) * ka];
                for (c, &av) in col.iter_mut().zip(a) {
                    *c += av * bv;
                }
            }
        }
        SmallDense::from_col_major(ka, kb, acc)
    }

    /// `self · c` with `c` of shape `width × r`.
    pub fn mul_small(&self, c: &SmallDense) -> Result<Self> {
        if c.rows() != self.width {
            return Err(mismatch("BlockVector::mul_small", self.width, c.rows()));
        }
        let r = c.cols();
        let mut out = Self::zeros(self.n_rows, r);
        for i in 0..self.n_rows {
            let src = self.row(i);
            let dst = out.row_mut(i);
            for (q, d) in dst.iter_mut().enumerate() {
                let mut s = 0.0;
                for (l, &v) in src.iter().enumerate() {
                    s += v * c.get(l, q);
                }
                *d = s;
            }
        }
        Ok(out)
    }

    /// `self += x · c` with `c` of shape `x.width × self.width`.
    pub fn add_mul_small(&mut self, x: &Self, c: &SmallDense) -> Result<()> {
        if x.n_rows != self.n_rows || c.rows() != x.width || c.cols() != self.width {
            return Err(mismatch(
                "BlockVector::add_mul_small",
                format!("{}x{} · {}x{}", x.n_rows, x.width, x.width, self.width),
                format!("{}x{} · {}x{}", x.n_rows, x.width, c.rows(), c.cols()),
            ));
        }
        for i in 0..self.n_rows {
            let src = x.row(i);
            let dst = &mut self.data[i * self.width..(i + 1) * self.width];
            for (q, d) in dst.iter_mut().enumerate() {
                let mut s = 0.0;
                for (l, &v) in src.iter().enumerate() {
                    s += v * c.get(l, q);
                }
                *d += s;
            }
        }
        Ok(())
    }

    /// Drops column 0, moves the others left and duplicates the last one.
    pub fn shift_left(&mut self) {
        let w = self.width;
        if w <= 1 {
            return;
        }
        for row in self.data.chunks_exact_mut(w) {
            row.copy_within(1.., 0);
            row[w - 1] = row[w - 2];
        }
    }

    /// Keeps the first `width` columns.
    pub fn truncate_columns(&mut self, width: usize) {
        if width >= self.width {
            return;
        }
        let cols: Vec<usize> = (0..width).collect();
        *self = self.select_columns(&cols);
    }
}

/// `y + alpha · x` as a new block vector.
pub fn axpy_block(alpha: f64, x: &BlockVector, y: &BlockVector) -> Result<BlockVector> {
    let mut out = y.clone();
    out.axpy(alpha, x)?;
    Ok(out)
}

/// Column-wise Euclidean inner products.
pub fn dot_columns(x: &BlockVector, y: &BlockVector) -> Result<Vec<f64>> {
    x.check_shape(y, "dot_columns")?;
    let mut out = vec![0.0; x.width];
    for i in 0..x.n_rows {
        for ((o, a), b) in out.iter_mut().zip(x.row(i)).zip(y.row(i)) {
            *o += a * b;
        }
    }
    Ok(out)
}

/// Column-wise Euclidean norms.
pub fn norm_columns(x: &BlockVector) -> Vec<f64> {
    let mut out = vec![0.0; x.width];
    for i in 0..x.n_rows {
        for (o, a) in out.iter_mut().zip(x.row(i)) {
            *o += a * a;
        }
    }
    out.iter_mut().for_each(|v| *v = v.sqrt());
    out
}

/// Stage coupling `Y · Cᵀ`: row `i` of the result is `(row i of Y) · Cᵀ`.
pub fn stage_couple(y: &BlockVector, c: &SmallDense) -> Result<BlockVector> {
    if c.cols() != y.width() {
        return Err(mismatch("stage_couple", y.width(), c.cols()));
    }
    y.mul_small(&c.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_row_contiguous() {
        let b = BlockVector::zeros(5, 4);
        for i in 0..5 {
            for c in 0..4 {
                assert_eq!(b.offset(i, c), b.offset(i, 0) + c);
            }
        }
    }

    #[test]
    fn shift_duplicates_last_column() {
        let mut b = BlockVector::from_columns(&[vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]]).unwrap();
        b.shift_left();
        assert_eq!(b.column(0), vec![2.0, 2.0]);
        assert_eq!(b.column(1), vec![3.0, 3.0]);
        assert_eq!(b.column(2), vec![3.0, 3.0]);
    }

    #[test]
    fn stage_couple_identity_and_permutation() {
        let y = BlockVector::from_row_major(1, 2, vec![1.0, 2.0]).unwrap();
        let id = SmallDense::identity(2);
        assert_eq!(stage_couple(&y, &id).unwrap(), y);
        let p = SmallDense::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(stage_couple(&y, &p).unwrap().row(0), &[2.0, 1.0]);
    }

    #[test]
    fn stage_couple_shape_error() {
        let y = BlockVector::zeros(3, 2);
        assert!(stage_couple(&y, &SmallDense::zeros(2, 3)).is_err());
    }

    #[test]
    fn norm_of_zero_block() {
        assert_eq!(norm_columns(&BlockVector::zeros(7, 3)), vec![0.0; 3]);
    }

    #[test]
    fn axpy_shape_error() {
        let x = BlockVector::zeros(3, 2);
        let y = BlockVector::zeros(3, 3);
        assert!(axpy_block(1.0, &x, &y).is_err());
        assert!(dot_columns(&x, &y).is_err());
    }
}
