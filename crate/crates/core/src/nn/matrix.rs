use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use super::NnError;

/// Dense row-major `f64` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Checked constructor: `data.len()` must equal `rows * cols` and every
    /// value must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, NnError> {
        if data.len() != rows * cols {
            return Err(NnError::DataLength { rows, cols, len: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(NnError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: alloc::vec![0.0; rows * cols] }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self { rows, cols, data: alloc::vec![value; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds from equal-length rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self { rows: rows.len(), cols, data }
    }

    pub fn row_vector(values: &[f64]) -> Self {
        Self { rows: 1, cols: values.len(), data: values.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self · rhs`.
    ///
    /// Accumulates over the shared dimension in index order and skips zero
    /// left-hand entries. Skipping is exact (adding `0 · x` never changes a
    /// finite sum), so a sparse row gives bit-identical results.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix, NnError> {
        if self.cols != rhs.rows {
            return Err(NnError::shape("matmul", self.shape(), rhs.shape()));
        }
        let n = rhs.cols;
        let mut out = Matrix::zeros(self.rows, n);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · rhs`.
    pub fn transpose_matmul(&self, rhs: &Matrix) -> Result<Matrix, NnError> {
        if self.rows != rhs.rows {
            return Err(NnError::shape("transpose_matmul", self.shape(), rhs.shape()));
        }
        let n = rhs.cols;
        let mut out = Matrix::zeros(self.cols, n);
        for r in 0..self.rows {
            let rhs_row = rhs.row(r);
            for (i, &a) in self.row(r).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out.data[i * n..(i + 1) * n].iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · rhsᵀ`.
    pub fn matmul_transpose(&self, rhs: &Matrix) -> Result<Matrix, NnError> {
        if self.cols != rhs.cols {
            return Err(NnError::shape("matmul_transpose", self.shape(), rhs.shape()));
        }
        let mut out = Matrix::zeros(self.rows, rhs.rows);
        for i in 0..self.rows {
            let a = self.row(i);
            for j in 0..rhs.rows {
                out.data[i * rhs.rows + j] = a.iter().zip(rhs.row(j)).map(|(x, y)| x * y).sum();
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn add_assign(&mut self, rhs: &Matrix) -> Result<(), NnError> {
        if self.shape() != rhs.shape() {
            return Err(NnError::shape("add", self.shape(), rhs.shape()));
        }
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.data {
            *v *= factor;
        }
    }

    pub fn fill(&mut self, value: f64) {
        self.data.fill(value);
    }

    /// Column sums as a `1 × cols` matrix.
    pub fn column_sum(&self) -> Matrix {
        let mut out = Matrix::zeros(1, self.cols);
        for r in 0..self.rows {
            for (o, v) in out.data.iter_mut().zip(self.row(r)) {
                *o += v;
            }
        }
        out
    }

    /// Column means as a `1 × cols` matrix.
    pub fn column_mean(&self) -> Matrix {
        let mut out = self.column_sum();
        if self.rows > 0 {
            out.scale(1.0 / self.rows as f64);
        }
        out
    }

    /// Appends the columns of `rhs` to the right of `self`.
    pub fn hconcat(&self, rhs: &Matrix) -> Result<Matrix, NnError> {
        if self.rows != rhs.rows {
            return Err(NnError::shape("hconcat", self.shape(), rhs.shape()));
        }
        let cols = self.cols + rhs.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(rhs.row(r));
        }
        Ok(Matrix { rows: self.rows, cols, data })
    }

    /// Copy of columns `start..end`.
    pub fn columns(&self, start: usize, end: usize) -> Matrix {
        assert!(start <= end && end <= self.cols);
        let cols = end - start;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(&self.row(r)[start..end]);
        }
        Matrix { rows: self.rows, cols, data }
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constructor_checks() {
        assert!(Matrix::new(2, 2, vec![0.0; 3]).is_err());
        assert_eq!(Matrix::new(1, 1, vec![f64::NAN]), Err(NnError::NonFinite));
        assert!(Matrix::new(0, 3, vec![]).is_ok());
    }

    #[test]
    fn products_agree_with_transposes() {
        let a = Matrix::from_rows(&[[1.0, 2.0, 0.0], [-1.0, 0.5, 3.0]]);
        let b = Matrix::from_rows(&[[2.0, 1.0], [0.0, -1.0], [4.0, 0.25]]);
        let ab = a.matmul(&b).unwrap();
        assert_eq!(ab, Matrix::from_rows(&[[2.0, -1.0], [10.0, -0.75]]));
        assert_eq!(a.transpose().transpose_matmul(&b).unwrap(), ab);
        assert_eq!(a.matmul_transpose(&b.transpose()).unwrap(), ab);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn column_mean_and_concat() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 6.0]]);
        assert_eq!(a.column_mean(), Matrix::row_vector(&[2.0, 4.0]));
        let c = a.hconcat(&Matrix::from_rows(&[[9.0], [8.0]])).unwrap();
        assert_eq!(c.row(1), &[3.0, 6.0, 8.0]);
        assert_eq!(c.columns(1, 3), Matrix::from_rows(&[[2.0, 9.0], [6.0, 8.0]]));
    }
}
