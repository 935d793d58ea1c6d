//! Matrix containers: the binary documents-keywords incidence matrix and a
//! small row-major dense matrix for similarities, transitions and the
//! smoothed mass.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Binary incidence matrix stored in both compressed row and compressed
/// column form. Rows are documents, columns are keywords.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    col_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl SparseBinaryMatrix {
    /// Builds the matrix from `(row, col)` positions of the ones.
    ///
    /// Indices must be in range and unique.
    pub fn from_entries(
        n_rows: usize,
        n_cols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n_rows];
        for (i, j) in entries {
            if i >= n_rows || j >= n_cols {
                return Err(Error::invalid(format!(
                    "entry ({i}, {j}) out of range for a {n_rows}x{n_cols} matrix"
                )));
            }
            rows[i].push(j);
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("duplicate entry ({i}, {})", w[0])));
            }
        }
        Ok(Self::from_sorted_rows(n_rows, n_cols, &rows))
    }

    fn from_sorted_rows(n_rows: usize, n_cols: usize, rows: &[Vec<usize>]) -> Self {
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut row_idx = Vec::new();
        row_ptr.push(0);
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n_cols];
        for (i, row) in rows.iter().enumerate() {
            row_idx.extend_from_slice(row);
            row_ptr.push(row_idx.len());
            for &j in row {
                cols[j].push(i);
            }
        }
        let mut col_ptr = Vec::with_capacity(n_cols + 1);
        let mut col_idx = Vec::with_capacity(row_idx.len());
        col_ptr.push(0);
        for col in &cols {
            col_idx.extend_from_slice(col);
            col_ptr.push(col_idx.len());
        }
        Self {
            n_rows,
            n_cols,
            row_ptr,
            row_idx,
            col_ptr,
            col_idx,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of ones.
    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Column indices of the ones in row `i`, ascending.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.row_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Row indices of the ones in column `j`, ascending.
    pub fn col(&self, j: usize) -> &[usize] {
        &self.col_idx[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.row(i).binary_search(&j).is_ok()
    }

    /// Number of keywords per document.
    pub fn row_sums(&self) -> Vec<usize> {
        self.row_ptr.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Number of documents per keyword.
    pub fn col_sums(&self) -> Vec<usize> {
        self.col_ptr.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Iterates `(row, col)` of every one in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_rows).flat_map(move |i| self.row(i).iter().map(move |&j| (i, j)))
    }

    pub fn empty_rows(&self) -> Vec<usize> {
        (0..self.n_rows).filter(|&i| self.row(i).is_empty()).collect()
    }

    pub fn empty_cols(&self) -> Vec<usize> {
        (0..self.n_cols).filter(|&j| self.col(j).is_empty()).collect()
    }

    /// Removes all-zero rows and columns, repeating until none are left.
    ///
    /// Returns the filtered matrix together with the original indices of the
    /// kept rows and columns.
    pub fn drop_empty(&self) -> (SparseBinaryMatrix, Vec<usize>, Vec<usize>) {
        let mut keep_rows: Vec<bool> = vec![true; self.n_rows];
        let mut keep_cols: Vec<bool> = vec![true; self.n_cols];
        loop {
            let mut changed = false;
            for i in 0..self.n_rows {
                if keep_rows[i] && !self.row(i).iter().any(|&j| keep_cols[j]) {
                    keep_rows[i] = false;
                    changed = true;
                }
            }
            for j in 0..self.n_cols {
                if keep_cols[j] && !self.col(j).iter().any(|&i| keep_rows[i]) {
                    keep_cols[j] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.select(&keep_rows, &keep_cols)
    }

    /// Restricts the matrix to the flagged rows and columns, renumbering them
    /// in ascending order.
    pub fn select(
        &self,
        keep_rows: &[bool],
        keep_cols: &[bool],
    ) -> (SparseBinaryMatrix, Vec<usize>, Vec<usize>) {
        let kept_rows: Vec<usize> = (0..self.n_rows).filter(|&i| keep_rows[i]).collect();
        let kept_cols: Vec<usize> = (0..self.n_cols).filter(|&j| keep_cols[j]).collect();
        let mut col_map = vec![usize::MAX; self.n_cols];
        for (new, &old) in kept_cols.iter().enumerate() {
            col_map[old] = new;
        }
        let rows: Vec<Vec<usize>> = kept_rows
            .iter()
            .map(|&i| {
                self.row(i)
                    .iter()
                    .filter(|&&j| keep_cols[j])
                    .map(|&j| col_map[j])
                    .collect()
            })
            .collect();
        let m = Self::from_sorted_rows(kept_rows.len(), kept_cols.len(), &rows);
        (m, kept_rows, kept_cols)
    }

    pub fn transpose(&self) -> SparseBinaryMatrix {
        let cols: Vec<Vec<usize>> = (0..self.n_cols).map(|j| self.col(j).to_vec()).collect();
        Self::from_sorted_rows(self.n_cols, self.n_rows, &cols)
    }

    pub fn to_dense<T: Scalar>(&self) -> DenseMatrix<T> {
        let mut out = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j) in self.entries() {
            out.set(i, j, T::one());
        }
        out
    }
}

/// Row-major dense matrix of finite, nonnegative reals.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    values: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            values: vec![T::zero(); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out.set(i, i, T::one());
        }
        out
    }

    /// Wraps row-major values, rejecting negative or non-finite entries.
    pub fn from_vec(n_rows: usize, n_cols: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != n_rows * n_cols {
            return Err(Error::invalid(format!(
                "{} values supplied for a {n_rows}x{n_cols} matrix",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::invalid(format!(
                "entry ({}, {}) is negative or not finite",
                pos / n_cols.max(1),
                pos % n_cols.max(1)
            )));
        }
        Ok(Self {
            n_rows,
            n_cols,
            values,
        })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::invalid("ragged rows"));
        }
        Self::from_vec(rows.len(), n_cols, rows.concat())
    }

    /// Caller guarantees the values are finite and nonnegative.
    pub(crate) fn from_vec_unchecked(n_rows: usize, n_cols: usize, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), n_rows * n_cols);
        Self {
            n_rows,
            n_cols,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.values[i * self.n_cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.n_rows).map(|i| self.row(i).iter().copied().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.n_cols];
        for i in 0..self.n_rows {
            for (s, &v) in sums.iter_mut().zip(self.row(i)) {
                *s += v;
            }
        }
        sums
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n_rows.min(self.n_cols) {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Multiplies every entry by `factor`, which must be nonnegative.
    pub fn scaled(&self, factor: T) -> Self {
        assert!(factor >= T::zero(), "scale factor must be nonnegative");
        Self::from_vec_unchecked(
            self.n_rows,
            self.n_cols,
            self.values.iter().map(|&v| v * factor).collect(),
        )
    }

    /// Converts to another scalar type.
    pub fn cast<U: Scalar>(&self) -> DenseMatrix<U> {
        DenseMatrix::from_vec_unchecked(
            self.n_rows,
            self.n_cols,
            self.values.iter().map(|v| U::lit(v.as_f64())).collect(),
        )
    }
}
