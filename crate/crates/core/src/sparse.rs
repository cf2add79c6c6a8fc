//! Binary parity-check matrices in dual adjacency form.
//!
//! Rows and columns are both stored in compressed form so that `M(j)` (the
//! columns of row `j`) and `N(i)` (the rows of column `i`) are contiguous
//! sorted slices.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Construction parameters a lifted matrix was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub termination: usize,
    pub memory: usize,
    pub base_rows: usize,
    pub base_cols: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct SparseParityCheck {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    col_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    lifting: usize,
    provenance: Option<Provenance>,
}

impl SparseParityCheck {
    /// Builds a matrix from per-row column lists. Lists are sorted; duplicate
    /// or out-of-range column indices are rejected.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let n_rows = rows.len();
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut row_idx = Vec::new();
        let mut col_deg = vec![0usize; n_cols];
        row_ptr.push(0);
        for (j, mut row) in rows.into_iter().enumerate() {
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidParameter(format!(
                        "row {j} lists column {} twice",
                        w[0]
                    )));
                }
            }
            if let Some(&last) = row.last() {
                if last >= n_cols {
                    return Err(Error::InvalidParameter(format!(
                        "row {j} references column {last} but the matrix has {n_cols} columns"
                    )));
                }
            }
            for &i in &row {
                col_deg[i] += 1;
            }
            row_idx.extend(row);
            row_ptr.push(row_idx.len());
        }

        let mut col_ptr = Vec::with_capacity(n_cols + 1);
        col_ptr.push(0);
        for d in &col_deg {
            col_ptr.push(col_ptr.last().unwrap() + d);
        }
        let mut fill = col_ptr[..n_cols].to_vec();
        let mut col_idx = vec![0usize; row_idx.len()];
        // Rows are visited in increasing order, so each column list comes out sorted.
        for j in 0..n_rows {
            for &i in &row_idx[row_ptr[j]..row_ptr[j + 1]] {
                col_idx[fill[i]] = j;
                fill[i] += 1;
            }
        }

        Ok(SparseParityCheck {
            n_rows,
            n_cols,
            row_ptr,
            row_idx,
            col_ptr,
            col_idx,
            lifting: 1,
            provenance: None,
        })
    }

    pub(crate) fn with_lifting(mut self, lifting: usize, provenance: Option<Provenance>) -> Self {
        self.lifting = lifting;
        self.provenance = provenance;
        self
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Sorted column indices of row `j`.
    #[inline]
    pub fn row(&self, j: usize) -> &[usize] {
        &self.row_idx[self.row_ptr[j]..self.row_ptr[j + 1]]
    }

    /// Sorted row indices of column `i`.
    #[inline]
    pub fn col(&self, i: usize) -> &[usize] {
        &self.col_idx[self.col_ptr[i]..self.col_ptr[i + 1]]
    }

    pub fn num_edges(&self) -> usize {
        self.row_idx.len()
    }

    pub fn lifting_size(&self) -> usize {
        self.lifting
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> + '_ {
        (0..self.n_rows).map(move |j| self.row(j))
    }

    pub fn cols(&self) -> impl Iterator<Item = &[usize]> + '_ {
        (0..self.n_cols).map(move |i| self.col(i))
    }

    /// Design rate `(n - m) / n`, ignoring any rank deficiency of the matrix.
    pub fn design_rate(&self) -> f64 {
        (self.n_cols as f64 - self.n_rows as f64) / self.n_cols as f64
    }

    /// Checks that the row and column views describe the same 0/1 matrix.
    pub fn is_transpose_consistent(&self) -> bool {
        let rows_ok = (0..self.n_rows)
            .all(|j| self.row(j).iter().all(|&i| self.col(i).binary_search(&j).is_ok()));
        let cols_ok = (0..self.n_cols)
            .all(|i| self.col(i).iter().all(|&j| self.row(j).binary_search(&i).is_ok()));
        rows_ok && cols_ok
    }

    /// Restriction of the matrix to a contiguous block of rows and columns.
    /// Entries of the selected rows that fall outside `cols` are dropped.
    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> SparseParityCheck {
        assert!(rows.end <= self.n_rows && cols.end <= self.n_cols);
        let local_rows = rows
            .map(|j| {
                self.row(j)
                    .iter()
                    .filter(|&&i| cols.contains(&i))
                    .map(|&i| i - cols.start)
                    .collect()
            })
            .collect();
        SparseParityCheck::from_rows(cols.len(), local_rows)
            .expect("restriction of a valid matrix is valid")
            .with_lifting(self.lifting, None)
    }

    /// Dense 0/1 copy, row-major. Intended for small matrices and tests.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut dense = vec![vec![0u8; self.n_cols]; self.n_rows];
        for (j, row) in self.rows().enumerate() {
            for &i in row {
                dense[j][i] = 1;
            }
        }
        dense
    }

    /// True when both matrices have the same dimensions and the same entries.
    pub fn same_adjacency(&self, other: &SparseParityCheck) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self.row_ptr == other.row_ptr
            && self.row_idx == other.row_idx
    }
}
