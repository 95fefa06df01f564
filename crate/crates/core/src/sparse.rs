//! Compressed sparse row matrices.
//!
//! The interaction data is a sparse user-item matrix with ~0.1-5% fill;
//! every model fit and every scoring pass walks it row-wise or
//! column-wise. A plain CSR layout with an explicit transpose covers
//! both access patterns without indirection.

use crate::error::{Error, Result};

/// Sparse matrix in compressed row form. Column indices are sorted and
/// unique within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets. Triplets may arrive in any
    /// order; duplicate coordinates are rejected.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(u32, u32, f64)>,
    ) -> Result<Self> {
        if n_cols > u32::MAX as usize {
            return Err(Error::InvalidInput(format!(
                "column count {n_cols} exceeds u32 index range"
            )));
        }
        for &(r, c, _) in &triplets {
            if r as usize >= n_rows || c as usize >= n_cols {
                return Err(Error::ShapeMismatch(format!(
                    "entry ({r}, {c}) out of bounds for {n_rows}x{n_cols} matrix"
                )));
            }
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        for w in triplets.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::InvalidInput(format!(
                    "duplicate entry at ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }

        let mut indptr = vec![0usize; n_rows + 1];
        for &(r, _, _) in &triplets {
            indptr[r as usize + 1] += 1;
        }
        for i in 0..n_rows {
            indptr[i + 1] += indptr[i];
        }
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        for (_, c, v) in triplets {
            indices.push(c);
            values.push(v);
        }
        Ok(Self { n_rows, n_cols, indptr, indices, values })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// Column indices and values of one row.
    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let lo = self.indptr[r];
        let hi = self.indptr[r + 1];
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        self.indptr[r + 1] - self.indptr[r]
    }

    /// Stored value at (r, c), or None when the coordinate is not stored.
    pub fn get(&self, r: usize, c: u32) -> Option<f64> {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).ok().map(|k| vals[k])
    }

    /// Number of stored entries per column.
    pub fn col_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_cols];
        for &c in &self.indices {
            counts[c as usize] += 1;
        }
        counts
    }

    /// Transposed copy, built with a counting sort over the entries.
    pub fn transpose(&self) -> CsrMatrix {
        let mut indptr = vec![0usize; self.n_cols + 1];
        for &c in &self.indices {
            indptr[c as usize + 1] += 1;
        }
        for i in 0..self.n_cols {
            indptr[i + 1] += indptr[i];
        }
        let mut cursor = indptr.clone();
        let mut indices = vec![0u32; self.nnz()];
        let mut values = vec![0f64; self.nnz()];
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let k = cursor[c as usize];
                indices[k] = r as u32;
                values[k] = v;
                cursor[c as usize] += 1;
            }
        }
        CsrMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            indptr,
            indices,
            values,
        }
    }

    /// Copy with every stored value replaced by 1.0.
    pub fn binarized(&self) -> CsrMatrix {
        CsrMatrix {
            values: vec![1.0; self.nnz()],
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            n_rows: self.n_rows,
            n_cols: self.n_cols,
        }
    }

    /// Raw CSR arrays: (indptr, indices, values).
    pub fn parts(&self) -> (&[usize], &[u32], &[f64]) {
        (&self.indptr, &self.indices, &self.values)
    }

    /// Rebuild from raw CSR arrays, validating the structural
    /// invariants (monotone indptr, in-bounds sorted unique columns).
    pub fn from_parts(
        n_rows: usize,
        n_cols: usize,
        indptr: Vec<usize>,
        indices: Vec<u32>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if indptr.len() != n_rows + 1
            || indptr.first() != Some(&0)
            || indptr.last() != Some(&indices.len())
            || indices.len() != values.len()
        {
            return Err(Error::ShapeMismatch("inconsistent CSR arrays".into()));
        }
        for w in indptr.windows(2) {
            if w[1] < w[0] {
                return Err(Error::ShapeMismatch("indptr must be monotone".into()));
            }
        }
        for r in 0..n_rows {
            let row = &indices[indptr[r]..indptr[r + 1]];
            if row.iter().any(|&c| c as usize >= n_cols) {
                return Err(Error::ShapeMismatch("column index out of bounds".into()));
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::ShapeMismatch(
                    "row columns must be sorted and unique".into(),
                ));
            }
        }
        Ok(Self { n_rows, n_cols, indptr, indices, values })
    }

    /// Iterate all stored entries as (row, col, value).
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32, f64)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }
}
