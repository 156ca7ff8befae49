//! Compressed sparse row matrices for the large, sparse coefficient case.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from coordinate triplets. Duplicate coordinates are summed; the
    /// duplicates of one coordinate are added in a canonical (bitwise total)
    /// order so the result does not depend on the input permutation.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "triplet ({i}, {j}) out of bounds for {rows}x{cols}"
                )));
            }
            entries.push((i, j, v));
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));

        let mut row_offsets = vec![0usize; rows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut iter = entries.into_iter().peekable();
        while let Some((i, j, mut v)) = iter.next() {
            while let Some(&(i2, j2, v2)) = iter.peek() {
                if (i2, j2) == (i, j) {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            row_offsets[i + 1] += 1;
            col_indices.push(j);
            values.push(v);
        }
        for r in 0..rows {
            row_offsets[r + 1] += row_offsets[r];
        }
        Ok(Self {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Square tridiagonal Toeplitz matrix tridiag(sub, diag, sup).
    pub fn tridiagonal(n: usize, sub: f64, diag: f64, sup: f64) -> Self {
        let mut t = Vec::with_capacity(3 * n);
        for i in 0..n {
            if i > 0 {
                t.push((i, i - 1, sub));
            }
            t.push((i, i, diag));
            if i + 1 < n {
                t.push((i, i + 1, sup));
            }
        }
        Self::from_triplets(n, n, t).expect("tridiagonal triplets are in bounds")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

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

    pub fn is_all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Stored entries of row `i` as (column, value) pairs.
    pub fn row_iter(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_offsets[i];
        let hi = self.row_offsets[i + 1];
        self.col_indices[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_offsets[i];
        let hi = self.row_offsets[i + 1];
        match self.col_indices[lo..hi].binary_search(&j) {
            Ok(pos) => self.values[lo + pos],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &j in &self.col_indices {
            counts[j + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        let mut next = counts.clone();
        for i in 0..self.rows {
            for (j, v) in self.row_iter(i) {
                let pos = next[j];
                col_indices[pos] = i;
                values[pos] = v;
                next[j] += 1;
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            row_offsets: counts,
            col_indices,
            values,
        }
    }

    /// Entrywise self + alpha * other over the merged sparsity pattern.
    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "csr add: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut row_offsets = vec![0usize; self.rows + 1];
        let mut col_indices = Vec::with_capacity(self.nnz() + other.nnz());
        let mut values = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.rows {
            let mut a = self.row_iter(i).peekable();
            let mut b = other.row_iter(i).peekable();
            loop {
                let (j, v) = match (a.peek().copied(), b.peek().copied()) {
                    (Some((ja, va)), Some((jb, vb))) => {
                        if ja < jb {
                            a.next();
                            (ja, va)
                        } else if jb < ja {
                            b.next();
                            (jb, alpha * vb)
                        } else {
                            a.next();
                            b.next();
                            (ja, va + alpha * vb)
                        }
                    }
                    (Some((ja, va)), None) => {
                        a.next();
                        (ja, va)
                    }
                    (None, Some((jb, vb))) => {
                        b.next();
                        (jb, alpha * vb)
                    }
                    (None, None) => break,
                };
                col_indices.push(j);
                values.push(v);
            }
            row_offsets[i + 1] = col_indices.len();
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out
    }

    /// Symmetric part (A + A^T)/2 over the merged pattern.
    pub fn symmetric_part(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "symmetric part of a non-square matrix".into(),
            ));
        }
        Ok(self.add_scaled(1.0, &self.transpose())?.scale(0.5))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row_iter(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// Dense product self * X, computed row-wise per output column.
    pub fn mul_dense(&self, x: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, x.rows());
        let mut out = DenseMatrix::zeros(self.rows, x.cols());
        for c in 0..x.cols() {
            let xcol = x.col(c);
            let ocol = out.col_mut(c);
            for (i, o) in ocol.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, v) in self.row_iter(i) {
                    acc += v * xcol[j];
                }
                *o = acc;
            }
        }
        out
    }

    /// Dense product X * self. Iterates the CSR rows of self so access stays
    /// row-contiguous: (X*B) col j accumulates v * X col k for each b_kj.
    pub fn dense_mul(&self, x: &DenseMatrix) -> DenseMatrix {
        assert_eq!(x.cols(), self.rows);
        let mut out = DenseMatrix::zeros(x.rows(), self.cols);
        for k in 0..self.rows {
            let xcol: Vec<f64> = x.col(k).to_vec();
            for (j, v) in self.row_iter(k) {
                let ocol = out.col_mut(j);
                for (o, xv) in ocol.iter_mut().zip(&xcol) {
                    *o += v * xv;
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, v) in self.row_iter(i) {
                d.set(i, j, d.get(i, j) + v);
            }
        }
        d
    }

    /// Validates the structural invariants; used after parsing foreign data.
    pub fn check_invariants(&self) -> Result<()> {
        if self.row_offsets.len() != self.rows + 1 {
            return Err(Error::DimensionMismatch("row offsets length".into()));
        }
        if self.row_offsets[self.rows] != self.values.len()
            || self.col_indices.len() != self.values.len()
        {
            return Err(Error::DimensionMismatch("offset/value count".into()));
        }
        for i in 0..self.rows {
            if self.row_offsets[i] > self.row_offsets[i + 1] {
                return Err(Error::DimensionMismatch("offsets not monotone".into()));
            }
            let mut prev: Option<usize> = None;
            for (j, _) in self.row_iter(i) {
                if j >= self.cols {
                    return Err(Error::DimensionMismatch("column index out of range".into()));
                }
                if let Some(p) = prev {
                    if j <= p {
                        return Err(Error::DimensionMismatch(
                            "column indices not strictly increasing".into(),
                        ));
                    }
                }
                prev = Some(j);
            }
        }
        Ok(())
    }
}
