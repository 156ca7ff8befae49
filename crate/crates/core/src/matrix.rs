//! The coefficient-matrix abstraction: dense, sparse, or diagonal storage
//! behind one interface, plus the Sylvester problem triple and its residual.

use crate::csr::CsrMatrix;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// A square coefficient matrix in whichever storage the problem calls for.
#[derive(Debug, Clone)]
pub enum Matrix {
    Dense(DenseMatrix),
    Sparse(CsrMatrix),
    Diagonal(Vec<f64>),
}

impl From<DenseMatrix> for Matrix {
    fn from(m: DenseMatrix) -> Self {
        Matrix::Dense(m)
    }
}

impl From<CsrMatrix> for Matrix {
    fn from(m: CsrMatrix) -> Self {
        Matrix::Sparse(m)
    }
}

impl Matrix {
    pub fn nrows(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.rows(),
            Matrix::Sparse(m) => m.rows(),
            Matrix::Diagonal(d) => d.len(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.cols(),
            Matrix::Sparse(m) => m.cols(),
            Matrix::Diagonal(d) => d.len(),
        }
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn as_diagonal(&self) -> Option<&[f64]> {
        match self {
            Matrix::Diagonal(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_all_finite(&self) -> bool {
        match self {
            Matrix::Dense(m) => m.is_all_finite(),
            Matrix::Sparse(m) => m.is_all_finite(),
            Matrix::Diagonal(d) => d.iter().all(|v| v.is_finite()),
        }
    }

    /// Product self * X without densifying sparse storage.
    pub fn mul_left(&self, x: &DenseMatrix) -> DenseMatrix {
        match self {
            Matrix::Dense(m) => m.matmul(x),
            Matrix::Sparse(m) => m.mul_dense(x),
            Matrix::Diagonal(d) => {
                assert_eq!(d.len(), x.rows());
                let mut out = x.clone();
                for c in 0..out.cols() {
                    for (v, di) in out.col_mut(c).iter_mut().zip(d) {
                        *v *= di;
                    }
                }
                out
            }
        }
    }

    /// Product X * self without densifying sparse storage.
    pub fn mul_right(&self, x: &DenseMatrix) -> DenseMatrix {
        match self {
            Matrix::Dense(m) => x.matmul(m),
            Matrix::Sparse(m) => m.dense_mul(x),
            Matrix::Diagonal(d) => {
                assert_eq!(d.len(), x.cols());
                let mut out = x.clone();
                for (c, dj) in d.iter().enumerate() {
                    for v in out.col_mut(c) {
                        *v *= dj;
                    }
                }
                out
            }
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        match self {
            Matrix::Dense(m) => m.diagonal(),
            Matrix::Sparse(m) => m.diagonal(),
            Matrix::Diagonal(d) => d.clone(),
        }
    }

    /// Symmetric part (A + A^T)/2, keeping the storage kind.
    pub fn symmetric_part(&self) -> Result<Matrix> {
        match self {
            Matrix::Dense(m) => {
                if !m.is_square() {
                    return Err(Error::DimensionMismatch("symmetric part".into()));
                }
                Ok(Matrix::Dense(m.symmetric_part()))
            }
            Matrix::Sparse(m) => Ok(Matrix::Sparse(m.symmetric_part()?)),
            Matrix::Diagonal(d) => Ok(Matrix::Diagonal(d.clone())),
        }
    }

    /// Difference self - other. Diagonal minus dense/sparse keeps the
    /// subtrahend's storage so splitting remainders stay cheap to apply.
    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if (self.nrows(), self.ncols()) != (other.nrows(), other.ncols()) {
            return Err(Error::DimensionMismatch(format!(
                "matrix difference: {}x{} vs {}x{}",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        match (self, other) {
            (Matrix::Dense(a), Matrix::Dense(b)) => Ok(Matrix::Dense(a - b)),
            (Matrix::Sparse(a), Matrix::Sparse(b)) => Ok(Matrix::Sparse(a.add_scaled(-1.0, b)?)),
            (Matrix::Diagonal(d), Matrix::Dense(b)) => {
                let mut out = b.scale(-1.0);
                for (i, di) in d.iter().enumerate() {
                    out.set(i, i, out.get(i, i) + di);
                }
                Ok(Matrix::Dense(out))
            }
            (Matrix::Diagonal(d), Matrix::Sparse(b)) => {
                let diag = CsrMatrix::from_triplets(
                    d.len(),
                    d.len(),
                    d.iter().enumerate().map(|(i, &v)| (i, i, v)),
                )?;
                Ok(Matrix::Sparse(diag.add_scaled(-1.0, b)?))
            }
            (Matrix::Diagonal(a), Matrix::Diagonal(b)) => {
                Ok(Matrix::Diagonal(a.iter().zip(b).map(|(x, y)| x - y).collect()))
            }
            (Matrix::Dense(a), Matrix::Diagonal(d)) => {
                let mut out = a.clone();
                for (i, di) in d.iter().enumerate() {
                    out.set(i, i, out.get(i, i) - di);
                }
                Ok(Matrix::Dense(out))
            }
            (Matrix::Sparse(a), Matrix::Diagonal(d)) => {
                let diag = CsrMatrix::from_triplets(
                    d.len(),
                    d.len(),
                    d.iter().enumerate().map(|(i, &v)| (i, i, v)),
                )?;
                Ok(Matrix::Sparse(a.add_scaled(-1.0, &diag)?))
            }
            (Matrix::Dense(a), Matrix::Sparse(b)) => Ok(Matrix::Dense(a - &b.to_dense())),
            (Matrix::Sparse(a), Matrix::Dense(b)) => Ok(Matrix::Dense(&a.to_dense() - b)),
        }
    }

    /// Adds s * I, keeping the storage kind.
    pub fn add_scaled_identity(&self, s: f64) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("shift of a non-square matrix".into()));
        }
        let n = self.nrows();
        match self {
            Matrix::Dense(m) => {
                let mut out = m.clone();
                for i in 0..n {
                    out.set(i, i, out.get(i, i) + s);
                }
                Ok(Matrix::Dense(out))
            }
            Matrix::Sparse(m) => {
                let eye = CsrMatrix::from_triplets(n, n, (0..n).map(|i| (i, i, s)))?;
                Ok(Matrix::Sparse(m.add_scaled(1.0, &eye)?))
            }
            Matrix::Diagonal(d) => Ok(Matrix::Diagonal(d.iter().map(|x| x + s).collect())),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(m) => m.clone(),
            Matrix::Sparse(m) => m.to_dense(),
            Matrix::Diagonal(d) => DenseMatrix::from_diagonal(d),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Matrix::Dense(m) => m.max_abs(),
            Matrix::Sparse(m) => m.values().iter().fold(0.0, |acc: f64, v| acc.max(v.abs())),
            Matrix::Diagonal(d) => d.iter().fold(0.0, |acc: f64, v| acc.max(v.abs())),
        }
    }
}

/// The continuous Sylvester problem AX + XB = C with A n-by-n, B m-by-m and
/// C n-by-m.
#[derive(Debug, Clone)]
pub struct SylvesterProblem {
    pub a: Matrix,
    pub b: Matrix,
    pub c: DenseMatrix,
}

impl SylvesterProblem {
    pub fn new(a: Matrix, b: Matrix, c: DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if !b.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "B must be square, got {}x{}",
                b.nrows(),
                b.ncols()
            )));
        }
        if c.rows() != a.nrows() || c.cols() != b.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "C must be {}x{}, got {}x{}",
                a.nrows(),
                b.nrows(),
                c.rows(),
                c.cols()
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.b.nrows()
    }
}

/// Residual R = C - A*X - X*B of an iterate.
pub fn sylvester_residual(p: &SylvesterProblem, x: &DenseMatrix) -> Result<DenseMatrix> {
    if x.rows() != p.n() || x.cols() != p.m() {
        return Err(Error::DimensionMismatch(format!(
            "iterate must be {}x{}, got {}x{}",
            p.n(),
            p.m(),
            x.rows(),
            x.cols()
        )));
    }
    let mut r = &p.c - &p.a.mul_left(x);
    r.axpy(-1.0, &p.b.mul_right(x));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_of_exact_solution_is_zero() {
        let p = SylvesterProblem::new(
            Matrix::Dense(DenseMatrix::identity(2)),
            Matrix::Dense(DenseMatrix::identity(2)),
            DenseMatrix::ones(2, 2).scale(2.0),
        )
        .unwrap();
        let r = sylvester_residual(&p, &DenseMatrix::ones(2, 2)).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn residual_of_zero_iterate_is_c() {
        let p = SylvesterProblem::new(
            Matrix::Sparse(CsrMatrix::tridiagonal(3, -1.0, 2.0, -1.0)),
            Matrix::Dense(DenseMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0])),
            DenseMatrix::from_row_slice(3, 2, &[1.0, -2.0, 0.5, 4.0, 3.0, -1.0]),
        )
        .unwrap();
        let r = sylvester_residual(&p, &DenseMatrix::zeros(3, 2)).unwrap();
        assert!(r.approx_eq(&p.c, 0.0));
    }

    #[test]
    fn residual_rectangular_hand_case() {
        // A = diag(1,2), B = [[3]], C = [4;5], X = [1;1] solves exactly.
        let p = SylvesterProblem::new(
            Matrix::Dense(DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0])),
            Matrix::Dense(DenseMatrix::from_row_slice(1, 1, &[3.0])),
            DenseMatrix::from_row_slice(2, 1, &[4.0, 5.0]),
        )
        .unwrap();
        let r = sylvester_residual(&p, &DenseMatrix::ones(2, 1)).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn residual_dimension_mismatch() {
        let p = SylvesterProblem::new(
            Matrix::Dense(DenseMatrix::identity(2)),
            Matrix::Dense(DenseMatrix::identity(2)),
            DenseMatrix::zeros(2, 2),
        )
        .unwrap();
        assert!(sylvester_residual(&p, &DenseMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn diagonal_products() {
        let d = Matrix::Diagonal(vec![2.0, 3.0]);
        let x = DenseMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let left = d.mul_left(&x);
        assert!(left.approx_eq(&DenseMatrix::from_row_slice(2, 2, &[2.0, 4.0, 9.0, 12.0]), 0.0));
        let right = d.mul_right(&x);
        assert!(right.approx_eq(&DenseMatrix::from_row_slice(2, 2, &[2.0, 6.0, 6.0, 12.0]), 0.0));
    }

    #[test]
    fn sub_promotes_storage() {
        let d = Matrix::Diagonal(vec![2.0, 2.0]);
        let a = Matrix::Dense(DenseMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]));
        let n = d.sub(&a).unwrap();
        let expected = DenseMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(n.to_dense().approx_eq(&expected, 0.0));
    }
}
