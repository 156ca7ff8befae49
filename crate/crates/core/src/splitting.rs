//! Matrix splittings A = M - N consumed by the outer iteration.
//!
//! The sign convention is fixed by the reconstruction identity: the deferred
//! part is always N = M - A, so M - N = A holds unconditionally for every
//! constructor here.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nalg::to_na;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplittingSource {
    Hs,
    Jacobi,
    Custom,
}

/// A splitting A = M - N. The kept part `m_part` is symmetric positive
/// definite by contract; `n_part` is whatever remains.
#[derive(Debug, Clone)]
pub struct SplittingPair {
    pub m_part: Matrix,
    pub n_part: Matrix,
    pub source: SplittingSource,
}

impl SplittingPair {
    /// User-supplied splitting: keeps `m_part` and derives N = M - A, so the
    /// reconstruction invariant holds by construction.
    pub fn custom(a: &Matrix, m_part: Matrix) -> Result<Self> {
        if (m_part.nrows(), m_part.ncols()) != (a.nrows(), a.ncols()) {
            return Err(Error::DimensionMismatch(format!(
                "splitting part {}x{} for matrix {}x{}",
                m_part.nrows(),
                m_part.ncols(),
                a.nrows(),
                a.ncols()
            )));
        }
        if !is_symmetric(&m_part, 1e-14) {
            return Err(Error::NotSpd("custom M part is not symmetric".into()));
        }
        let n_part = m_part.sub(a)?;
        Ok(Self {
            m_part,
            n_part,
            source: SplittingSource::Custom,
        })
    }

    pub fn order(&self) -> usize {
        self.m_part.nrows()
    }

    /// True when the kept part has the diagonal fast path.
    pub fn is_diagonal(&self) -> bool {
        matches!(self.m_part, Matrix::Diagonal(_))
    }
}

/// Hermitian/skew-Hermitian splitting: M = (A + A^T)/2, N = M - A.
pub fn hs_split(a: &Matrix) -> Result<SplittingPair> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("hs_split needs a square matrix".into()));
    }
    let m_part = a.symmetric_part()?;
    let n_part = m_part.sub(a)?;
    Ok(SplittingPair {
        m_part,
        n_part,
        source: SplittingSource::Hs,
    })
}

/// Jacobi splitting: M = diag(A) (stored diagonally), N = M - A.
/// Errors on a zero diagonal entry, which would make M singular.
pub fn jacobi_split(a: &Matrix) -> Result<SplittingPair> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("jacobi_split needs a square matrix".into()));
    }
    let d = a.diagonal();
    for (i, &v) in d.iter().enumerate() {
        if v == 0.0 {
            return Err(Error::ZeroDiagonal { index: i });
        }
    }
    let m_part = Matrix::Diagonal(d);
    let n_part = m_part.sub(a)?;
    Ok(SplittingPair {
        m_part,
        n_part,
        source: SplittingSource::Jacobi,
    })
}

fn is_symmetric(m: &Matrix, tol: f64) -> bool {
    match m {
        Matrix::Diagonal(_) => true,
        _ => {
            let d = m.to_dense();
            if !d.is_square() {
                return false;
            }
            for j in 0..d.cols() {
                for i in 0..j {
                    let (a, b) = (d.get(i, j), d.get(j, i));
                    if (a - b).abs() > tol * (a.abs() + b.abs()).max(1.0) {
                        return false;
                    }
                }
            }
            true
        }
    }
}

/// True iff M is symmetric within `tol` and a Cholesky factorization
/// succeeds (all pivots positive). Returns false rather than erroring.
pub fn validate_spd(m: &Matrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    if let Matrix::Diagonal(d) = m {
        return d.iter().all(|&v| v > 0.0);
    }
    if !is_symmetric(m, tol) {
        return false;
    }
    let d = m.to_dense();
    if !d.is_all_finite() {
        return false;
    }
    nalgebra::Cholesky::new(to_na(&d)).is_some()
}
