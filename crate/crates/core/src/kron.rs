//! The Kronecker-form operator of the Sylvester equation.
//!
//! The n*m by n*m system matrix is `I_m (x) A + B^T (x) I_n`, acting on
//! column-major stacked vectors. `kron_apply` applies it matrix-free through
//! the identity vec(A X + X B); `kron_assemble` forms it explicitly and is
//! meant for small-scale oracles only.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Explicit assembly is capped at this many operator rows.
pub const KRON_ASSEMBLE_LIMIT: usize = 4096;

/// Applies the Kronecker operator to v = vec(X) without forming it:
/// returns vec(A*X + X*B).
pub fn kron_apply(a: &Matrix, b: &Matrix, v: &[f64]) -> Result<Vec<f64>> {
    let (n, m) = (a.nrows(), b.nrows());
    if !a.is_square() || !b.is_square() {
        return Err(Error::DimensionMismatch("kron_apply needs square A and B".into()));
    }
    if v.len() != n * m {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} does not match n*m = {}",
            v.len(),
            n * m
        )));
    }
    let x = DenseMatrix::from_vec(n, m, v.to_vec());
    let mut y = a.mul_left(&x);
    y.axpy(1.0, &b.mul_right(&x));
    Ok(y.into_vec())
}

/// Forms the explicit nm-by-nm matrix `I_m (x) A + B^T (x) I_n`.
pub fn kron_assemble(a: &Matrix, b: &Matrix) -> Result<DenseMatrix> {
    let (n, m) = (a.nrows(), b.nrows());
    if !a.is_square() || !b.is_square() {
        return Err(Error::DimensionMismatch("kron_assemble needs square A and B".into()));
    }
    let size = n * m;
    if size > KRON_ASSEMBLE_LIMIT {
        return Err(Error::SizeGuard {
            what: "kron_assemble",
            size,
            limit: KRON_ASSEMBLE_LIMIT,
        });
    }
    let ad = a.to_dense();
    let bd = b.to_dense();
    let mut out = DenseMatrix::zeros(size, size);
    // I_m (x) A: m diagonal blocks of A.
    for q in 0..m {
        for j in 0..n {
            for i in 0..n {
                out.set(q * n + i, q * n + j, ad.get(i, j));
            }
        }
    }
    // B^T (x) I_n: block (p, q) is b_qp * I_n.
    for p in 0..m {
        for q in 0..m {
            let v = bd.get(q, p);
            if v != 0.0 {
                for i in 0..n {
                    let (r, c) = (p * n + i, q * n + i);
                    out.set(r, c, out.get(r, c) + v);
                }
            }
        }
    }
    Ok(out)
}

/// Dense matrix-vector product helper for oracle comparisons.
pub fn dense_matvec(m: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    assert_eq!(m.cols(), v.len());
    let mut y = vec![0.0; m.rows()];
    for (j, &vj) in v.iter().enumerate() {
        if vj != 0.0 {
            for (yi, &mij) in y.iter_mut().zip(m.col(j)) {
                *yi += mij * vj;
            }
        }
    }
    y
}
