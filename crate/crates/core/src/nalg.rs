//! Conversions to nalgebra for factorizations and eigensolves. Both sides
//! are column-major, so these are plain buffer copies.

use nalgebra::DMatrix;

use crate::dense::DenseMatrix;

pub(crate) fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.rows(), m.cols(), m.as_vec())
}

pub(crate) fn from_na(m: &DMatrix<f64>) -> DenseMatrix {
    DenseMatrix::from_vec(m.nrows(), m.ncols(), m.as_slice().to_vec())
}
