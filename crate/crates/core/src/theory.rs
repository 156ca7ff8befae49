//! Convergence certificates for the multiplicative splitting iteration.
//!
//! For a splitting pair with kept parts M (for A) and P (for B) the operator
//! `kM = I (x) M + P^T (x) I` inherits eigenvalue bounds from M and P. The
//! condition ratio
//!
//! ```text
//! theta = sqrt((lmax(M) + lmax(P)) / (lmin(M) + lmin(P)))
//! ```
//!
//! bounds sqrt(kappa(kM)), and
//!
//! ```text
//! varrho = theta^3 * (max|lambda(N)| + max|lambda(Q)|) / (lmin(M) + lmin(P))
//! ```
//!
//! bounds the M-weighted norm of kM^{-1} kN. The product varrho_1 * varrho_2
//! below 1 is a sufficient condition for convergence when the two kept-part
//! operators commute through the system matrix; it is not necessary, and the
//! solver routinely converges on problems where the certificate fails.

use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::kron::kron_assemble;
use crate::msi::MsiSplittings;
use crate::nalg::{from_na, to_na};
use crate::splitting::SplittingPair;

/// Dense eigensolves are allowed up to this matrix order.
pub const EIGEN_LIMIT: usize = 2048;

/// Eigenvalue extremes of the kept parts and spectral radii of the deferred
/// parts of one splitting pair (M, P, N, Q).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplittingSpectra {
    pub lambda_min_m: f64,
    pub lambda_max_m: f64,
    pub lambda_min_p: f64,
    pub lambda_max_p: f64,
    pub max_abs_lambda_n: f64,
    pub max_abs_lambda_q: f64,
}

fn symmetric_extremes(m: &crate::matrix::Matrix) -> Result<(f64, f64)> {
    if let Some(d) = m.as_diagonal() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in d {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        return Ok((lo, hi));
    }
    let n = m.nrows();
    if n > EIGEN_LIMIT {
        return Err(Error::SizeGuard {
            what: "symmetric eigensolve",
            size: n,
            limit: EIGEN_LIMIT,
        });
    }
    let eig = to_na(&m.to_dense()).symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in eig.eigenvalues.iter() {
        if !v.is_finite() {
            return Err(Error::EigenFailed);
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

fn spectral_radius_dense(m: &DenseMatrix) -> Result<f64> {
    if m.rows() > EIGEN_LIMIT {
        return Err(Error::SizeGuard {
            what: "nonsymmetric eigensolve",
            size: m.rows(),
            limit: EIGEN_LIMIT,
        });
    }
    if m.rows() == 0 {
        return Ok(0.0);
    }
    let eigs = to_na(m).complex_eigenvalues();
    let mut rho: f64 = 0.0;
    for v in eigs.iter() {
        let n = v.norm();
        if !n.is_finite() {
            return Err(Error::EigenFailed);
        }
        rho = rho.max(n);
    }
    Ok(rho)
}

fn max_abs_eigenvalue(m: &crate::matrix::Matrix) -> Result<f64> {
    if let Some(d) = m.as_diagonal() {
        return Ok(d.iter().fold(0.0, |acc: f64, v| acc.max(v.abs())));
    }
    spectral_radius_dense(&m.to_dense())
}

/// Eigen-extremes for the kept parts of a splitting of A and one of B, plus
/// spectral radii of the deferred parts.
///
/// Deferred-part radii use a dense eigensolve, so this is capped at
/// [`EIGEN_LIMIT`]. Beyond that a power iteration on N would give the 2-norm,
/// an upper bound on the spectral radius and hence a looser but still safe
/// certificate; that fallback is deliberately not wired in, and the guard
/// errs instead.
pub fn splitting_spectra(sa: &SplittingPair, sb: &SplittingPair) -> Result<SplittingSpectra> {
    let (lambda_min_m, lambda_max_m) = symmetric_extremes(&sa.m_part)?;
    let (lambda_min_p, lambda_max_p) = symmetric_extremes(&sb.m_part)?;
    let max_abs_lambda_n = max_abs_eigenvalue(&sa.n_part)?;
    let max_abs_lambda_q = max_abs_eigenvalue(&sb.n_part)?;
    Ok(SplittingSpectra {
        lambda_min_m,
        lambda_max_m,
        lambda_min_p,
        lambda_max_p,
        max_abs_lambda_n,
        max_abs_lambda_q,
    })
}

/// Condition ratio theta; errors when the kept parts cannot be positive
/// definite (non-positive minimum eigenvalue sum).
pub fn theta(s: &SplittingSpectra) -> Result<f64> {
    let denom = s.lambda_min_m + s.lambda_min_p;
    if denom <= 0.0 {
        return Err(Error::NotSpd(format!(
            "lambda_min(M) + lambda_min(P) = {denom:e} is not positive"
        )));
    }
    Ok(((s.lambda_max_m + s.lambda_max_p) / denom).sqrt())
}

/// Contraction certificate varrho for one splitting pair.
pub fn varrho(s: &SplittingSpectra) -> Result<f64> {
    let denom = s.lambda_min_m + s.lambda_min_p;
    if denom <= 0.0 {
        return Err(Error::NotSpd(format!(
            "lambda_min(M) + lambda_min(P) = {denom:e} is not positive"
        )));
    }
    let th = theta(s)?;
    Ok(th.powi(3) * (s.max_abs_lambda_n + s.max_abs_lambda_q) / denom)
}

/// The assembled sufficient-condition report for a full set of splittings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub theta: (f64, f64),
    pub varrho: (f64, f64),
    pub product: f64,
    pub predicts_convergence: bool,
    /// The certificate assumes the commutativity hypothesis on the kept-part
    /// operators; the report states that scope rather than checking it.
    pub validity: String,
}

pub fn msi_bound_check(splittings: &MsiSplittings) -> Result<BoundReport> {
    let s1 = splitting_spectra(&splittings.a1, &splittings.b1)?;
    let s2 = splitting_spectra(&splittings.a2, &splittings.b2)?;
    let th = (theta(&s1)?, theta(&s2)?);
    let vr = (varrho(&s1)?, varrho(&s2)?);
    let product = vr.0 * vr.1;
    Ok(BoundReport {
        theta: th,
        varrho: vr,
        product,
        predicts_convergence: product < 1.0,
        validity: "sufficient condition, valid under the commutativity hypothesis".to_string(),
    })
}

/// Weighted operator norm ||Mfull^{-1} Nfull||_{Mfull} =
/// ||Mfull^{-1/2} Nfull Mfull^{-1/2}||_2 for symmetric positive definite
/// Mfull, computed through the spectral square root. Oracle scale only.
pub fn weighted_operator_norm(m_full: &DenseMatrix, n_full: &DenseMatrix) -> Result<f64> {
    if !m_full.is_square() || !n_full.is_square() || m_full.rows() != n_full.rows() {
        return Err(Error::DimensionMismatch(
            "weighted norm needs square matrices of equal order".into(),
        ));
    }
    if m_full.rows() > crate::kron::KRON_ASSEMBLE_LIMIT {
        return Err(Error::SizeGuard {
            what: "weighted operator norm",
            size: m_full.rows(),
            limit: crate::kron::KRON_ASSEMBLE_LIMIT,
        });
    }
    let eig = to_na(m_full).symmetric_eigen();
    let mut lmin = f64::INFINITY;
    for &v in eig.eigenvalues.iter() {
        lmin = lmin.min(v);
    }
    if !lmin.is_finite() || lmin <= 0.0 {
        return Err(Error::NotSpd(format!(
            "weight matrix has minimum eigenvalue {lmin:e}"
        )));
    }
    let q = from_na(&eig.eigenvectors);
    let inv_sqrt: Vec<f64> = eig.eigenvalues.iter().map(|v| 1.0 / v.sqrt()).collect();
    // M^{-1/2} = Q diag(1/sqrt(lambda)) Q^T
    let mut scaled = q.clone();
    for (j, s) in inv_sqrt.iter().enumerate() {
        for v in scaled.col_mut(j) {
            *v *= s;
        }
    }
    let m_inv_sqrt = scaled.matmul(&q.transpose());
    let k = m_inv_sqrt.matmul(n_full).matmul(&m_inv_sqrt);
    let svd = to_na(&k).svd(false, false);
    Ok(svd.singular_values.iter().fold(0.0, |acc: f64, v| acc.max(*v)))
}

/// Spectral radius of the composite iteration matrix
/// T = kM2^{-1} kN2 kM1^{-1} kN1 assembled explicitly. Oracle scale only.
pub fn iteration_matrix_rho(splittings: &MsiSplittings) -> Result<f64> {
    let m1 = kron_assemble(&splittings.a1.m_part, &splittings.b1.m_part)?;
    let n1 = kron_assemble(&splittings.a1.n_part, &splittings.b1.n_part)?;
    let m2 = kron_assemble(&splittings.a2.m_part, &splittings.b2.m_part)?;
    let n2 = kron_assemble(&splittings.a2.n_part, &splittings.b2.n_part)?;
    let s1 = to_na(&m1)
        .lu()
        .solve(&to_na(&n1))
        .ok_or(Error::SingularSystem)?;
    let s2 = to_na(&m2)
        .lu()
        .solve(&to_na(&n2))
        .ok_or(Error::SingularSystem)?;
    let t = from_na(&(s2 * s1));
    spectral_radius_dense(&t)
}
