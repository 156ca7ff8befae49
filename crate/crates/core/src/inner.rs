//! Inner solvers for the Sylvester subproblems of each outer sweep: a
//! conjugate-gradient solve for the symmetric positive definite equation, a
//! closed-form solve for the diagonal equation, and the dense Kronecker
//! elimination oracle used by the test suite.

use crate::dense::{trace_dot, DenseMatrix};
use crate::error::{Error, Result};
use crate::kron::kron_assemble;
use crate::matrix::{Matrix, SylvesterProblem};
use crate::nalg::{from_na, to_na};

/// Tolerance and iteration cap for an inner solve. The tolerance is relative
/// to the inner solve's initial residual.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct InnerConfig {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for InnerConfig {
    fn default() -> Self {
        Self {
            tol: 0.01,
            max_iters: 1000,
        }
    }
}

impl InnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "inner tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("inner max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct InnerResult {
    pub x: DenseMatrix,
    pub iters: usize,
    pub achieved_rel_residual: f64,
}

/// Closed-form solve of D_A X + X D_B = C for diagonal coefficients:
/// x_ij = c_ij / (a_ii + b_jj). A numerically zero denominator means the
/// diagonals share an eigenvalue, so the pencil is singular.
pub fn diag_sylvester_solve(da: &[f64], db: &[f64], c: &DenseMatrix) -> Result<DenseMatrix> {
    if c.rows() != da.len() || c.cols() != db.len() {
        return Err(Error::DimensionMismatch(format!(
            "C is {}x{} but diagonals have lengths {} and {}",
            c.rows(),
            c.cols(),
            da.len(),
            db.len()
        )));
    }
    let mut x = DenseMatrix::zeros(c.rows(), c.cols());
    for (j, &bj) in db.iter().enumerate() {
        for (i, &ai) in da.iter().enumerate() {
            let denom = ai + bj;
            if denom.abs() <= 1e3 * f64::EPSILON * (ai.abs() + bj.abs()) {
                return Err(Error::SingularPencil {
                    i,
                    j,
                    magnitude: denom.abs(),
                });
            }
            x.set(i, j, c.get(i, j) / denom);
        }
    }
    Ok(x)
}

/// Conjugate gradients on the operator L(X) = M X + X P under the trace
/// inner product <Y, Z> = sum_ij y_ij z_ij. Requires M, P symmetric with
/// L positive definite. Stops when the residual has dropped below
/// `cfg.tol` times the initial residual; hitting the iteration cap is
/// reported in the result, not raised.
pub fn cg_sylvester_solve(
    m: &Matrix,
    p: &Matrix,
    g: &DenseMatrix,
    cfg: &InnerConfig,
    x0: &DenseMatrix,
) -> Result<InnerResult> {
    cfg.validate()?;
    if g.rows() != m.nrows() || g.cols() != p.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "rhs is {}x{} but operator wants {}x{}",
            g.rows(),
            g.cols(),
            m.nrows(),
            p.nrows()
        )));
    }
    g.ensure_same_shape(x0, "cg initial guess")?;

    let apply = |x: &DenseMatrix| -> DenseMatrix {
        let mut y = m.mul_left(x);
        y.axpy(1.0, &p.mul_right(x));
        y
    };

    let mut x = x0.clone();
    let mut r = g - &apply(&x);
    let r0_norm = r.frobenius_norm();
    if !r0_norm.is_finite() {
        return Err(Error::NonFinite("cg initial residual"));
    }
    if r0_norm == 0.0 {
        return Ok(InnerResult {
            x,
            iters: 0,
            achieved_rel_residual: 0.0,
        });
    }
    let target = cfg.tol * r0_norm;

    let mut d = r.clone();
    let mut rs = trace_dot(&r, &r);
    for k in 1..=cfg.max_iters {
        let ld = apply(&d);
        let dld = trace_dot(&d, &ld);
        if !dld.is_finite() {
            return Err(Error::NonFinite("cg curvature term"));
        }
        if dld <= 0.0 {
            return Err(Error::NotSpd(format!(
                "operator is not positive definite: <d, L d> = {dld:e}"
            )));
        }
        let alpha = rs / dld;
        x.axpy(alpha, &d);
        r.axpy(-alpha, &ld);
        let rs_new = trace_dot(&r, &r);
        if !rs_new.is_finite() {
            return Err(Error::NonFinite("cg residual"));
        }
        if rs_new.sqrt() <= target {
            return Ok(InnerResult {
                x,
                iters: k,
                achieved_rel_residual: rs_new.sqrt() / r0_norm,
            });
        }
        let beta = rs_new / rs;
        // d = r + beta * d
        d.scale_mut(beta);
        d.axpy(1.0, &r);
        rs = rs_new;
    }
    Ok(InnerResult {
        x,
        iters: cfg.max_iters,
        achieved_rel_residual: rs.sqrt() / r0_norm,
    })
}

/// Dense direct oracle: assembles the Kronecker system explicitly and solves
/// it by Gaussian elimination with partial pivoting. Guarded to small sizes;
/// this path exists to check the iterative solvers, not to compete with them.
pub fn dense_direct_solve(p: &SylvesterProblem) -> Result<DenseMatrix> {
    dense_direct_solve_parts(&p.a, &p.b, &p.c)
}

pub(crate) fn dense_direct_solve_parts(
    a: &Matrix,
    b: &Matrix,
    c: &DenseMatrix,
) -> Result<DenseMatrix> {
    let (n, m) = (a.nrows(), b.nrows());
    let op = kron_assemble(a, b)?;
    let lu = to_na(&op).lu();
    let rhs = nalgebra::DVector::from_column_slice(c.as_vec());
    let sol = lu.solve(&rhs).ok_or(Error::SingularSystem)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    // Reject near-singular assemblies that slip past exact pivot checks.
    let op_na = to_na(&op);
    let resid = &op_na * &sol - &rhs;
    let rhs_norm = rhs.norm();
    if rhs_norm > 0.0 && resid.norm() > 1e-6 * rhs_norm.max(op.max_abs() * sol.norm()) {
        return Err(Error::SingularSystem);
    }
    Ok(from_na(&nalgebra::DMatrix::from_column_slice(
        n,
        m,
        sol.as_slice(),
    )))
}
