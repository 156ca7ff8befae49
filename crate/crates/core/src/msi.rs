//! The multiplicative splitting iteration (MSI) for AX + XB = C.
//!
//! Two splittings A = M1 - N1 = M2 - N2 and B = P1 - Q1 = P2 - Q2 with
//! symmetric positive definite kept parts define the sweep
//!
//! ```text
//! solve  M1 U + U P1 = N1 X  + X  Q1 + C      (first half-step)
//! solve  M2 X'+ X' P2 = N2 U + U Q2 + C       (second half-step)
//! ```
//!
//! iterated until the relative residual ||C - A X - X B||_F / ||C||_F drops
//! below the outer tolerance. The HS + Jacobi specialization takes the
//! Hermitian/skew-Hermitian splitting first and the Jacobi splitting second,
//! which makes the first half-step a symmetric positive definite equation
//! (solved by conjugate gradients) and the second one diagonal (solved in
//! closed form).

use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::inner::{cg_sylvester_solve, diag_sylvester_solve, dense_direct_solve_parts, InnerConfig};
use crate::matrix::{sylvester_residual, Matrix, SylvesterProblem};
use crate::splitting::{hs_split, jacobi_split, validate_spd, SplittingPair};
use crate::timer::Stopwatch;

/// Relative residual above which the outer iteration is declared divergent.
const DIVERGENCE_GUARD: f64 = 1e8;

/// Kept parts larger than this skip the up-front SPD validation; at that
/// scale a dense Cholesky would dominate the solve itself.
const SPD_CHECK_LIMIT: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MsiVariant {
    General,
    HsJacobi,
}

/// How the non-diagonal half-step equations are solved. `Direct` routes them
/// through the dense Kronecker oracle and exists for equivalence tests at
/// small scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InnerMode {
    Iterative,
    Direct,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MsiConfig {
    pub outer_tol: f64,
    pub inner: InnerConfig,
    pub max_outer: usize,
    pub variant: MsiVariant,
    pub inner_mode: InnerMode,
}

impl Default for MsiConfig {
    fn default() -> Self {
        Self {
            outer_tol: 1e-8,
            inner: InnerConfig::default(),
            max_outer: 5000,
            variant: MsiVariant::HsJacobi,
            inner_mode: InnerMode::Iterative,
        }
    }
}

impl MsiConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.outer_tol > 0.0 && self.outer_tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "outer tol must lie in (0, 1), got {}",
                self.outer_tol
            )));
        }
        if self.max_outer == 0 {
            return Err(Error::InvalidConfig("max_outer must be >= 1".into()));
        }
        self.inner.validate()
    }
}

/// Iteration accounting for one solve. `residual_history[k]` is the relative
/// Frobenius residual after k outer steps, so the history always starts at
/// the initial residual and has `outer_iters + 1` entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub outer_iters: usize,
    pub total_inner_iters: usize,
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub wall_seconds: f64,
    /// Present when the method stopped for a structural reason (Krylov
    /// breakdown, stagnation) rather than by tolerance or iteration cap.
    pub failure: Option<String>,
}

/// The two splittings of A and of B driving the sweep: `a1`/`b1` feed the
/// first half-step, `a2`/`b2` the second.
#[derive(Debug, Clone)]
pub struct MsiSplittings {
    pub a1: SplittingPair,
    pub b1: SplittingPair,
    pub a2: SplittingPair,
    pub b2: SplittingPair,
}

impl MsiSplittings {
    /// HS splittings first, Jacobi splittings second.
    pub fn hs_jacobi(p: &SylvesterProblem) -> Result<Self> {
        Ok(Self {
            a1: hs_split(&p.a)?,
            b1: hs_split(&p.b)?,
            a2: jacobi_split(&p.a)?,
            b2: jacobi_split(&p.b)?,
        })
    }
}

fn check_spd(pair: &SplittingPair, label: &str) -> Result<()> {
    if pair.order() <= SPD_CHECK_LIMIT && !validate_spd(&pair.m_part, 1e-12) {
        return Err(Error::NotSpd(format!(
            "kept part of splitting {label} failed the SPD check"
        )));
    }
    Ok(())
}

/// One half-step: solve M Y + Y P = G.
fn solve_half_step(
    m: &Matrix,
    p: &Matrix,
    g: &DenseMatrix,
    warm: &DenseMatrix,
    cfg: &MsiConfig,
    outer_step: usize,
) -> Result<(DenseMatrix, usize)> {
    if let (Some(da), Some(db)) = (m.as_diagonal(), p.as_diagonal()) {
        let x = diag_sylvester_solve(da, db, g).map_err(|e| Error::InnerSolve {
            outer_step,
            source: Box::new(e),
        })?;
        return Ok((x, 0));
    }
    match cfg.inner_mode {
        InnerMode::Iterative => {
            let res = cg_sylvester_solve(m, p, g, &cfg.inner, warm).map_err(|e| Error::InnerSolve {
                outer_step,
                source: Box::new(e),
            })?;
            Ok((res.x, res.iters))
        }
        InnerMode::Direct => {
            let x = dense_direct_solve_parts(m, p, g).map_err(|e| Error::InnerSolve {
                outer_step,
                source: Box::new(e),
            })?;
            Ok((x, 0))
        }
    }
}

/// General MSI driver starting from the zero matrix.
pub fn msi_solve_general(
    p: &SylvesterProblem,
    splittings: &MsiSplittings,
    cfg: &MsiConfig,
) -> Result<(DenseMatrix, SolveReport)> {
    msi_solve_general_from(p, splittings, cfg, None)
}

/// General MSI driver with an explicit initial iterate (test hook; the
/// benchmark convention is the zero start).
pub fn msi_solve_general_from(
    p: &SylvesterProblem,
    splittings: &MsiSplittings,
    cfg: &MsiConfig,
    x0: Option<&DenseMatrix>,
) -> Result<(DenseMatrix, SolveReport)> {
    cfg.validate()?;
    let (n, m) = (p.n(), p.m());
    for (pair, label) in [
        (&splittings.a1, "A1"),
        (&splittings.b1, "B1"),
        (&splittings.a2, "A2"),
        (&splittings.b2, "B2"),
    ] {
        check_spd(pair, label)?;
    }
    if splittings.a1.order() != n
        || splittings.a2.order() != n
        || splittings.b1.order() != m
        || splittings.b2.order() != m
    {
        return Err(Error::DimensionMismatch(
            "splitting orders do not match the problem".into(),
        ));
    }

    let clock = Stopwatch::start();
    let mut x = match x0 {
        Some(x0) => {
            p.c.ensure_same_shape(x0, "initial iterate")?;
            x0.clone()
        }
        None => DenseMatrix::zeros(n, m),
    };

    let norm_c = p.c.frobenius_norm();
    let denom = if norm_c > 0.0 { norm_c } else { 1.0 };
    let mut rel = sylvester_residual(p, &x)?.frobenius_norm() / denom;
    let mut history = vec![rel];
    let mut total_inner = 0usize;
    let mut outer = 0usize;

    while rel > cfg.outer_tol && outer < cfg.max_outer {
        if !rel.is_finite() || rel > DIVERGENCE_GUARD {
            return Err(Error::Divergence {
                outer_step: outer,
                residual: rel,
            });
        }

        // First half-step: M1 U + U P1 = N1 X + X Q1 + C, warm started from
        // the current outer iterate. With that start the inner initial
        // residual equals the outer residual, so the inner tolerance is
        // relative to the outer progress as well.
        let mut g1 = splittings.a1.n_part.mul_left(&x);
        g1.axpy(1.0, &splittings.b1.n_part.mul_right(&x));
        g1.axpy(1.0, &p.c);
        let (u, iters1) = solve_half_step(
            &splittings.a1.m_part,
            &splittings.b1.m_part,
            &g1,
            &x,
            cfg,
            outer,
        )?;
        total_inner += iters1;

        // Second half-step: M2 X' + X' P2 = N2 U + U Q2 + C, warm started
        // from the intermediate iterate.
        let mut g2 = splittings.a2.n_part.mul_left(&u);
        g2.axpy(1.0, &splittings.b2.n_part.mul_right(&u));
        g2.axpy(1.0, &p.c);
        let (x_next, iters2) = solve_half_step(
            &splittings.a2.m_part,
            &splittings.b2.m_part,
            &g2,
            &u,
            cfg,
            outer,
        )?;
        total_inner += iters2;

        x = x_next;
        rel = sylvester_residual(p, &x)?.frobenius_norm() / denom;
        history.push(rel);
        outer += 1;
    }

    if !rel.is_finite() {
        return Err(Error::Divergence {
            outer_step: outer,
            residual: rel,
        });
    }

    let report = SolveReport {
        outer_iters: outer,
        total_inner_iters: total_inner,
        converged: rel <= cfg.outer_tol,
        residual_history: history,
        wall_seconds: clock.seconds(),
        failure: None,
    };
    Ok((x, report))
}

/// HS + Jacobi specialization: builds the four splittings once and runs the
/// general driver. Requires positive diagonals so the Jacobi kept parts are
/// positive definite.
pub fn msi_solve_hs_jacobi(
    p: &SylvesterProblem,
    cfg: &MsiConfig,
) -> Result<(DenseMatrix, SolveReport)> {
    msi_solve_hs_jacobi_from(p, cfg, None)
}

pub fn msi_solve_hs_jacobi_from(
    p: &SylvesterProblem,
    cfg: &MsiConfig,
    x0: Option<&DenseMatrix>,
) -> Result<(DenseMatrix, SolveReport)> {
    for m in [&p.a, &p.b] {
        for (i, v) in m.diagonal().into_iter().enumerate() {
            if v <= 0.0 {
                return Err(Error::NonPositiveDiagonal { index: i, value: v });
            }
        }
    }
    let splittings = MsiSplittings::hs_jacobi(p)?;
    msi_solve_general_from(p, &splittings, cfg, x0)
}
