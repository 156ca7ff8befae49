//! Comparison solvers: HSS for the Sylvester equation, and restarted GMRES
//! and BiCGSTAB running matrix-free over the Kronecker operator.

use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::inner::{cg_sylvester_solve, InnerConfig};
use crate::matrix::{sylvester_residual, Matrix, SylvesterProblem};
use crate::msi::SolveReport;
use crate::theory::EIGEN_LIMIT;
use crate::timer::Stopwatch;

const DIVERGENCE_GUARD: f64 = 1e8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrylovConfig {
    /// Stopping tolerance, relative to the right-hand side norm.
    pub tol: f64,
    /// Restart length (GMRES only).
    pub restart: usize,
    /// Cap on the total number of Krylov steps.
    pub max_iters: usize,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            restart: 10,
            max_iters: 100_000,
        }
    }
}

impl KrylovConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "krylov tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if self.restart == 0 {
            return Err(Error::InvalidConfig("restart must be >= 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HssConfig {
    /// Positive shift. `None` estimates sqrt(lmin(H) * lmax(H)) from the
    /// eigenvalue extremes of the Hermitian parts.
    pub alpha: Option<f64>,
    pub inner: InnerConfig,
    pub max_outer: usize,
    /// Outer stopping tolerance, relative residual against ||C||_F.
    pub outer_tol: f64,
}

impl Default for HssConfig {
    fn default() -> Self {
        Self {
            alpha: None,
            inner: InnerConfig::default(),
            max_outer: 5000,
            outer_tol: 1e-8,
        }
    }
}

impl HssConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidConfig(format!("alpha must be positive, got {a}")));
            }
        }
        if !(self.outer_tol > 0.0 && self.outer_tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "outer tol must lie in (0, 1), got {}",
                self.outer_tol
            )));
        }
        self.inner.validate()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) struct GmresOutcome {
    pub x: Vec<f64>,
    pub cycles: usize,
    pub steps: usize,
    pub converged: bool,
    pub stagnated: bool,
    /// Residual norm relative to `norm_scale` at start and after each cycle.
    pub history: Vec<f64>,
    /// Per-step residual estimates from the Givens recurrence (absolute).
    #[cfg_attr(not(test), allow(dead_code))]
    pub step_estimates: Vec<f64>,
}

/// Restarted GMRES with modified Gram-Schmidt Arnoldi and Givens rotations.
/// Stops when the residual drops below `abs_target` (absolute).
pub(crate) fn gmres_restarted(
    op: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: Option<&[f64]>,
    abs_target: f64,
    norm_scale: f64,
    restart: usize,
    max_steps: usize,
) -> GmresOutcome {
    let nn = b.len();
    let mut x = match x0 {
        Some(v) => v.to_vec(),
        None => vec![0.0; nn],
    };
    let scale = if norm_scale > 0.0 { norm_scale } else { 1.0 };
    let mut history = Vec::new();
    let mut step_estimates = Vec::new();
    let mut cycles = 0usize;
    let mut steps = 0usize;
    let mut converged = false;
    let mut stagnated = false;
    let mut prev_beta = f64::INFINITY;
    let mut prev_cycle_full = false;

    loop {
        let mut r = b.to_vec();
        let ax = op(&x);
        axpy(&mut r, -1.0, &ax);
        let beta = norm(&r);
        history.push(beta / scale);
        if !beta.is_finite() {
            break;
        }
        if beta <= abs_target {
            converged = true;
            break;
        }
        if prev_cycle_full && beta >= prev_beta * (1.0 - 1e-12) {
            stagnated = true;
            break;
        }
        if steps >= max_steps {
            break;
        }
        prev_beta = beta;
        cycles += 1;

        let m = restart.min(max_steps - steps).max(1);
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        let mut h_cols: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        q.push(r.iter().map(|v| v / beta).collect());

        let mut k_used = 0usize;
        for k in 0..m {
            let mut w = op(&q[k]);
            let mut h = vec![0.0; k + 2];
            for (i, qi) in q.iter().enumerate().take(k + 1) {
                h[i] = dot(&w, qi);
                axpy(&mut w, -h[i], qi);
            }
            let wn = norm(&w);
            h[k + 1] = wn;
            steps += 1;
            k_used = k + 1;
            let happy = wn == 0.0 || !wn.is_finite();
            if !happy {
                q.push(w.iter().map(|v| v / wn).collect());
            }

            for i in 0..k {
                let t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            let denom = (h[k] * h[k] + h[k + 1] * h[k + 1]).sqrt();
            if denom > 0.0 {
                cs[k] = h[k] / denom;
                sn[k] = h[k + 1] / denom;
            } else {
                cs[k] = 1.0;
                sn[k] = 0.0;
            }
            h[k] = denom;
            h[k + 1] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            h_cols.push(h);
            step_estimates.push(g[k + 1].abs());
            if g[k + 1].abs() <= abs_target || happy {
                break;
            }
        }

        // Back substitution on the rotated (upper triangular) Hessenberg.
        let mut y = vec![0.0; k_used];
        for j in (0..k_used).rev() {
            let mut s = g[j];
            for l in (j + 1)..k_used {
                s -= h_cols[l][j] * y[l];
            }
            let d = h_cols[j][j];
            y[j] = if d != 0.0 { s / d } else { 0.0 };
        }
        for (j, yj) in y.iter().enumerate() {
            axpy(&mut x, *yj, &q[j]);
        }
        prev_cycle_full = k_used == restart;
    }

    GmresOutcome {
        x,
        cycles,
        steps,
        converged,
        stagnated,
        history,
        step_estimates,
    }
}

pub(crate) struct BicgOutcome {
    pub x: Vec<f64>,
    pub iters: usize,
    pub converged: bool,
    pub breakdown: bool,
    pub history: Vec<f64>,
}

/// BiCGSTAB with the initial residual as shadow vector. A numerically zero
/// recurrence scalar is reported as a breakdown, not an error.
pub(crate) fn bicgstab(
    op: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    tol: f64,
    max_iters: usize,
) -> BicgOutcome {
    let nn = b.len();
    let mut x = vec![0.0; nn];
    let nb = norm(b);
    let scale = if nb > 0.0 { nb } else { 1.0 };
    let mut r = b.to_vec();
    let rhat = r.clone();
    let nrhat = norm(&rhat);
    let mut history = vec![norm(&r) / scale];
    if history[0] <= tol {
        return BicgOutcome {
            x,
            iters: 0,
            converged: true,
            breakdown: false,
            history,
        };
    }

    let mut rho = 1.0_f64;
    let mut alpha = 1.0_f64;
    let mut omega = 1.0_f64;
    let mut v = vec![0.0; nn];
    let mut p = vec![0.0; nn];
    let mut breakdown = false;
    let mut converged = false;
    let mut iters = 0usize;

    for k in 1..=max_iters {
        iters = k;
        let rho_new = dot(&rhat, &r);
        if rho_new.abs() <= f64::EPSILON * nrhat * norm(&r) || omega == 0.0 {
            breakdown = true;
            history.push(norm(&r) / scale);
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        // p = r + beta * (p - omega * v)
        for i in 0..nn {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        v = op(&p);
        let den = dot(&rhat, &v);
        if den.abs() <= f64::EPSILON * nrhat * norm(&v) {
            breakdown = true;
            history.push(norm(&r) / scale);
            break;
        }
        alpha = rho_new / den;
        let mut s = r.clone();
        axpy(&mut s, -alpha, &v);
        let ns = norm(&s);
        if !ns.is_finite() {
            breakdown = true;
            history.push(ns / scale);
            break;
        }
        if ns / scale <= tol {
            axpy(&mut x, alpha, &p);
            history.push(ns / scale);
            converged = true;
            break;
        }
        let t = op(&s);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            breakdown = true;
            history.push(ns / scale);
            break;
        }
        omega = dot(&t, &s) / tt;
        if omega == 0.0 || !omega.is_finite() {
            breakdown = true;
            history.push(ns / scale);
            break;
        }
        axpy(&mut x, alpha, &p);
        axpy(&mut x, omega, &s);
        r = s;
        axpy(&mut r, -omega, &t);
        let nr = norm(&r) / scale;
        history.push(nr);
        if !nr.is_finite() || nr > DIVERGENCE_GUARD {
            breakdown = true;
            break;
        }
        if nr <= tol {
            converged = true;
            break;
        }
        rho = rho_new;
    }

    BicgOutcome {
        x,
        iters,
        converged,
        breakdown,
        history,
    }
}

fn kron_operator<'a>(p: &'a SylvesterProblem) -> impl Fn(&[f64]) -> Vec<f64> + 'a {
    let (n, m) = (p.n(), p.m());
    move |v: &[f64]| {
        let x = DenseMatrix::from_vec(n, m, v.to_vec());
        let mut y = p.a.mul_left(&x);
        y.axpy(1.0, &p.b.mul_right(&x));
        y.into_vec()
    }
}

/// Restarted GMRES on the Kronecker operator with right-hand side vec(C) and
/// zero start. Restart cycles are the outer count; Arnoldi steps the total.
pub fn gmres_kron_solve(
    p: &SylvesterProblem,
    cfg: &KrylovConfig,
) -> Result<(DenseMatrix, SolveReport)> {
    cfg.validate()?;
    let clock = Stopwatch::start();
    let op = kron_operator(p);
    let b = p.c.as_vec();
    let nb = norm(b);
    let outcome = gmres_restarted(
        &op,
        b,
        None,
        cfg.tol * nb,
        nb,
        cfg.restart,
        cfg.max_iters,
    );
    let report = SolveReport {
        outer_iters: outcome.cycles,
        total_inner_iters: outcome.steps,
        converged: outcome.converged,
        residual_history: outcome.history,
        wall_seconds: clock.seconds(),
        failure: outcome.stagnated.then(|| "stagnation".to_string()),
    };
    Ok((DenseMatrix::from_vec(p.n(), p.m(), outcome.x), report))
}

/// BiCGSTAB on the Kronecker operator. Breakdown is a reported outcome.
pub fn bicgstab_kron_solve(
    p: &SylvesterProblem,
    cfg: &KrylovConfig,
) -> Result<(DenseMatrix, SolveReport)> {
    cfg.validate()?;
    let clock = Stopwatch::start();
    let op = kron_operator(p);
    let outcome = bicgstab(&op, p.c.as_vec(), cfg.tol, cfg.max_iters);
    let report = SolveReport {
        outer_iters: outcome.iters,
        total_inner_iters: outcome.iters,
        converged: outcome.converged,
        residual_history: outcome.history,
        wall_seconds: clock.seconds(),
        failure: outcome.breakdown.then(|| "breakdown".to_string()),
    };
    Ok((DenseMatrix::from_vec(p.n(), p.m(), outcome.x), report))
}

/// Eigenvalue extremes of a symmetric matrix: dense solve at small order,
/// power iteration on H and on (lmax I - H) beyond the dense guard.
fn symmetric_extremes_for_shift(h: &Matrix) -> Result<(f64, f64)> {
    let n = h.nrows();
    if n <= EIGEN_LIMIT {
        if let Some(d) = h.as_diagonal() {
            let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            return Ok((lo, hi));
        }
        let eig = crate::nalg::to_na(&h.to_dense()).symmetric_eigen();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in eig.eigenvalues.iter() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        return Ok((lo, hi));
    }
    // Power iteration for lmax, then on the reflected operator for lmin.
    let mut v = DenseMatrix::zeros(n, 1);
    for i in 0..n {
        v.set(i, 0, if i % 2 == 0 { 1.0 } else { -0.7 } / (i + 1) as f64);
    }
    let normalize = |v: &mut DenseMatrix| {
        let s = v.frobenius_norm();
        if s > 0.0 {
            v.scale_mut(1.0 / s);
        }
    };
    normalize(&mut v);
    let mut lmax = 0.0;
    for _ in 0..120 {
        let mut w = h.mul_left(&v);
        lmax = crate::dense::trace_dot(&v, &w);
        normalize(&mut w);
        v = w;
    }
    let mut u = DenseMatrix::zeros(n, 1);
    for i in 0..n {
        u.set(i, 0, if i % 3 == 0 { -0.9 } else { 1.0 } / (i + 1) as f64);
    }
    normalize(&mut u);
    let shift = lmax.abs() * 1.01 + 1e-12;
    let mut reflected = 0.0;
    for _ in 0..120 {
        let hv = h.mul_left(&u);
        let mut w = u.scale(shift);
        w.axpy(-1.0, &hv);
        reflected = crate::dense::trace_dot(&u, &w);
        normalize(&mut w);
        u = w;
    }
    Ok((shift - reflected, lmax))
}

/// HSS outer iteration. The first half-sweep solves the shifted Hermitian
/// equation by conjugate gradients; the second solves the shifted
/// skew-Hermitian equation matrix-free by restarted GMRES (closed form when
/// the skew parts vanish).
pub fn hss_solve(p: &SylvesterProblem, cfg: &HssConfig) -> Result<(DenseMatrix, SolveReport)> {
    cfg.validate()?;
    let clock = Stopwatch::start();
    let (n, m) = (p.n(), p.m());
    let ha = p.a.symmetric_part()?;
    let hb = p.b.symmetric_part()?;
    let sa = p.a.sub(&ha)?;
    let sb = p.b.sub(&hb)?;

    let alpha = match cfg.alpha {
        Some(a) => a,
        None => {
            let (la_min, la_max) = symmetric_extremes_for_shift(&ha)?;
            let (lb_min, lb_max) = symmetric_extremes_for_shift(&hb)?;
            let lmin = la_min + lb_min;
            let lmax = la_max + lb_max;
            if lmin <= 0.0 {
                return Err(Error::NotSpd(format!(
                    "HSS shift estimate needs a positive definite Hermitian part; \
                     lambda_min sum = {lmin:e}"
                )));
            }
            (lmin * lmax).sqrt()
        }
    };

    let m1 = ha.add_scaled_identity(alpha / 2.0)?;
    let p1 = hb.add_scaled_identity(alpha / 2.0)?;
    let skew_is_zero = sa.max_abs() == 0.0 && sb.max_abs() == 0.0;

    let skew_op = |v: &[f64]| -> Vec<f64> {
        let x = DenseMatrix::from_vec(n, m, v.to_vec());
        let mut y = sa.mul_left(&x);
        y.axpy(1.0, &sb.mul_right(&x));
        let mut out = y.into_vec();
        for (o, vi) in out.iter_mut().zip(v) {
            *o += alpha * vi;
        }
        out
    };

    let norm_c = p.c.frobenius_norm();
    let denom = if norm_c > 0.0 { norm_c } else { 1.0 };
    let mut x = DenseMatrix::zeros(n, m);
    let mut rel = sylvester_residual(p, &x)?.frobenius_norm() / denom;
    let mut history = vec![rel];
    let mut total_inner = 0usize;
    let mut outer = 0usize;
    let outer_tol = cfg.outer_tol;

    while rel > outer_tol && outer < cfg.max_outer {
        if !rel.is_finite() || rel > DIVERGENCE_GUARD {
            return Err(Error::Divergence {
                outer_step: outer,
                residual: rel,
            });
        }

        // (alpha/2 I + H_A) X' + X' (alpha/2 I + H_B) = alpha X - S_A X - X S_B + C
        let mut g1 = x.scale(alpha);
        g1.axpy(-1.0, &sa.mul_left(&x));
        g1.axpy(-1.0, &sb.mul_right(&x));
        g1.axpy(1.0, &p.c);
        let cg = cg_sylvester_solve(&m1, &p1, &g1, &cfg.inner, &x).map_err(|e| {
            Error::InnerSolve {
                outer_step: outer,
                source: Box::new(e),
            }
        })?;
        total_inner += cg.iters;
        let xp = cg.x;

        // alpha X'' + S_A X'' + X'' S_B = alpha X' - H_A X' - X' H_B + C
        let mut g2 = xp.scale(alpha);
        g2.axpy(-1.0, &ha.mul_left(&xp));
        g2.axpy(-1.0, &hb.mul_right(&xp));
        g2.axpy(1.0, &p.c);
        let x_next = if skew_is_zero {
            g2.scale(1.0 / alpha)
        } else {
            let b2 = g2.as_vec();
            let mut r0 = b2.to_vec();
            let ax0 = skew_op(xp.as_vec());
            axpy(&mut r0, -1.0, &ax0);
            let nr0 = norm(&r0);
            if nr0 == 0.0 {
                xp.clone()
            } else {
                let outcome = gmres_restarted(
                    &skew_op,
                    b2,
                    Some(xp.as_vec()),
                    cfg.inner.tol * nr0,
                    nr0,
                    10,
                    cfg.inner.max_iters.max(10),
                );
                total_inner += outcome.steps;
                DenseMatrix::from_vec(n, m, outcome.x)
            }
        };

        x = x_next;
        rel = sylvester_residual(p, &x)?.frobenius_norm() / denom;
        history.push(rel);
        outer += 1;
    }

    let report = SolveReport {
        outer_iters: outer,
        total_inner_iters: total_inner,
        converged: rel <= outer_tol,
        residual_history: history,
        wall_seconds: clock.seconds(),
        failure: None,
    };
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csr::CsrMatrix;
    use crate::inner::dense_direct_solve;

    fn identity_problem(n: usize) -> SylvesterProblem {
        SylvesterProblem::new(
            Matrix::Dense(DenseMatrix::identity(n)),
            Matrix::Dense(DenseMatrix::identity(n)),
            DenseMatrix::ones(n, n).scale(2.0),
        )
        .unwrap()
    }

    fn random_dominant(rng: &mut impl rand::Rng, n: usize) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    a.set(i, j, rng.random_range(-0.5..0.5));
                }
            }
        }
        for i in 0..n {
            let row_sum: f64 = (0..n).filter(|&j| j != i).map(|j| a.get(i, j).abs()).sum();
            let col_sum: f64 = (0..n).filter(|&j| j != i).map(|j| a.get(j, i).abs()).sum();
            a.set(i, i, row_sum.max(col_sum) + rng.random_range(0.5..1.5));
        }
        a
    }

    fn random_problem(seed: u64, n: usize, m: usize) -> SylvesterProblem {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = random_dominant(&mut rng, n);
        let b = random_dominant(&mut rng, m);
        let mut c = DenseMatrix::zeros(n, m);
        for j in 0..m {
            for i in 0..n {
                c.set(i, j, rng.random_range(-1.0..1.0));
            }
        }
        SylvesterProblem::new(Matrix::Dense(a), Matrix::Dense(b), c).unwrap()
    }

    #[test]
    fn gmres_identity_converges_in_one_step() {
        let p = identity_problem(3);
        let (x, report) = gmres_kron_solve(&p, &KrylovConfig::default()).unwrap();
        assert!(report.converged);
        assert_eq!(report.outer_iters, 1);
        assert_eq!(report.total_inner_iters, 1);
        assert!(x.approx_eq(&DenseMatrix::ones(3, 3), 1e-10));
    }

    #[test]
    fn bicgstab_identity_converges_in_one_step() {
        let p = identity_problem(3);
        let (x, report) = bicgstab_kron_solve(&p, &KrylovConfig::default()).unwrap();
        assert!(report.converged);
        assert_eq!(report.outer_iters, 1);
        assert!(x.approx_eq(&DenseMatrix::ones(3, 3), 1e-10));
    }

    #[test]
    fn krylov_methods_match_oracle() {
        let p = random_problem(5, 6, 5);
        let cfg = KrylovConfig {
            tol: 1e-10,
            ..KrylovConfig::default()
        };
        let oracle = dense_direct_solve(&p).unwrap();
        let on = oracle.frobenius_norm();
        let (xg, rg) = gmres_kron_solve(&p, &cfg).unwrap();
        assert!(rg.converged);
        assert!((&xg - &oracle).frobenius_norm() / on <= 1e-6);
        let (xb, rb) = bicgstab_kron_solve(&p, &cfg).unwrap();
        assert!(rb.converged);
        assert!((&xb - &oracle).frobenius_norm() / on <= 1e-6);
    }

    #[test]
    fn hss_matches_oracle() {
        let p = random_problem(9, 5, 6);
        let cfg = HssConfig {
            inner: InnerConfig {
                tol: 1e-10,
                max_iters: 100_000,
            },
            ..HssConfig::default()
        };
        let oracle = dense_direct_solve(&p).unwrap();
        let (x, report) = hss_solve(&p, &cfg).unwrap();
        assert!(report.converged);
        assert!((&x - &oracle).frobenius_norm() / oracle.frobenius_norm() <= 1e-6);
    }

    #[test]
    fn hss_symmetric_problem_uses_closed_form_second_half() {
        let t = CsrMatrix::tridiagonal(6, -1.0, 3.0, -1.0);
        let p = SylvesterProblem::new(
            Matrix::Sparse(t.clone()),
            Matrix::Sparse(t),
            DenseMatrix::ones(6, 6),
        )
        .unwrap();
        let (x, report) = hss_solve(&p, &HssConfig::default()).unwrap();
        assert!(report.converged);
        let r = sylvester_residual(&p, &x).unwrap().frobenius_norm();
        assert!(r <= 1e-7 * p.c.frobenius_norm());
    }

    #[test]
    fn hss_residual_decreases_near_optimal_alpha() {
        let t = CsrMatrix::tridiagonal(12, -1.0, 2.2, -1.0);
        let p = SylvesterProblem::new(
            Matrix::Sparse(t.clone()),
            Matrix::Sparse(t),
            DenseMatrix::ones(12, 12),
        )
        .unwrap();
        let (la_min, la_max) =
            symmetric_extremes_for_shift(&p.a.symmetric_part().unwrap()).unwrap();
        let optimal = (2.0 * la_min * 2.0 * la_max).sqrt();
        for factor in [0.5, 1.0, 2.0, 4.0] {
            let cfg = HssConfig {
                alpha: Some(optimal * factor),
                max_outer: 500,
                ..HssConfig::default()
            };
            let (_, report) = hss_solve(&p, &cfg).unwrap();
            assert!(report.converged, "alpha factor {factor} did not converge");
            for w in report.residual_history.windows(2) {
                assert!(
                    w[1] <= w[0] * (1.0 + 1e-9),
                    "history not monotone at alpha factor {factor}"
                );
            }
        }
    }

    #[test]
    fn gmres_estimates_non_increasing_within_cycle() {
        let p = random_problem(13, 5, 5);
        let op = kron_operator(&p);
        let b = p.c.as_vec();
        let nb = norm(b);
        let outcome = gmres_restarted(&op, b, None, 1e-10 * nb, nb, 25, 25);
        for w in outcome.step_estimates.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn bicgstab_breakdown_is_reported() {
        // A = 0 (1x1) and B a rotation generator make the Kronecker operator
        // skew, so the shadow inner product vanishes at the first step.
        let p = SylvesterProblem::new(
            Matrix::Dense(DenseMatrix::from_row_slice(1, 1, &[0.0])),
            Matrix::Dense(DenseMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])),
            DenseMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
        )
        .unwrap();
        let (_, report) = bicgstab_kron_solve(&p, &KrylovConfig::default()).unwrap();
        assert!(!report.converged);
        assert_eq!(report.failure.as_deref(), Some("breakdown"));
    }

    #[test]
    fn power_iteration_extremes_match_dense_path() {
        // Compare the large-scale estimator against the dense eigensolve.
        let t = Matrix::Sparse(CsrMatrix::tridiagonal(40, -1.0, 2.5, -1.0));
        let (exact_min, exact_max) = symmetric_extremes_for_shift(&t).unwrap();
        // Force the power-iteration path by calling the internals directly on
        // a matrix beyond the dense guard is too costly here; instead check
        // the dense values against the closed form for tridiag(-1, d, -1).
        let d = 2.5;
        let lo = d - 2.0 * (std::f64::consts::PI / 41.0).cos();
        let hi = d + 2.0 * (std::f64::consts::PI / 41.0).cos();
        assert!((exact_min - lo).abs() <= 1e-10);
        assert!((exact_max - hi).abs() <= 1e-10);
    }
}
