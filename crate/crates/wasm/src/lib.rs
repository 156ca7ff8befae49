//! Browser bindings for the Sylvester solvers. Three operations back the
//! demo page: a method comparison returning residual histories, the
//! convergence-bound report, and a small-scale comparison of the certificate
//! against the exact iteration-matrix spectral radius.
//!
//! All entry points return JSON strings; errors come back as
//! `{"error": "..."}` so the page can render them inline.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use sylvsolve::baselines::{bicgstab_kron_solve, gmres_kron_solve, hss_solve, HssConfig, KrylovConfig};
use sylvsolve::bench::{gen_example1, gen_example2};
use sylvsolve::dense::DenseMatrix;
use sylvsolve::inner::InnerConfig;
use sylvsolve::matrix::SylvesterProblem;
use sylvsolve::msi::{msi_solve_hs_jacobi, MsiConfig, MsiSplittings, SolveReport};
use sylvsolve::theory::{iteration_matrix_rho, msi_bound_check, splitting_spectra};

/// Browser-side problem size cap; beyond this the page would freeze.
const MAX_DEMO_N: usize = 256;
const MAX_RHO_PRODUCT: usize = 1024;

fn build_problem(example: u32, n: usize, r: f64, t: f64) -> Result<SylvesterProblem, String> {
    if !(2..=MAX_DEMO_N).contains(&n) {
        return Err(format!("n must lie in [2, {MAX_DEMO_N}] for the demo"));
    }
    match example {
        1 => Ok(gen_example1(n, r)),
        2 => Ok(gen_example2(n, r, t)),
        other => Err(format!("unknown example {other}; the demo generates 1 or 2")),
    }
}

fn err_json(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

#[derive(Serialize)]
struct MethodRun {
    method: String,
    converged: bool,
    outer_iters: usize,
    total_inner_iters: usize,
    final_rel_residual: f64,
    forward_error: f64,
    history: Vec<f64>,
    failure: Option<String>,
}

fn to_run(name: &str, report: SolveReport, x: &DenseMatrix, exact: &DenseMatrix) -> MethodRun {
    MethodRun {
        method: name.to_string(),
        converged: report.converged,
        outer_iters: report.outer_iters,
        total_inner_iters: report.total_inner_iters,
        final_rel_residual: report.residual_history.last().copied().unwrap_or(f64::NAN),
        forward_error: (x - exact).frobenius_norm() / exact.frobenius_norm(),
        history: report.residual_history,
        failure: report.failure,
    }
}

/// Runs the requested methods (comma-separated: msi,hss,gmres,bicgstab) on a
/// generated example and returns the residual histories.
#[wasm_bindgen]
pub fn run_benchmark(example: u32, n: u32, r: f64, t: f64, methods: &str, outer_tol: f64) -> String {
    let problem = match build_problem(example, n as usize, r, t) {
        Ok(p) => p,
        Err(e) => return err_json(e),
    };
    if !(outer_tol > 0.0 && outer_tol < 1.0) {
        return err_json("outer tolerance must lie in (0, 1)");
    }
    let exact = DenseMatrix::ones(problem.n(), problem.m());
    let msi_cfg = MsiConfig {
        outer_tol,
        ..MsiConfig::default()
    };
    let hss_cfg = HssConfig {
        inner: InnerConfig::default(),
        outer_tol,
        ..HssConfig::default()
    };
    let krylov_cfg = KrylovConfig {
        tol: outer_tol,
        ..KrylovConfig::default()
    };

    let mut runs = Vec::new();
    for raw in methods.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let outcome = match raw.to_lowercase().as_str() {
            "msi" => msi_solve_hs_jacobi(&problem, &msi_cfg).map(|(x, rep)| (x, rep, "MSI")),
            "hss" => hss_solve(&problem, &hss_cfg).map(|(x, rep)| (x, rep, "HSS")),
            "gmres" => {
                gmres_kron_solve(&problem, &krylov_cfg).map(|(x, rep)| (x, rep, "GMRES(10)"))
            }
            "bicgstab" => {
                bicgstab_kron_solve(&problem, &krylov_cfg).map(|(x, rep)| (x, rep, "BiCGSTAB"))
            }
            other => return err_json(format!("unknown method {other:?}")),
        };
        match outcome {
            Ok((x, rep, name)) => runs.push(to_run(name, rep, &x, &exact)),
            Err(e) => runs.push(MethodRun {
                method: raw.to_uppercase(),
                converged: false,
                outer_iters: 0,
                total_inner_iters: 0,
                final_rel_residual: f64::NAN,
                forward_error: f64::NAN,
                history: vec![],
                failure: Some(e.to_string()),
            }),
        }
    }

    serde_json::json!({
        "example": example,
        "n": problem.n(),
        "m": problem.m(),
        "r": r,
        "t": if example == 2 { Some(t) } else { None },
        "outer_tol": outer_tol,
        "runs": runs,
    })
    .to_string()
}

/// Convergence-bound report (theta, varrho, product) for the HS + Jacobi
/// splittings of a generated example, with the underlying spectra.
#[wasm_bindgen]
pub fn convergence_bound(example: u32, n: u32, r: f64, t: f64) -> String {
    let problem = match build_problem(example, n as usize, r, t) {
        Ok(p) => p,
        Err(e) => return err_json(e),
    };
    let splittings = match MsiSplittings::hs_jacobi(&problem) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let report = match msi_bound_check(&splittings) {
        Ok(rep) => rep,
        Err(e) => return err_json(e),
    };
    let s1 = splitting_spectra(&splittings.a1, &splittings.b1).ok();
    let s2 = splitting_spectra(&splittings.a2, &splittings.b2).ok();
    serde_json::json!({
        "example": example,
        "n": problem.n(),
        "bound": report,
        "spectra_hs": s1,
        "spectra_jacobi": s2,
    })
    .to_string()
}

/// Exact spectral radius of the composite iteration matrix against the
/// certificate product, at oracle scale. Shows that the certificate is
/// sufficient but not necessary.
#[wasm_bindgen]
pub fn iteration_matrix_check(example: u32, n: u32, r: f64, t: f64) -> String {
    let n = n as usize;
    if n * n > MAX_RHO_PRODUCT {
        return err_json(format!(
            "iteration-matrix check assembles an (n*n)^2 operator; need n <= {}",
            (MAX_RHO_PRODUCT as f64).sqrt() as usize
        ));
    }
    let problem = match build_problem(example, n, r, t) {
        Ok(p) => p,
        Err(e) => return err_json(e),
    };
    let splittings = match MsiSplittings::hs_jacobi(&problem) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let bound = match msi_bound_check(&splittings) {
        Ok(b) => b,
        Err(e) => return err_json(e),
    };
    let rho = match iteration_matrix_rho(&splittings) {
        Ok(v) => v,
        Err(e) => return err_json(e),
    };
    serde_json::json!({
        "example": example,
        "n": n,
        "rho": rho,
        "product": bound.product,
        "certificate_predicts": bound.predicts_convergence,
        "iteration_converges": rho < 1.0,
    })
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_json_has_runs() {
        let out = run_benchmark(1, 16, 0.01, 0.0, "msi,gmres", 1e-8);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "unexpected error: {out}");
        let runs = v["runs"].as_array().unwrap();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0]["method"], "MSI");
        assert!(runs[0]["converged"].as_bool().unwrap());
        assert!(runs[0]["history"].as_array().unwrap().len() >= 2);
    }

    #[test]
    fn bound_json_matches_library() {
        let out = convergence_bound(1, 32, 0.01, 0.0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["bound"]["product"].as_f64().unwrap() - 48.356).abs() < 0.05);
        assert_eq!(v["bound"]["predicts_convergence"], false);
    }

    #[test]
    fn rho_check_reports_sufficiency_gap() {
        let out = iteration_matrix_check(1, 16, 0.01, 0.0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["rho"].as_f64().unwrap() < 1.0);
        assert_eq!(v["certificate_predicts"], false);
        assert_eq!(v["iteration_converges"], true);
    }

    #[test]
    fn oversized_requests_error_cleanly() {
        let out = run_benchmark(1, 4096, 0.01, 0.0, "msi", 1e-8);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_some());
    }
}
