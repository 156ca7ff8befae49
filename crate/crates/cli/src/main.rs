//! `sylvbench`: generate Sylvester benchmark problems, solve them with one
//! method, run the full method comparison, or emit the convergence-bound
//! report.

use std::error::Error;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use sylvsolve::baselines::{bicgstab_kron_solve, gmres_kron_solve, hss_solve, HssConfig, KrylovConfig};
use sylvsolve::bench::{
    emit_report, gen_example1, gen_example2, load_example3, run_bench, BenchCase, Example3,
    MethodConfigs, MethodId, ReportFormat, EXAMPLE2_DEFAULT_N, EXAMPLE2_DEFAULT_R,
    EXAMPLE2_DEFAULT_T,
};
use sylvsolve::dense::DenseMatrix;
use sylvsolve::inner::InnerConfig;
use sylvsolve::matrix::{Matrix, SylvesterProblem};
use sylvsolve::mm::{read_dense, read_matrix_market, write_array, write_coordinate};
use sylvsolve::msi::{msi_solve_hs_jacobi, MsiConfig, MsiSplittings};
use sylvsolve::theory::msi_bound_check;

#[derive(Parser)]
#[command(
    name = "sylvbench",
    about = "Iterative solvers and benchmarks for the Sylvester equation AX + XB = C",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark problem and write it as Matrix Market files.
    Gen(GenArgs),
    /// Solve one problem with one method and print the JSON report.
    Solve(SolveArgs),
    /// Run an example across methods and write CSV/JSON/history reports.
    Bench(BenchArgs),
    /// Print the convergence-bound report for the HS + Jacobi splittings.
    Bound(BoundArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Generated example id (1, 2 or 3).
    #[arg(long)]
    example: Option<u8>,
    /// Problem size for generated examples.
    #[arg(long)]
    n: Option<usize>,
    /// Example 1/2 parameter r.
    #[arg(long)]
    r: Option<f64>,
    /// Example 2 parameter t.
    #[arg(long)]
    t: Option<f64>,
    /// Directory with A.mtx, B.mtx and C.mtx instead of a generated example.
    #[arg(long, conflicts_with = "example")]
    dir: Option<PathBuf>,
    /// Path to the example-3 coefficient matrix (Matrix Market).
    #[arg(long, default_value = "data/sherman3.mtx")]
    sherman3: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Output directory for A.mtx, B.mtx, C.mtx.
    #[arg(long, default_value = "problem-out")]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Method: msi, hss, gmres or bicgstab.
    #[arg(long, default_value = "msi")]
    method: String,
    #[command(flatten)]
    solver: SolverFlags,
    /// JSON config file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Example id (1, 2 or 3).
    #[arg(long)]
    example: u8,
    /// Comma-separated sizes (example 1 and 2).
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Comma-separated methods; defaults to all of them.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Output directory for the report files.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
    /// Path to the example-3 coefficient matrix.
    #[arg(long, default_value = "data/sherman3.mtx")]
    sherman3: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
    /// JSON config file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    problem: ProblemArgs,
}

#[derive(Args, Clone, Default)]
struct SolverFlags {
    /// Outer stopping tolerance (relative residual).
    #[arg(long)]
    outer_tol: Option<f64>,
    /// Inner solve tolerance.
    #[arg(long)]
    inner_tol: Option<f64>,
    /// Outer iteration cap.
    #[arg(long)]
    max_outer: Option<usize>,
    /// HSS shift parameter.
    #[arg(long)]
    alpha: Option<f64>,
    /// GMRES restart length.
    #[arg(long)]
    restart: Option<usize>,
}

/// File-based configuration mirroring the flags. Flags override these values.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    outer_tol: Option<f64>,
    inner_tol: Option<f64>,
    max_outer: Option<usize>,
    alpha: Option<f64>,
    restart: Option<usize>,
    methods: Option<Vec<String>>,
    sizes: Option<Vec<usize>>,
}

fn load_file_config(path: &Option<PathBuf>) -> Result<FileConfig, Box<dyn Error>> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn merge_configs(flags: &SolverFlags, file: &FileConfig) -> MethodConfigs {
    let outer_tol = flags.outer_tol.or(file.outer_tol).unwrap_or(1e-8);
    let inner_tol = flags.inner_tol.or(file.inner_tol).unwrap_or(0.01);
    let max_outer = flags.max_outer.or(file.max_outer).unwrap_or(5000);
    let alpha = flags.alpha.or(file.alpha);
    let restart = flags.restart.or(file.restart).unwrap_or(10);
    let inner = InnerConfig {
        tol: inner_tol,
        max_iters: 100_000,
    };
    MethodConfigs {
        msi: MsiConfig {
            outer_tol,
            inner: inner.clone(),
            max_outer,
            ..MsiConfig::default()
        },
        hss: HssConfig {
            alpha,
            inner,
            max_outer,
            outer_tol,
        },
        krylov: KrylovConfig {
            tol: outer_tol,
            restart,
            max_iters: 100_000,
        },
    }
}

struct LoadedProblem {
    problem: SylvesterProblem,
    name: String,
    example: Option<u8>,
    r: Option<f64>,
    t: Option<f64>,
    exact_solution: Option<DenseMatrix>,
}

fn load_problem(args: &ProblemArgs) -> Result<Option<LoadedProblem>, Box<dyn Error>> {
    if let Some(dir) = &args.dir {
        let a = Matrix::Sparse(read_matrix_market(dir.join("A.mtx"))?);
        let b = Matrix::Sparse(read_matrix_market(dir.join("B.mtx"))?);
        let c = read_dense(dir.join("C.mtx"))?;
        return Ok(Some(LoadedProblem {
            problem: SylvesterProblem::new(a, b, c)?,
            name: format!("dir-{}", dir.display()),
            example: None,
            r: None,
            t: None,
            exact_solution: None,
        }));
    }
    let example = args.example.unwrap_or(1);
    match example {
        1 => {
            let n = args.n.unwrap_or(32);
            let r = args.r.unwrap_or(0.01);
            let problem = gen_example1(n, r);
            let ones = DenseMatrix::ones(n, n);
            Ok(Some(LoadedProblem {
                problem,
                name: format!("example1-n{n}"),
                example: Some(1),
                r: Some(r),
                t: None,
                exact_solution: Some(ones),
            }))
        }
        2 => {
            let n = args.n.unwrap_or(EXAMPLE2_DEFAULT_N);
            let r = args.r.unwrap_or(EXAMPLE2_DEFAULT_R);
            let t = args.t.unwrap_or(EXAMPLE2_DEFAULT_T);
            let problem = gen_example2(n, r, t);
            let ones = DenseMatrix::ones(n, n);
            Ok(Some(LoadedProblem {
                problem,
                name: format!("example2-n{n}"),
                example: Some(2),
                r: Some(r),
                t: Some(t),
                exact_solution: Some(ones),
            }))
        }
        3 => match load_example3(&args.sherman3)? {
            Example3::Loaded { problem, order, nnz } => {
                eprintln!("loaded example-3 matrix: order {order}, nnz {nnz}");
                let ones = DenseMatrix::ones(order, 8);
                Ok(Some(LoadedProblem {
                    problem: *problem,
                    name: format!("example3-n{order}"),
                    example: Some(3),
                    r: None,
                    t: None,
                    exact_solution: Some(ones),
                }))
            }
            Example3::Skipped { path } => {
                eprintln!(
                    "skipped: data not present at {} (download the example-3 matrix there)",
                    path.display()
                );
                Ok(None)
            }
        },
        other => Err(format!("unknown example {other}; expected 1, 2 or 3").into()),
    }
}

fn parse_methods(list: &Option<Vec<String>>, file: &FileConfig) -> Result<Vec<MethodId>, Box<dyn Error>> {
    let chosen = list.clone().or_else(|| file.methods.clone());
    match chosen {
        None => Ok(MethodId::ALL.to_vec()),
        Some(names) => names
            .iter()
            .map(|s| MethodId::from_str(s).map_err(|e| e.into()))
            .collect(),
    }
}

fn write_problem(problem: &SylvesterProblem, out: &Path) -> Result<(), Box<dyn Error>> {
    std::fs::create_dir_all(out)?;
    let write_matrix = |m: &Matrix, path: PathBuf| -> Result<(), Box<dyn Error>> {
        match m {
            Matrix::Sparse(s) => write_coordinate(s, &path)?,
            Matrix::Dense(d) => write_array(d, &path)?,
            Matrix::Diagonal(_) => write_array(&m.to_dense(), &path)?,
        }
        println!("wrote {}", path.display());
        Ok(())
    };
    write_matrix(&problem.a, out.join("A.mtx"))?;
    write_matrix(&problem.b, out.join("B.mtx"))?;
    write_array(&problem.c, out.join("C.mtx"))?;
    println!("wrote {}", out.join("C.mtx").display());
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), Box<dyn Error>> {
    match load_problem(&args.problem)? {
        Some(loaded) => write_problem(&loaded.problem, &args.out),
        None => Ok(()),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), Box<dyn Error>> {
    let file = load_file_config(&args.config)?;
    let configs = merge_configs(&args.solver, &file);
    let Some(loaded) = load_problem(&args.problem)? else {
        return Ok(());
    };
    let method = MethodId::from_str(&args.method)?;
    let (x, report) = match method {
        MethodId::Msi => msi_solve_hs_jacobi(&loaded.problem, &configs.msi)?,
        MethodId::Hss => hss_solve(&loaded.problem, &configs.hss)?,
        MethodId::Gmres => gmres_kron_solve(&loaded.problem, &configs.krylov)?,
        MethodId::Bicgstab => bicgstab_kron_solve(&loaded.problem, &configs.krylov)?,
    };
    eprintln!(
        "{} on {}: converged={} outer={} total_inner={} final_rel_residual={:e} ({:.3} s)",
        method.display_name(),
        loaded.name,
        report.converged,
        report.outer_iters,
        report.total_inner_iters,
        report.residual_history.last().copied().unwrap_or(f64::NAN),
        report.wall_seconds,
    );
    if let Some(exact) = &loaded.exact_solution {
        eprintln!(
            "forward error vs exact solution: {:e}",
            (&x - exact).frobenius_norm() / exact.frobenius_norm()
        );
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Box<dyn Error>> {
    let file = load_file_config(&args.config)?;
    let configs = merge_configs(&args.solver, &file);
    let methods = parse_methods(&args.methods, &file)?;
    std::fs::create_dir_all(&args.out)?;

    let sizes: Vec<Option<usize>> = match args.example {
        1 => args
            .sizes
            .clone()
            .or_else(|| file.sizes.clone())
            .unwrap_or_else(|| vec![32, 64])
            .into_iter()
            .map(Some)
            .collect(),
        2 => args
            .sizes
            .clone()
            .or_else(|| file.sizes.clone())
            .unwrap_or_else(|| vec![EXAMPLE2_DEFAULT_N])
            .into_iter()
            .map(Some)
            .collect(),
        3 => vec![None],
        other => return Err(format!("unknown example {other}").into()),
    };

    for size in sizes {
        let problem_args = ProblemArgs {
            example: Some(args.example),
            n: size,
            r: None,
            t: None,
            dir: None,
            sherman3: args.sherman3.clone(),
        };
        let Some(loaded) = load_problem(&problem_args)? else {
            continue;
        };
        let case = BenchCase {
            name: loaded.name.clone(),
            problem: loaded.problem,
            methods: methods.clone(),
            configs: configs.clone(),
            exact_solution: loaded.exact_solution,
            example: loaded.example,
            r: loaded.r,
            t: loaded.t,
        };
        eprintln!("running case {} ...", case.name);
        let report = run_bench(&case);
        let base = args.out.join(&case.name);
        emit_report(&report, ReportFormat::Csv, base.with_extension("table.csv"))?;
        emit_report(&report, ReportFormat::Json, base.with_extension("json"))?;
        emit_report(
            &report,
            ReportFormat::HistoryCsv,
            base.with_extension("history.csv"),
        )?;
        println!(
            "{}",
            sylvsolve::bench::render_csv(&report).trim_end_matches('\n')
        );
        println!("reports written to {}.{{table.csv,json,history.csv}}", base.display());
    }
    Ok(())
}

fn cmd_bound(args: BoundArgs) -> Result<(), Box<dyn Error>> {
    let Some(loaded) = load_problem(&args.problem)? else {
        return Ok(());
    };
    let splittings = MsiSplittings::hs_jacobi(&loaded.problem)?;
    let report = msi_bound_check(&splittings)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Bound(args) => cmd_bound(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
