//! `minirat`: run solves, reproduce the benchmark tables, evaluate stored
//! approximants.

mod io;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use minirat::solvers::{d_lawson_seeded, solve};
use minirat::{
    generate_nodes, sample, Approximant, FunctionId, Method, NodeScheme, SampleSet, SimplexWeights,
    SolveError, SolverConfig,
};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "minirat", version, about = "Discrete rational minimax approximation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one approximation problem and write trace, error curve,
    /// certificate and approximant.
    Solve(SolveArgs),
    /// Reproduce a benchmark table (t1..t8) as CSV.
    Table(TableArgs),
    /// Evaluate a stored approximant at new nodes.
    Eval(EvalArgs),
}

#[derive(Args, Clone)]
struct SolverArgs {
    #[arg(long, default_value = "dlawson")]
    method: String,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long = "eps-r", default_value_t = 1e-5)]
    eps_r: f64,
    #[arg(long = "eps-w", default_value_t = 1e-40)]
    eps_w: f64,
    #[arg(long, default_value_t = 40)]
    maxit: usize,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, CliError> {
        let method = Method::parse(&self.method)
            .ok_or_else(|| CliError::Config(format!("unknown method `{}`", self.method)))?;
        let cfg = SolverConfig {
            beta: self.beta,
            eps_r: self.eps_r,
            eps_w: self.eps_w,
            k_max: self.maxit,
            method,
            deterministic_reduction: true,
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Benchmark function f1..f8. Optional with a `file:` scheme that
    /// carries f values.
    #[arg(long)]
    func: Option<String>,
    /// equispaced:A:B:M, unit_circle:M, half_circle:M, tanh_arc:M or file:PATH.
    /// Defaults to the function's benchmark scheme with M = 2000.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, num_args = 2, value_names = ["N1", "N2"], required = true)]
    deg: Vec<usize>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
    /// CSV of nodes (re, im columns) to evaluate the approximant at.
    #[arg(long)]
    eval: Option<PathBuf>,
    /// Initial weights, one per node (d-Lawson only).
    #[arg(long = "seed-weights")]
    seed_weights: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// t1..t8
    id: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Approximant JSON written by `solve`.
    #[arg(long)]
    approx: PathBuf,
    /// CSV of nodes (re, im columns).
    #[arg(long)]
    nodes: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Aborted(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Aborted(_) => 2,
            CliError::Mismatch(_) => 3,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Table(a) => table::cmd_table(&a.id, a.out.as_deref(), &a.solver),
        Command::Eval(a) => cmd_eval(&a.approx, &a.nodes, a.out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("MINIRAT_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!("MINIRAT_THREADS must be a positive integer, got `{v}`"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn load_samples(func: Option<&str>, scheme: Option<&str>) -> Result<SampleSet, CliError> {
    let fid = match func {
        Some(name) => Some(FunctionId::from_name(name).ok_or_else(|| {
            CliError::Config(format!("unknown function `{name}` (expected f1..f8)"))
        })?),
        None => None,
    };
    if let Some(path) = scheme.and_then(|s| s.strip_prefix("file:")) {
        let path = Path::new(path);
        let (x, f) = io::read_samples(path)?;
        let values = match (&fid, f) {
            (Some(fid), _) => return sample(fid, &x).map_err(|e| CliError::Config(e.to_string())),
            (None, Some(f)) => f,
            (None, None) => {
                return Err(CliError::Config(format!(
                    "{}: no f_re/f_im columns and no --func given",
                    path.display()
                )))
            }
        };
        return SampleSet::new(x, values).map_err(|e| CliError::Config(e.to_string()));
    }
    let fid = fid.ok_or_else(|| {
        CliError::Config("--func is required unless --scheme file:PATH carries values".into())
    })?;
    let scheme = match scheme {
        Some(s) => NodeScheme::parse(s).map_err(CliError::Config)?,
        None => fid.default_scheme(2000).expect("benchmark functions have a scheme"),
    };
    let x = generate_nodes(&scheme).map_err(|e| CliError::Config(e.to_string()))?;
    sample(&fid, &x).map_err(|e| CliError::Config(e.to_string()))
}

fn cmd_solve(a: SolveArgs) -> Result<(), CliError> {
    let cfg = a.solver.config()?;
    let (n1, n2) = (a.deg[0], a.deg[1]);
    let samples = load_samples(a.func.as_deref(), a.scheme.as_deref())?;
    if samples.len() < n1 + n2 + 2 {
        return Err(CliError::Config(format!(
            "type ({n1}, {n2}) needs at least {} nodes, got {}",
            n1 + n2 + 2,
            samples.len()
        )));
    }
    let seed = match &a.seed_weights {
        Some(path) => {
            if cfg.method != Method::DLawson {
                return Err(CliError::Config("--seed-weights only applies to dlawson".into()));
            }
            let w = io::read_weights(path)?;
            if w.len() != samples.len() {
                return Err(CliError::Config(format!(
                    "{}: {} weights for {} nodes",
                    path.display(),
                    w.len(),
                    samples.len()
                )));
            }
            Some(
                SimplexWeights::new(w)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let eval_nodes = match &a.eval {
        Some(path) => Some(io::read_nodes(path)?),
        None => None,
    };
    std::fs::create_dir_all(&a.out_dir).map_err(|e| CliError::io(&a.out_dir, e))?;

    let result = match seed {
        Some(w0) => d_lawson_seeded(&samples, n1, n2, &cfg, w0),
        None => solve(&samples, n1, n2, &cfg),
    };
    let out = match result {
        Ok(out) => out,
        Err(SolveError::Aborted { source, trace }) => {
            io::write_trace(&a.out_dir.join("trace.csv"), &trace)?;
            return Err(CliError::Aborted(format!(
                "solver aborted after {} iterations: {source} (partial trace written)",
                trace.records.len()
            )));
        }
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    io::write_trace(&a.out_dir.join("trace.csv"), &out.trace)?;
    let xi = out.approximant.evaluate(samples.x());
    io::write_error_curve(&a.out_dir.join("error_curve.csv"), &samples, &xi)?;
    if let Some(cert) = &out.certificate {
        io::write_json(&a.out_dir.join("certificate.json"), cert)?;
    }
    io::write_json(&a.out_dir.join("approximant.json"), &out.approximant)?;
    if let Some(y) = eval_nodes {
        io::write_eval(&a.out_dir.join("eval.csv"), &y, &out.approximant.evaluate(&y))?;
    }
    let best = out.trace.best().expect("non-empty trace");
    eprintln!(
        "{} ({n1},{n2}): max_err {:.6e}, gap {:.6e}, {} iterations",
        cfg.method.name(),
        best.max_err,
        best.gap,
        out.trace.records.len()
    );
    Ok(())
}

fn cmd_eval(approx: &Path, nodes: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(approx).map_err(|e| CliError::io(approx, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", approx.display())))?;
    let a: Approximant = serde_json::from_value(value)
        .map_err(|e| CliError::Mismatch(format!("{}: {e}", approx.display())))?;
    if a.recurrence_p.rank() > a.n1 + 1 || a.recurrence_q.rank() > a.n2 + 1 {
        return Err(CliError::Mismatch(format!(
            "{}: recurrence ranks ({}, {}) exceed type ({}, {})",
            approx.display(),
            a.recurrence_p.rank(),
            a.recurrence_q.rank(),
            a.n1,
            a.n2
        )));
    }
    let y = io::read_nodes(nodes)?;
    let xi = a.evaluate(&y);
    match out {
        Some(path) => io::write_eval(path, &y, &xi),
        None => io::write_eval_to(std::io::stdout().lock(), &y, &xi)
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}
