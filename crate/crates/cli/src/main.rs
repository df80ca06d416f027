use clap::{Args, Parser, Subcommand};
use pointspec::Error;
use std::process::ExitCode;
use std::time::Instant;

mod commands;
mod output;

/// Spectral analysis of 1D Schrödinger operators with nonlocal point interactions.
///
/// Reports are JSON on stdout (complex numbers as [re, im]); errors are a
/// JSON object on stderr. Exit codes: 0 ok, 2 parse/validation, 3 numerical
/// failure, 4 resolution or degenerate family.
#[derive(Debug, Parser)]
#[command(name = "pointspec", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Model document (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    pub model: Option<std::path::PathBuf>,
    /// Absolute tolerance for quadrature-backed values.
    #[arg(long, global = true, default_value_t = pointspec::DEFAULT_TOL)]
    pub tol: f64,
    /// k-plane search rectangle.
    #[arg(
        long,
        global = true,
        value_name = "KRMIN,KRMAX,KIMIN,KIMAX",
        allow_hyphen_values = true
    )]
    pub region: Option<String>,
    /// Grid size (meaning depends on the command).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Cross-check results with the finite-difference oracle.
    #[arg(long, global = true)]
    pub verify: bool,
    /// CSV instead of JSON (grid commands).
    #[arg(long, global = true)]
    pub csv: bool,
    /// Worker threads for grid-parallel commands.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Omit wall time from reports.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weyl function values at lambda points, or boundary values on a real k grid.
    ///
    /// CSV columns: scalar models `lambda_re,lambda_im,w_re,w_im`; general
    /// models add `w11..w22` pairs in row order.
    Weyl {
        /// Spectral point `re,im`; repeatable.
        #[arg(long = "lambda", allow_hyphen_values = true)]
        lambdas: Vec<String>,
        /// Real k grid `kmin,kmax,N` (boundary values W+ / W-).
        #[arg(long, allow_hyphen_values = true)]
        k_grid: Option<String>,
        /// Side for positive lambda.
        #[arg(long, value_parser = ["plus", "minus"])]
        side: Option<String>,
        /// Also report dW/dlambda (scalar case, Im k > 0).
        #[arg(long)]
        derivative: bool,
    },
    /// Eigenvalues with multiplicities inside the search region.
    Eigs,
    /// Exceptional points of the delta-type family for the model's potential.
    Exceptional,
    /// Spectral-singularity scan on a uniform k grid.
    ///
    /// CSV columns: `k,lambda,a_re,a_im,is_singular`.
    Singularities {
        /// `kmin,kmax` with 0 < kmin.
        #[arg(long, default_value = "0.1,10")]
        k_range: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Classify the coupling plane `a` for the model's potential.
    ///
    /// `--grid N` gives N x N points. CSV columns:
    /// `a_re,a_im,label,eigenvalues,real_eigenvalues,singularity_lambda`.
    PhaseDiagram {
        #[arg(long, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
        a_range: String,
    },
    /// Eigenfunction values on a uniform x grid.
    ///
    /// CSV columns: `x,re_u,im_u` (delta) or `x,re_u,im_u,re_v,im_v` (general).
    Eigenfunction {
        #[arg(long = "lambda", allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, value_parser = ["plus", "minus"])]
        side: Option<String>,
        #[arg(long, default_value = "-5,5", allow_hyphen_values = true)]
        x_range: String,
    },
    /// Self-adjointness, PT and P flags.
    Classify,
    /// Finite-difference evidence for an eigenvalue (delta models).
    Verify {
        #[arg(long = "lambda", allow_hyphen_values = true)]
        lambda: String,
        /// Half-length of the FD interval.
        #[arg(long, default_value_t = 20.0)]
        length: f64,
        /// Also report the residual of u_lambda sampled on the grid.
        #[arg(long)]
        candidate: bool,
        #[arg(long, value_parser = ["plus", "minus"])]
        side: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Weyl { .. } => "weyl",
            Command::Eigs => "eigs",
            Command::Exceptional => "exceptional",
            Command::Singularities { .. } => "singularities",
            Command::PhaseDiagram { .. } => "phase-diagram",
            Command::Eigenfunction { .. } => "eigenfunction",
            Command::Classify => "classify",
            Command::Verify { .. } => "verify",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::Validation { .. }
        | Error::BranchPoint
        | Error::AmbiguousBoundary(_)
        | Error::Precondition(_) => 2,
        Error::Resolution { .. } | Error::DegenerateFamily => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.common.jobs {
        // Only fails if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let start = Instant::now();
    match commands::run(&cli.command, &cli.common) {
        Ok(out) => {
            let elapsed = (!cli.common.no_timing).then(|| start.elapsed().as_secs_f64());
            print!("{}", out.render(cli.command.name(), &cli.common, elapsed));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("{}", output::error_json(&e, code));
            ExitCode::from(code)
        }
    }
}
