mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use toric_ot::Error;

/// Transported Monge-Ampère solver and verification harness.
#[derive(Parser, Debug)]
#[command(name = "toric-ot", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Print errors to stderr as a JSON object.
    #[arg(long, global = true)]
    pub json_errors: bool,

    /// Seed for every random choice; recorded in the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output path; stdout when omitted (a directory for `example`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for u with g(grad u) MA(u) = mu.
    Solve(Instance),
    /// Legendre transform of a PL function (JSON) or a grid sample (CSV).
    Legendre(LegendreArgs),
    /// Run a verification suite, or re-verify a stored solution.
    Verify(VerifyArgs),
    /// Toric checks.
    #[command(subcommand)]
    Toric(ToricCommand),
    /// Closed-form one-dimensional solve by CDF inversion.
    Oracle1d(Instance),
    /// Write a bundled instance to the output directory.
    Example(ExampleArgs),
}

#[derive(Args, Debug)]
pub struct Instance {
    #[arg(long)]
    pub polytope: PathBuf,
    #[arg(long)]
    pub density: PathBuf,
    /// measure.json with the target atoms.
    #[arg(long)]
    pub target: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[command(flatten)]
    pub grid: GridFlags,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SolverFlags {
    /// Newton tolerance on the mass residual.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct GridFlags {
    /// Half-width of the cube grid used for sampled output.
    #[arg(long)]
    pub grid_radius: Option<f64>,
    /// Nodes per axis of that grid (at least 8).
    #[arg(long)]
    pub grid_res: Option<usize>,
}

#[derive(Args, Debug)]
pub struct LegendreArgs {
    /// PL function as JSON, or a grid sample as CSV.
    #[arg(long)]
    pub function: PathBuf,
    #[command(flatten)]
    pub grid: GridFlags,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_parser = ["lemmaA", "attouch", "uniqueness", "boundedness"])]
    pub suite: Option<String>,
    /// solution.json to re-check against its instance.
    #[arg(long, conflicts_with = "suite", requires_all = ["polytope", "density"])]
    pub solution: Option<PathBuf>,
    #[arg(long)]
    pub polytope: Option<PathBuf>,
    #[arg(long)]
    pub density: Option<PathBuf>,
    /// measure.json; defaults to the targets and masses stored in the solution.
    #[arg(long)]
    pub target: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum ToricCommand {
    /// Class membership, moment image and the complex/real factor.
    Check(ToricArgs),
}

#[derive(Args, Debug)]
pub struct ToricArgs {
    /// Potential as a grid CSV or a PL JSON.
    #[arg(long, required_unless_present = "builtin", conflicts_with = "builtin")]
    pub potential: Option<PathBuf>,
    /// A smooth potential given in closed form.
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    #[arg(long)]
    pub polytope: PathBuf,
    #[command(flatten)]
    pub grid: GridFlags,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Builtin {
    /// log(1 + e^x), moment polytope [0, 1].
    Logistic,
    /// |x|^2 / 2, not in any class P.
    Quadratic,
}

#[derive(Args, Debug)]
pub struct ExampleArgs {
    #[arg(required_unless_present = "list")]
    pub name: Option<String>,
    /// List the bundled instances.
    #[arg(long)]
    pub list: bool,
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::NoConvergence { .. }) => 3,
            Failure::Lib(Error::InconsistentState(_)) => 1,
            Failure::Lib(_) => 2,
            Failure::Verification(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Lib(e) => match e {
                Error::InvalidInput(_) => "invalid-input",
                Error::DimensionMismatch { .. } => "dimension-mismatch",
                Error::NonConvex(_) => "non-convex",
                Error::Unsupported(_) => "unsupported",
                Error::ClassViolation(_) => "class-violation",
                Error::NotCheckable(_) => "not-checkable",
                Error::InconsistentState(_) => "inconsistent-state",
                Error::NoConvergence { .. } => "no-convergence",
                Error::Io(_) => "io",
                Error::Parse(_) => "parse",
            },
            Failure::Verification(_) => "verification-failure",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Verification(m) => m.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if cli.json_errors {
                let v = serde_json::json!({"error": f.kind(), "message": f.message(), "exit_code": f.code()});
                eprintln!("{v}");
            } else {
                eprintln!("error: {}", f.message());
            }
            ExitCode::from(f.code())
        }
    }
}
