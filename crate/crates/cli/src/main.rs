//! `algflow`: list, certify, simulate, compare and sweep the catalogued models.

mod check;
mod compare;
mod input;
mod list;
mod manifest;
mod simulate;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::input::Usage;

#[derive(Parser)]
#[command(name = "algflow", version, about = "Algebraic flows on the zeros of a cubic with a double root")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the model catalogue.
    List {
        /// Show the active coefficient pair.
        #[arg(long)]
        pairs: bool,
        /// Only models whose vector field divides by x1.
        #[arg(long)]
        rational: bool,
    },
    /// Re-derive vector fields exactly and write a certification report.
    Verify {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        model: Option<String>,
        #[arg(long)]
        all: bool,
        /// Report path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a model algebraically and write the trajectory as CSV.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Route::Auto)]
        route: Route,
        /// Replay a manifest written by an earlier run.
        #[arg(long, conflicts_with_all = ["model", "params", "x0", "t1", "samples", "route"])]
        manifest: Option<PathBuf>,
        /// CSV path; the manifest goes next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the algebraic path and the reference integrator side by side.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Reference integrator tolerances.
        #[arg(long, default_value_t = 1e-12)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-14)]
        atol: f64,
    },
    /// Classify a seeded family of instances in parallel.
    Sweep {
        #[arg(long)]
        model: Option<String>,
        /// JSON grid description.
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the invariant suite at reduced instance counts.
    Check {
        #[arg(long)]
        fast: bool,
        /// Perturb the catalogued field of this model before certifying.
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    model: Option<String>,
    /// Parameters as `name=re,im`.
    #[arg(long, num_args = 1..)]
    params: Vec<String>,
    /// Initial zeros as two `re,im` values.
    #[arg(long, num_args = 2, allow_hyphen_values = true)]
    x0: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    t1: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Auto,
    Y12,
    Y13,
    Y23,
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::List { pairs, rational } => {
            print!("{}", list::table(pairs, rational));
            Ok(true)
        }
        Command::Verify { model, all, out } => verify::run(model.as_deref(), all, out.as_deref()),
        Command::Simulate { run, samples, route, manifest, out } => {
            let m = match manifest {
                Some(path) => manifest::RunManifest::load(&path)?,
                None => input::manifest(&run, samples, route)?,
            };
            simulate::run(m, &out)
        }
        Command::Compare { run, tol, samples, rtol, atol } => {
            let m = input::manifest(&run, samples, Route::Auto)?;
            compare::run(&m, tol, rtol, atol)
        }
        Command::Sweep { model, grid, workers, out } => sweep::run(model.as_deref(), &grid, workers, &out),
        Command::Check { fast, inject_fault } => {
            let fault = inject_fault.map(|s| input::model(&s)).transpose()?;
            Ok(check::run(fast, fault, input::seed(algflow::sample::DEFAULT_SEED)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
