//! `hyperflow` command-line driver.
//!
//! Exit status: 0 on success, 1 on a numerical failure (inverted cell,
//! divergence, failed verification check), 2 on usage or parse errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hyperflow::convergence::{converge_space, converge_time, StudyResult};
use hyperflow::run::run_scenario;
use hyperflow::scenario::Scenario;
use hyperflow::verify::{run_suite, Suite};
use hyperflow::Error;

#[derive(Parser, Debug)]
#[command(name = "hyperflow", version, about = "Variational integrator for hyperelastic solids and barotropic fluids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario to its horizon, writing frames and diagnostics.
    Run {
        scenario: PathBuf,
        /// Output directory; defaults to `output.dir` of the scenario, then
        /// `out/<scenario name>`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the run length in seconds.
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Time refinement study against a fine reference time step.
    ConvergeTime {
        scenario: PathBuf,
        /// Halving sequence of time steps, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        dts: Vec<f64>,
        /// Reference time step.
        #[arg(long = "ref")]
        reference: f64,
        #[arg(long)]
        horizon: Option<f64>,
        /// CSV report path; defaults to `<scenario name>_converge_time.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Space refinement study against a fine reference spacing.
    ConvergeSpace {
        scenario: PathBuf,
        /// Halving sequence of spacings, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        ds: Vec<f64>,
        /// Reference spacing.
        #[arg(long = "ref")]
        reference: f64,
        #[arg(long)]
        horizon: Option<f64>,
        /// CSV report path; defaults to `<scenario name>_converge_space.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in verification suites: mesh, kinematics, materials,
    /// gradients, noether or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Failure { code: 2, message: e.to_string() }
    }

    fn numerical(e: impl std::fmt::Display) -> Self {
        Failure { code: 1, message: e.to_string() }
    }

    /// Classifies an error raised while executing a run.
    fn from_run(e: Error) -> Self {
        if e.is_numerical() || matches!(e, Error::Study(_) | Error::Io { .. }) {
            Failure::numerical(e)
        } else {
            Failure::usage(e)
        }
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Scenario::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into())
}

fn run(path: &Path, out: Option<PathBuf>, horizon: Option<f64>) -> Result<(), Failure> {
    let mut scenario = load(path)?;
    if let Some(h) = horizon {
        scenario.set_horizon(h).map_err(Failure::usage)?;
    }
    let dir = out.or_else(|| scenario.output.dir.clone()).unwrap_or_else(|| Path::new("out").join(stem(path)));
    // Build once up front so setup problems are reported as input errors.
    scenario.build().map_err(Failure::usage)?;
    let outcome = run_scenario(&scenario, Some(&dir)).map_err(Failure::from_run)?;
    let last = outcome.rows.last().expect("at least the initial row");
    println!("{}: {} steps, t = {} s", stem(path), last.step, last.time);
    println!("  total energy      {:e}", last.energy.total);
    println!("  relative energy   {:e}", last.relative_energy);
    println!("  max |rel. energy| {:e}", outcome.rows.iter().map(|r| r.relative_energy.abs()).fold(0.0, f64::max));
    if let Some(psi) = outcome.min_psi {
        println!("  min contact gap   {psi:e}");
    }
    println!("  output            {}", dir.display());
    Ok(())
}

fn report(result: &StudyResult, out: &Path) -> Result<(), Failure> {
    std::fs::write(out, result.to_csv()).map_err(|e| Failure::numerical(format!("{}: {e}", out.display())))?;
    print!("{}", result.summary());
    println!("report written to {}", out.display());
    if let Some(Err(m)) = result.errors.iter().find(|e| e.is_err()) {
        return Err(Failure::numerical(format!("study incomplete: {m}")));
    }
    Ok(())
}

fn study(
    path: &Path,
    params: &[f64],
    reference: f64,
    horizon: Option<f64>,
    out: Option<PathBuf>,
    space: bool,
) -> Result<(), Failure> {
    let scenario = load(path)?;
    let result = if space {
        converge_space(&scenario, params, reference, horizon)
    } else {
        converge_time(&scenario, params, reference, horizon)
    }
    .map_err(Failure::usage)?;
    let kind = if space { "space" } else { "time" };
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{}_converge_{kind}.csv", stem(path))));
    report(&result, &out)
}

fn verify(suite: &str) -> Result<(), Failure> {
    let suite: Suite = suite.parse().map_err(Failure::usage)?;
    let checks = run_suite(suite).map_err(Failure::from_run)?;
    println!("suite,property,status,measured,tolerance");
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    eprintln!("{} checks, {failed} failed", checks.len());
    if failed > 0 {
        return Err(Failure::numerical(format!("{failed} verification checks failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, out, horizon } => run(&scenario, out, horizon),
        Command::ConvergeTime { scenario, dts, reference, horizon, out } => {
            study(&scenario, &dts, reference, horizon, out, false)
        }
        Command::ConvergeSpace { scenario, ds, reference, horizon, out } => {
            study(&scenario, &ds, reference, horizon, out, true)
        }
        Command::Verify { suite } => verify(&suite),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
