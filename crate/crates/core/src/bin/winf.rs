use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use winf::coupling::{monotone_coupling, winf_value};
use winf::io::{
    self, plot_grid, potentials_csv, read_json, read_measure, write_json, OracleReport, PotentialsFile, WinfReport,
};
use winf::oracle::{sample_quantile_grid, sorted_matching_bottleneck, threshold_matching_bottleneck};
use winf::potentials::{check_dual_feasibility, kantorovich_pair, FeasibilityOptions, RhoConfig};
use winf::selftest::{run_selftest, SelftestOptions};
use winf::structure::{
    assemble_discretized, decompose_measures, discretize, monotone_sub_plans, sample_optimal_plan, support_diameter,
    validate_plan, DiscretePlan, StructureDecomposition,
};
use winf::{Error, REPORT_TOL};

/// L∞ optimal transport between piecewise-uniform measures on the line.
#[derive(Parser)]
#[command(name = "winf", version)]
struct Cli {
    /// Report tolerance; overrides the WINF_TOL environment variable.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Pair {
    #[arg(long)]
    mu: PathBuf,
    #[arg(long)]
    nu: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Critical distance and maximal displacement sets.
    Winf {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kantorovich potentials φ, ψ.
    Potentials {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write x,phi,psi samples for plotting.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        endpoint_weight: f64,
        #[arg(long, default_value_t = 1.0)]
        interior_density: f64,
        #[arg(long, default_value_t = 2.0)]
        z_plus_weight: f64,
        #[arg(long, default_value_t = 1.0)]
        z_minus_weight: f64,
    },
    /// Checks a potential pair for dual feasibility and reports its value.
    VerifyDual {
        #[command(flatten)]
        pair: Pair,
        /// Potentials file written by `potentials`.
        #[arg(long)]
        phi: PathBuf,
        /// Band width; defaults to the critical distance stored with the potentials.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        grid_step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rigid parts and free components of all optimal plans.
    Decompose {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draws an optimal plan from a decomposition.
    SamplePlan {
        #[arg(long)]
        dec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Use the monotone coupling on every free component instead of a random one.
        #[arg(long)]
        monotone: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks a plan against a decomposition.
    ValidatePlan {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        dec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bottleneck matching of equi-quantile samples, two ways.
    Oracle {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariant suite on the built-in instances.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Outcome of a subcommand that ran to completion: `false` means a check
/// failed.
type Outcome = Result<bool, Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match report_tolerance(cli.tol) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    match run(cli.command, tol) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("winf: {e}");
    ExitCode::from(if e.is_input_error() { 2 } else { 1 })
}

fn report_tolerance(flag: Option<f64>) -> Result<f64, Error> {
    let tol = match (flag, std::env::var("WINF_TOL")) {
        (Some(t), _) => t,
        (None, Ok(text)) => text.trim().parse().map_err(|_| Error::Parse(format!("WINF_TOL={text}")))?,
        (None, Err(_)) => REPORT_TOL,
    };
    if tol.is_finite() && tol >= 0.0 {
        Ok(tol)
    } else {
        Err(Error::DomainError { value: tol, domain: "[0, ∞)" })
    }
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Error> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            print!("{}", io::to_canonical_json(value)?);
            Ok(())
        }
    }
}

fn run(command: Command, tol: f64) -> Outcome {
    match command {
        Command::Winf { pair, out } => {
            let (mu, nu) = (read_measure(&pair.mu)?, read_measure(&pair.nu)?);
            let k = kantorovich_pair(&mu, &nu, &RhoConfig::default())?;
            emit(out.as_deref(), &WinfReport::new(k.lambda, k.sets.as_ref()))?;
            Ok(true)
        }
        Command::Potentials { pair, out, csv, endpoint_weight, interior_density, z_plus_weight, z_minus_weight } => {
            let (mu, nu) = (read_measure(&pair.mu)?, read_measure(&pair.nu)?);
            let cfg = RhoConfig { endpoint_weight, interior_density, z_plus_weight, z_minus_weight };
            let k = kantorovich_pair(&mu, &nu, &cfg)?;
            let file =
                PotentialsFile { lambda_c: k.lambda, rho_config: cfg, phi: (&k.phi).into(), psi: (&k.psi).into() };
            emit(out.as_deref(), &file)?;
            if let Some(path) = csv {
                let lo = mu.inf_support().unwrap_or(0.0).min(nu.inf_support().unwrap_or(0.0));
                let hi = mu.sup_support().unwrap_or(0.0).max(nu.sup_support().unwrap_or(0.0));
                let text = potentials_csv(&k.phi, &k.psi, &plot_grid(lo, hi, k.lambda, 2000));
                std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            }
            Ok(true)
        }
        Command::VerifyDual { pair, phi, lambda, grid_step, out } => {
            let (mu, nu) = (read_measure(&pair.mu)?, read_measure(&pair.nu)?);
            let file: PotentialsFile = read_json(&phi)?;
            let (phi, psi) = file.potentials()?;
            let lambda = lambda.unwrap_or(file.lambda_c);
            let report = check_dual_feasibility(&phi, &psi, lambda, &mu, &nu, &FeasibilityOptions { grid_step, tol });
            emit(out.as_deref(), &report)?;
            Ok(report.feasible)
        }
        Command::Decompose { pair, out } => {
            let (mu, nu) = (read_measure(&pair.mu)?, read_measure(&pair.nu)?);
            emit(out.as_deref(), &decompose_measures(&mu, &nu)?)?;
            Ok(true)
        }
        Command::SamplePlan { dec, seed, n, monotone, out } => {
            let dec: StructureDecomposition = read_json(&dec)?;
            let n = n as usize;
            let plan = if monotone {
                let disc = discretize(&dec, n)?;
                assemble_discretized(&dec, &disc, &monotone_sub_plans(&disc))?
            } else {
                sample_optimal_plan(&dec, n, seed)?
            };
            emit(out.as_deref(), &plan)?;
            Ok(true)
        }
        Command::ValidatePlan { plan, dec, out } => {
            let plan: DiscretePlan = read_json(&plan)?;
            let plan = DiscretePlan::validated(plan.atoms().to_vec())?;
            let dec: StructureDecomposition = read_json(&dec)?;
            let report = validate_plan(&plan, &dec, tol);
            emit(out.as_deref(), &report)?;
            Ok(report.passed)
        }
        Command::Oracle { pair, n, out } => {
            let (mu, nu) = (read_measure(&pair.mu)?, read_measure(&pair.nu)?);
            let n = n as usize;
            let (xs, ys) = (sample_quantile_grid(&mu, n)?, sample_quantile_grid(&nu, n)?);
            let sorted = sorted_matching_bottleneck(&xs, &ys)?;
            let threshold = threshold_matching_bottleneck(&xs, &ys)?;
            let lambda_c = winf_value(&monotone_coupling(&mu, &nu)?);
            let tolerance = 2.0 * support_diameter(&mu, &nu) / n as f64;
            let report = OracleReport {
                n,
                bottleneck: sorted,
                sorted_bottleneck: sorted,
                threshold_bottleneck: threshold,
                method_agreement: sorted == threshold,
                lambda_c,
                tolerance,
                within_tolerance: (lambda_c - sorted).abs() <= tolerance,
            };
            emit(out.as_deref(), &report)?;
            Ok(report.method_agreement && report.within_tolerance)
        }
        Command::Selftest { out } => {
            let report = run_selftest(&SelftestOptions { tol, ..Default::default() });
            for c in &report.checks {
                eprintln!("{} {} / {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.instance, c.check, c.detail);
            }
            emit(out.as_deref(), &report)?;
            Ok(report.passed)
        }
    }
}
