//! `bvf` — experiment runner exposing every module as a reproducible
//! command. Deterministic commands produce byte-identical outputs for a
//! fixed config; stochastic commands are reproducible given the seed.
//! Every JSON report embeds the tool version, a hash of the effective
//! config, and the seed.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure.

mod commands;
mod output;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bvf", version, about = "BV Fourier laboratory experiment runner")]
struct Cli {
    /// Worker threads (default: env BVF_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// JSON config file; command-line flags override its fields.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Directory for CSV artifacts (reports go to stdout).
    #[arg(long, global = true)]
    out_dir: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit or validate a shape catalog document.
    Catalog(commands::CatalogArgs),
    /// Cutoff estimator trace (2 pi^2 / R) Phi_2(R) with its limit.
    SpectralAsymptote(commands::SpectralArgs),
    /// Plancherel tail trace 2 pi^2 R (||u||^2 - Phi_0(R)).
    Tail(commands::TailArgs),
    /// Gaussian-damped estimator trace over a t grid.
    GaussianAsymptote(commands::GaussianArgs),
    /// Short-time heat-content estimator sqrt(pi)(H(0) - H(t))/t.
    HeatAsymptote(commands::HeatArgs),
    /// Relative heat content (|Omega| - H(t))/t of a set.
    RelativeHeat(commands::RelativeHeatArgs),
    /// Fourier set-derivative difference quotients vs the boundary measure.
    MinkowskiDerivative(commands::MinkowskiArgs),
    /// Weak-convergence probe of the dilation measures mu_h.
    WeakProbe(commands::WeakProbeArgs),
    /// Quadratic discrepancy by lattice sum and/or Monte Carlo.
    Discrepancy(commands::DiscrepancyArgs),
    /// Generate a point set (lattice / random / composite).
    Pointset(commands::PointsetArgs),
    /// Cassels-Montgomery inequality check for a point set.
    CmCheck(commands::CmArgs),
    /// Normalized D_2 scaling trace over a list of N.
    ScalingStudy(commands::ScalingArgs),
    /// Appendix inequality sweep over a randomized catalog.
    Inequalities(commands::InequalitiesArgs),
    /// Run the verification suite; exit nonzero on any failure.
    VerifyAll(commands::VerifyArgs),
}

fn main() {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("BVF_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0);
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    let ctx = commands::Ctx {
        out_dir: cli.out_dir.clone(),
        config: cli.config.clone(),
    };
    let code = match run(cli.command, &ctx) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                bvf::Error::InvalidInput(_) | bvf::Error::InvalidShape(_) => 1,
                _ => 2,
            }
        }
    };
    std::process::exit(code);
}

fn run(cmd: Command, ctx: &commands::Ctx) -> bvf::Result<()> {
    match cmd {
        Command::Catalog(a) => commands::catalog(a, ctx),
        Command::SpectralAsymptote(a) => commands::spectral_asymptote(a, ctx),
        Command::Tail(a) => commands::tail(a, ctx),
        Command::GaussianAsymptote(a) => commands::gaussian_asymptote(a, ctx),
        Command::HeatAsymptote(a) => commands::heat_asymptote(a, ctx),
        Command::RelativeHeat(a) => commands::relative_heat(a, ctx),
        Command::MinkowskiDerivative(a) => commands::minkowski_derivative(a, ctx),
        Command::WeakProbe(a) => commands::weak_probe(a, ctx),
        Command::Discrepancy(a) => commands::discrepancy_cmd(a, ctx),
        Command::Pointset(a) => commands::pointset(a, ctx),
        Command::CmCheck(a) => commands::cm_check(a, ctx),
        Command::ScalingStudy(a) => commands::scaling(a, ctx),
        Command::Inequalities(a) => commands::inequalities(a, ctx),
        Command::VerifyAll(a) => commands::verify_all(a, ctx),
    }
}
