mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tripartite_core::verify::{run_all, run_suite, Suite};
use tripartite_core::NoiseKind;

use sweep::{NuGrid, Quantity, SweepConfig, UsageError};

#[derive(Parser)]
#[command(name = "tripartite", version, about = "Noisy GHZ-channel teleportation: sweeps and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a quantity over a κt grid and write it as CSV.
    Sweep {
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Noise kind: none, x, y, z, isotropic.
        #[arg(long, value_parser = parse_kind)]
        kind: NoiseKind,
        #[arg(long)]
        kt_start: f64,
        #[arg(long)]
        kt_stop: f64,
        #[arg(long)]
        kt_count: usize,
        /// Fixed measurement angle of Bob (defaults to π/4).
        #[arg(long, conflicts_with = "nu_count")]
        nu: Option<f64>,
        /// Sweep ν over this many evenly spaced values in [0, π/2].
        #[arg(long)]
        nu_count: Option<usize>,
        /// Condition Bob's fidelity on Alice's outcome (1..=4).
        #[arg(long)]
        outcome: Option<usize>,
        /// Ensemble size for convex_roof (default: rank + 4, at most 12).
        #[arg(long)]
        members: Option<usize>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        /// Also start convex_roof from the constructive Y/isotropic decomposition.
        #[arg(long)]
        warm_start: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the invariant suites and report each check.
    Verify {
        /// One of qmat, channels, protocol, fidelity, tangles, convexroof, or all.
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_kind(s: &str) -> Result<NoiseKind, String> {
    s.parse::<NoiseKind>().map_err(|_| format!("unknown noise kind '{s}'; valid kinds are none, x, y, z, isotropic"))
}

fn run_verify(suite: &str, seed: u64) -> anyhow::Result<bool> {
    let results = if suite == "all" {
        run_all(seed)?
    } else {
        let suite: Suite = suite.parse().map_err(|e: tripartite_core::Error| UsageError(e.to_string()))?;
        run_suite(suite, seed)?
    };
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    println!("{} checks, {} failed", results.len(), failed);
    Ok(failed == 0)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Sweep {
            quantity,
            kind,
            kt_start,
            kt_stop,
            kt_count,
            nu,
            nu_count,
            outcome,
            members,
            restarts,
            warm_start,
            out,
            seed,
        } => {
            let nu = nu.map(NuGrid::Fixed).or(nu_count.map(NuGrid::Span));
            let config = SweepConfig {
                quantity,
                kind,
                kt_start,
                kt_stop,
                kt_count,
                nu,
                outcome,
                members,
                restarts,
                warm_start,
                out,
                seed,
            };
            let rows = sweep::rows(&config)?;
            sweep::write_csv(&config, &rows)?;
            eprintln!("wrote {} rows to {}", rows.len(), config.out.display());
            if quantity == Quantity::ConvexRoof {
                eprintln!("convex_roof values are upper bounds on the three-tangle");
            }
            Ok(true)
        }
        Command::Verify { suite, seed } => run_verify(&suite, seed),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
