use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use birkhoff_core::bench::{self, CampaignOptions};
use birkhoff_core::bvn::{DecomposeOptions, ResidualNorm};
use birkhoff_core::io::{read_decomposition, read_matrix, DecompositionJson};
use birkhoff_core::{bvn, lcu, matrix, sinkhorn, Variant};

#[derive(Parser)]
#[command(
    name = "birkhoff",
    version,
    about = "Birkhoff-von Neumann decompositions and LCU resource counts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sinkhorn-scale a non-negative matrix to doubly stochastic form.
    Scale {
        matrix: PathBuf,
        #[arg(long, default_value_t = sinkhorn::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = sinkhorn::DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Embed a matrix with matching row/column sums into a 2N doubly stochastic matrix.
    Complete { matrix: PathBuf },
    /// Decompose a doubly stochastic matrix into weighted permutations.
    Decompose {
        matrix: PathBuf,
        #[arg(long, default_value = "largest")]
        variant: Variant,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Edge threshold for the threshold variant; searched when omitted.
        #[arg(long)]
        theta: Option<f64>,
        /// Residual norm compared against eps: induced or entrywise.
        #[arg(long, default_value = "induced")]
        norm: ResidualNorm,
    },
    /// LCU resource report for a decomposition JSON of a matrix.
    Resources {
        decomposition: PathBuf,
        matrix: PathBuf,
        /// Also compute the second largest singular value.
        #[arg(long)]
        svd: bool,
    },
    /// Number of nonzero Pauli strings of a 2^n x 2^n matrix.
    PauliCount {
        matrix: PathBuf,
        #[arg(long, default_value_t = lcu::DEFAULT_PAULI_TOL)]
        tol: f64,
    },
    /// Write a seeded random doubly stochastic matrix.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = bench::INSTANCE_TOL)]
        tol: f64,
    },
    /// Term-count experiments.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Term count against dimension for several variants.
    Scaling(ScalingArgs),
    /// Largest-weight term count against tolerance.
    Precision(PrecisionArgs),
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64,128")]
    sizes: Vec<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "original,largest,bottleneck"
    )]
    variants: Vec<Variant>,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Write runtime_ms as 0 so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct PrecisionArgs {
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001,0.0001")]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct ScaleOutput {
    d1: Vec<f64>,
    d2: Vec<f64>,
    s: Vec<Vec<f64>>,
    iterations: usize,
    achieved_tol: f64,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Scale {
            matrix,
            tol,
            max_iter,
        } => {
            let a = read_matrix(&matrix)?;
            let r = sinkhorn::sinkhorn_scale(&a, tol, max_iter)?;
            print_json(&ScaleOutput {
                d1: r.d1,
                d2: r.d2,
                s: r.s.to_rows(),
                iterations: r.iterations,
                achieved_tol: r.achieved_tol,
            })?;
        }
        Command::Complete { matrix } => {
            let a = read_matrix(&matrix)?;
            let c = sinkhorn::complete_to_doubly_stochastic(&a)?;
            print!("{}", c.m);
        }
        Command::Decompose {
            matrix,
            variant,
            eps,
            theta,
            norm,
        } => {
            if theta.is_some() && variant != Variant::Threshold {
                bail!("--theta only applies to the threshold variant");
            }
            let s = read_matrix(&matrix)?;
            let opts = DecomposeOptions {
                norm,
                ..Default::default()
            };
            let d = bvn::decompose_configured(&s, eps, variant, theta, &opts)
                .with_context(|| format!("decomposing {}", matrix.display()))?;
            print_json(&DecompositionJson::from(&d))?;
        }
        Command::Resources {
            decomposition,
            matrix,
            svd,
        } => {
            let d = read_decomposition(&decomposition)?;
            let s = read_matrix(&matrix)?;
            let mut report = lcu::resource_report(&d, &s)?;
            if svd {
                report = report.with_second_singular_value(&s);
            }
            print_json(&report)?;
        }
        Command::PauliCount { matrix, tol } => {
            let a = read_matrix(&matrix)?;
            print_json(&lcu::pauli_term_count(&a, tol)?)?;
        }
        Command::Generate { n, seed, tol } => {
            print!("{}", matrix::random_doubly_stochastic(n, seed, tol)?);
        }
        Command::Bench(BenchCommand::Scaling(args)) => {
            let opts = CampaignOptions {
                timing: !args.no_timing,
            };
            let rows = bench::run_scaling_experiment(
                &args.sizes,
                &args.variants,
                args.eps,
                args.trials,
                args.seed,
                opts,
            )?;
            bench::emit_csv(&rows, &args.out)?;
            print_json(&bench::summarize(&rows))?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!(
                    "{failed} trial(s) failed; see the error column of {}",
                    args.out.display()
                );
                return Ok(ExitCode::from(2));
            }
        }
        Command::Bench(BenchCommand::Precision(args)) => {
            let rows = bench::run_precision_experiment(args.n, &args.eps, args.trials, args.seed)?;
            bench::emit_csv(&rows, &args.out)?;
            print_json(&rows)?;
            let failed: usize = rows.iter().map(|r| r.failed).sum();
            if failed > 0 {
                eprintln!("{failed} trial(s) failed");
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
