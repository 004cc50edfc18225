use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eddm::deform::{Mode, DEFAULT_PRUNE_EPS};
use eddm::mesh::Precision;
use eddm_cli::commands::{self, DeformArgs, PrecomputeArgs, Status, INPUT_ERROR};
use eddm_cli::scenario::ScenarioName;

/// Skinning deformation with enhanced direct delta mush.
#[derive(Parser)]
#[command(name = "eddm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the Ω cache for a mesh and its skin weights.
    Precompute {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
        #[arg(long, default_value_t = 16)]
        iterations: u32,
        #[arg(long, default_value_t = DEFAULT_PRUNE_EPS)]
        prune: f64,
        #[arg(long, default_value_t = Precision::Double)]
        precision: Precision,
        #[arg(long)]
        out: PathBuf,
    },
    /// Deform a mesh with one of the four deformers and write an OBJ.
    Deform {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        omega: Option<PathBuf>,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        rig: PathBuf,
        #[arg(long)]
        pose: PathBuf,
        /// eddm, ddm, lbs or dm
        #[arg(long)]
        mode: Mode,
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
        #[arg(long, default_value_t = 16)]
        iterations: u32,
        #[arg(long, default_value_t = DEFAULT_PRUNE_EPS)]
        prune: f64,
        #[arg(long, default_value_t = Precision::Double)]
        precision: Precision,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-vertex distances between two OBJ files; exits 3 above the threshold.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
    },
    /// Write a generated fixture (mesh, rig, weights, poses).
    Scenario {
        /// fig1, fig2 or stress
        #[arg(long)]
        name: ScenarioName,
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Time closed-form polar rotation against the SVD oracle.
    BenchPolar {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    match cli.command {
        Command::Precompute { mesh, weights, kappa, iterations, prune, precision, out } => {
            commands::precompute(&PrecomputeArgs { mesh, weights, kappa, iterations, prune, precision, out })
        }
        Command::Deform { mesh, omega, weights, rig, pose, mode, kappa, iterations, prune, precision, out } => {
            commands::deform(&DeformArgs {
                mesh,
                omega,
                weights,
                rig,
                pose,
                mode,
                kappa,
                iterations,
                prune,
                precision,
                out,
            })
        }
        Command::Compare { a, b, report, threshold } => commands::compare(&a, &b, &report, threshold),
        Command::Scenario { name, outdir } => commands::scenario(name, &outdir),
        Command::BenchPolar { samples, seed, out } => commands::bench(samples, seed, out.as_deref()).map(|_| Status::Ok),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR as u8)
        }
    }
}
