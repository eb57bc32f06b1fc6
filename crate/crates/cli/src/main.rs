// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Config;
use crate::error::CliError;

/// Environment variable capping the worker thread count.
const THREADS_ENV: &str = "FOURIER_QML_THREADS";

/// Experiments with quantum and classical Fourier-featured linear models.
///
/// Experiments read a JSON config whose top level always holds
/// `version` (the schema name), `seed` (u64, the only source of randomness)
/// and `output_dir` (relative to the config file). The config is archived as
/// `config.json` in the output directory and wall-clock times go to
/// `timing.json`; every other output is byte-identical across reruns.
///
/// Exit codes: 0 success, 1 runtime failure, 2 usage or config error,
/// 3 divergence (outputs are still written), 4 capacity exceeded.
/// FOURIER_QML_THREADS caps the number of worker threads.
#[derive(Parser)]
#[command(name = "fourier-qml", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frequency spectrum of one variable's encoding weights.
    ///
    /// Prints `{weights, support, multiplicity, d_F, dense, nondegenerate}`.
    /// With --config, reads a `spectrum-v1` document with exactly one of
    /// `weights` (list of positive integers) or `exponential` (weight count
    /// N, giving weights 3^(n-1)) and writes `spectrum.json`.
    #[command(verbatim_doc_comment)]
    Spectrum {
        /// Comma-separated positive integer weights.
        #[arg(long, conflicts_with_all = ["exp", "config"])]
        weights: Option<String>,
        /// Use the N weights 1, 3, ..., 3^(N-1).
        #[arg(long, value_name = "N", conflicts_with = "config")]
        exp: Option<usize>,
        /// Write the JSON here instead of stdout.
        #[arg(long, conflicts_with = "config")]
        output: Option<PathBuf>,
        /// `spectrum-v1` config file.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Train one model on one target (`train-v1`).
    ///
    /// Fields:
    ///   model: {"family": "quantum", "ansatz": <ansatz>} or
    ///          {"family": "classical", "degrees": [d_F per variable], "dim": optional kept features}.
    ///          An ansatz is {variables, qubits, layers, topology ("parallel" or {"serial": {"blocks": B}}),
    ///          encoding (list of weight lists), entangler ("line"|"ring"), rotation ("yz"|"rot"),
    ///          encoding_gate ("rz"|"rot"), measured_qubit}.
    ///   target: {"kind": "step"} | {"kind": "random_fourier", kappa, split, r, seed} |
    ///           {"kind": "from_coefficients", degrees, coefficients} |
    ///           {"kind": "csv", path, inputs, output, normalization}.
    ///   points: grid size for synthetic targets (CSV targets use every row).
    ///   test_points: optional held-out grid size.
    ///   training: {optimizer: {"kind": "adam", lr, beta1, beta2, eps} | {"kind": "gradient_descent", lr},
    ///             steps, batch, shots, recover_coefficients, allow_undersampled, divergence_threshold}.
    ///
    /// Writes `result.json` and `trace.csv` (step, train_loss, test_loss).
    #[command(verbatim_doc_comment)]
    Train {
        config: PathBuf,
    },
    /// Paired classical and quantum training over energy ratios (`compare-v1`).
    ///
    /// Fields (all optional): r_values [0.05, 1.6, 55.5], runs 5, kappa 81,
    /// split 64, points 200, qubits 4, layers 1, classical_dim 64, lr 0.03,
    /// steps 500, saturation_window 25.
    ///
    /// Writes one trace per (r, model, run) under `traces/`, the combined
    /// `compare.csv` (r, model, run, step, loss) and `summary.json` with the
    /// saturated-loss means.
    #[command(verbatim_doc_comment)]
    Compare {
        config: PathBuf,
    },
    /// Monte-Carlo output and gradient moments of random circuits (`plateau-v1`).
    ///
    /// Fields: variables, qubits, trials (>= 100), mode ({"kind": "haar"} or
    /// {"kind": "circuit", layers, param}), case ("I"|"II"|"III", optional),
    /// mu (1-based qubit, default 1), x (input, default zeros), y (label,
    /// default 0), qubit_sweep (optional list of per-variable qubit counts).
    ///
    /// Writes `plateau.csv` (d, trials, mean_f, se_mean_f, var_f, predicted,
    /// zscore) and `report.json`.
    #[command(verbatim_doc_comment)]
    Plateau {
        config: PathBuf,
    },
    /// Quantum and classical resource table over gate counts (`resources-v1`).
    ///
    /// Fields: k (features per variable), m (variables), epsilon, n_gt (list
    /// of gate counts), n_tp (trainable parameters, default 0), ansatz
    /// (optional, reported with its own counts).
    ///
    /// Writes `resources.csv` and `resources.json`.
    #[command(verbatim_doc_comment)]
    Resources {
        config: PathBuf,
    },
    /// Analytic versus grid test of the degree-one boundedness set (`bicone-v1`).
    ///
    /// Fields: samples, grid (points for the numerical sup), band (width of
    /// the boundary band excluded from the agreement check).
    ///
    /// Writes `summary.json`.
    #[command(verbatim_doc_comment)]
    Bicone {
        config: PathBuf,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV}={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Spectrum { weights, exp, output, config: None } => {
            commands::cmd_spectrum_flags(weights.as_deref(), exp, output.as_deref())
        }
        Command::Spectrum { config: Some(p), .. } => {
            commands::cmd_spectrum_config(&Config::load(&p, config::SPECTRUM_V1)?)
        }
        Command::Train { config: p } => commands::cmd_train(&Config::load(&p, config::TRAIN_V1)?),
        Command::Compare { config: p } => commands::cmd_compare(&Config::load(&p, config::COMPARE_V1)?),
        Command::Plateau { config: p } => commands::cmd_plateau(&Config::load(&p, config::PLATEAU_V1)?),
        Command::Resources { config: p } => {
            commands::cmd_resources(&Config::load(&p, config::RESOURCES_V1)?)
        }
        Command::Bicone { config: p } => commands::cmd_bicone(&Config::load(&p, config::BICONE_V1)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
