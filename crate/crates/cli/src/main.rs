//! `toral`: command-line front end for toral automorphism actions.

mod analyze;
mod certify;
mod config;
mod conjugate;
mod fit;
mod io;
mod rigidity;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use toral_core::centralizer::CentralizerError;
use toral_core::conjugacy::{ConjugacyError, FitError, Orientation};
use toral_core::exact::ExactError;
use toral_core::hyperbolicity::HyperbolicityError;
use toral_core::hypothesis::HypothesisError;
use toral_core::lyapunov::LyapunovError;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "toral", version, about = "Rigidity diagnostics for actions by toral automorphisms")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Preserving,
    Reversing,
}

#[derive(Subcommand)]
enum Command {
    /// Algebra, units, Lyapunov geometry and hypothesis verdicts of a matrix.
    Analyze { matrix: PathBuf },
    /// Hypothesis verdicts of a matrix or a generator-set file.
    Check { input: PathBuf },
    /// Weyl chambers of a matrix or generator set; rows go to --csv.
    Chambers { input: PathBuf },
    /// Uniform contraction certificate for the stable bundle of a map file.
    Certify { map: PathBuf },
    /// Power-law fit of sampled conjugacy values from a CSV file.
    Fit {
        samples: PathBuf,
        /// Samples are complex (`z_re,z_im,h_re,h_im`).
        #[arg(long)]
        complex: bool,
        #[arg(long, value_enum)]
        orientation: Option<OrientationArg>,
        /// Generator pair `rho:rho_star` for the exponent relation; repeatable.
        #[arg(long = "pair", value_parser = fit::parse_pair)]
        pairs: Vec<(f64, f64)>,
    },
    /// Conjugacy of a perturbed automorphism to its linear part.
    Conjugate {
        map: PathBuf,
        /// Where to write the raw grid samples.
        #[arg(long)]
        grid: PathBuf,
        /// Scale factor applied to the displacement.
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
    },
    /// End-to-end rigidity signatures of a perturbed action.
    Rigidity { matrix: PathBuf, perturbation: PathBuf },
}

#[derive(Serialize)]
struct Diagnostic {
    status: &'static str,
    kind: &'static str,
    message: String,
    line: Option<usize>,
    causes: Vec<String>,
}

fn exact_kind(e: &ExactError) -> (&'static str, Option<usize>) {
    match e {
        ExactError::Parse { line, .. } => ("parse_error", Some(*line)),
        _ => ("exact_error", None),
    }
}

fn classify(err: &anyhow::Error) -> (&'static str, Option<usize>) {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ExactError>() {
            return exact_kind(e);
        }
        if let Some(e) = cause.downcast_ref::<CentralizerError>() {
            return match e {
                CentralizerError::Exact(x) => exact_kind(x),
                _ => ("centralizer_error", None),
            };
        }
        if let Some(e) = cause.downcast_ref::<HypothesisError>() {
            return match e {
                HypothesisError::Centralizer(CentralizerError::Exact(x)) => exact_kind(x),
                HypothesisError::HypothesisViolation(_) => ("hypothesis_violation", None),
                _ => ("hypothesis_error", None),
            };
        }
        if cause.is::<LyapunovError>() {
            return ("lyapunov_error", None);
        }
        if cause.is::<ConjugacyError>() {
            return ("conjugacy_error", None);
        }
        if cause.is::<HyperbolicityError>() {
            return ("hyperbolicity_error", None);
        }
        if cause.is::<FitError>() {
            return ("fit_error", None);
        }
        if cause.is::<csv::Error>() {
            return ("csv_error", None);
        }
        if cause.is::<std::io::Error>() {
            return ("io_error", None);
        }
    }
    ("error", None)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = &cli.config;
    cfg.validate()?;
    match cli.command {
        Command::Analyze { matrix } => analyze::analyze(cfg, matrix),
        Command::Check { input } => analyze::check(cfg, input),
        Command::Chambers { input } => analyze::chambers(cfg, input),
        Command::Certify { map } => certify::certify(cfg, map),
        Command::Fit { samples, complex, orientation, pairs } => {
            let orientation = orientation.map(|o| match o {
                OrientationArg::Preserving => Orientation::Preserving,
                OrientationArg::Reversing => Orientation::Reversing,
            });
            fit::fit(cfg, samples, complex, orientation, pairs)
        }
        Command::Conjugate { map, grid, epsilon } => conjugate::conjugate(cfg, map, grid, epsilon),
        Command::Rigidity { matrix, perturbation } => rigidity::rigidity(cfg, matrix, perturbation),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (kind, line) = classify(&err);
            let d = Diagnostic {
                status: "error",
                kind,
                message: err.to_string(),
                line,
                causes: err.chain().skip(1).map(|c| c.to_string()).collect(),
            };
            eprintln!("{}", serde_json::to_string_pretty(&d).expect("diagnostic serializes"));
            ExitCode::FAILURE
        }
    }
}
