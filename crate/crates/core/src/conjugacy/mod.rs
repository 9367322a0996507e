//! Numerical conjugacies for perturbations of linear actions.
//!
//! The Franks–Manning conjugacy `h = id + w` of a perturbed hyperbolic
//! automorphism is found by a split fixed-point iteration on a periodic
//! grid. Around it sit equivariance checks for the whole action, Hölder
//! estimates, block-splitting checks, rigid power-law fits, and a local
//! linearizer for commuting contracting germs.

mod fit;
mod germ;
mod grid;
mod holder;
mod map;
mod solver;
mod splitting;

use thiserror::Error;

use crate::spectrum::SpectrumError;

pub use fit::{
    exponent_relation_defect, fit_complex_form, fit_power_law_real, ComplexSample, FitError, Orientation, PowerLawFit,
};
pub use germ::{linearize_germ, GermChart, GermConfig, GermError, Poly, PolyMap};
pub use grid::{torus_dist, GridDisplacement, Interpolation};
pub use holder::{estimate_holder, HolderEstimate};
pub use map::{trig_eval, trig_jacobian, DiffMap, Displacement, PerturbedMap, TrigTerm, Wave};
pub use solver::{
    interpolation_error, solve_franks_manning, solve_with_initial, verify_equivariance, ConjugacyResult, EquivarianceReport, SolverConfig,
    SpectralFrame,
};
pub use splitting::{check_splitting, check_splitting_grid, BlockFrame, SplittingReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConjugacyError {
    #[error("linear part is not hyperbolic (eigenvalue modulus {0} within tolerance of 1)")]
    NotHyperbolic(f64),
    #[error("Newton inversion of the map failed")]
    NonInvertible,
    #[error("no convergence after {iterations} iterations (last update {last_delta:e})")]
    NoConvergence { iterations: usize, last_delta: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}
