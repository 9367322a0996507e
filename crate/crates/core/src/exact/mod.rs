//! Exact integer-matrix algebra: determinants, characteristic polynomials,
//! irreducibility, Smith normal form and periodic points of toral
//! automorphisms. No floating point enters any verdict here.

mod irreducible;
mod matrix;
mod periodic;
mod poly;
pub mod roots;
mod snf;

use num_bigint::BigInt;
use thiserror::Error;

pub use irreducible::{is_irreducible_over_z, Irreducibility, IrreducibilityCertificate};
pub use matrix::{determinant, matrix_power, rational_inverse, IntMatrix, ToralMatrix, MAX_EXPONENT};
pub(crate) use matrix::parse_block;
pub use periodic::{apply_mod_one, is_periodic, periodic_count, periodic_points, PeriodicOrbit, TorusPoint};
pub use poly::{char_poly, IntPolynomial};
pub use snf::{smith_normal_form, SmithDecomposition};

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(BigInt),
    #[error("det(Aⁿ − I) = 0: some eigenvalue is a root of unity of order dividing n")]
    DegenerateMatrix,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("exponent {0} exceeds the bound |n| <= {MAX_EXPONENT}")]
    ExponentOutOfRange(i64),
}
