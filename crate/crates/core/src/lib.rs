//! Higher-rank abelian actions by toral automorphisms.
//!
//! The crate is organised bottom-up:
//!
//! * [`exact`]: integer matrices, characteristic polynomials, Smith normal
//!   form and exact periodic points.
//! * [`centralizer`]: Dirichlet rank, unit search in ℤ[A], multiplicative
//!   independence, symplectic front end.
//! * [`lyapunov`]: Lyapunov functionals, coarse spaces and Weyl chambers.
//! * [`hypothesis`]: checks of the simplicity, density, separation and
//!   bunching hypotheses on a linear action.
//! * [`mp`], [`spectrum`], [`lattice`]: multiprecision helpers, joint
//!   spectra of commuting matrices and LLL reduction.
//! * [`conjugacy`]: numerical conjugacies for perturbed actions, Hölder
//!   estimates, splitting checks, power-law fits and germ linearization.
//! * [`hyperbolicity`]: subadditive certificates, periodic-orbit exponents
//!   and bunching at periodic points.

pub mod centralizer;
pub mod conjugacy;
pub mod exact;
pub mod hyperbolicity;
pub mod hypothesis;
pub mod lattice;
pub mod lyapunov;
pub mod mp;
pub mod spectrum;

/// Default working precision in bits for eigenvalue logarithms.
pub const DEFAULT_PRECISION: usize = 128;
