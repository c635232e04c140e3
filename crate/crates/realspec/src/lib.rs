//! Real-eigenvalue statistics for products of independent real Gaussian matrices.
//!
//! An `N x N` matrix product `P = X_1 ... X_m` with i.i.d. standard real Gaussian
//! entries has a random number of real eigenvalues. This crate computes, exactly
//! where the arithmetic allows it (`m <= 2`, square or rectangular factors) and
//! numerically otherwise:
//!
//! - the full probability distribution of the number of real eigenvalues,
//!   via generating-function determinants over a symbolic ring ([`probabilities`]);
//! - the probability that the whole spectrum is real, by two independent routes;
//! - the expected number of real eigenvalues;
//! - finite-`N` Pfaffian correlation-kernel entries, spectral densities, and
//!   their local and global scaling limits ([`kernels`]);
//! - the one- and two-point eigenvalue weight functions and the skew-orthogonal
//!   polynomials underlying the Pfaffian structure ([`weights`], [`moments`]);
//! - a deterministic, parallel Monte Carlo sampler that classifies eigenvalues
//!   through the real Schur form and independently verifies every quantity
//!   above ([`montecarlo`]).
//!
//! Exact values live in the commutative ring Q[sqrt(2), sqrt(pi)] implemented by
//! [`exactnum::ExactValue`]; every tabulated probability and expectation is a
//! finite combination of monomials `sqrt2^s * sqrtpi^p` with rational
//! coefficients.

pub mod error;
pub mod exactnum;
pub mod kernels;
pub mod moments;
pub mod montecarlo;
pub mod mpfloat;
pub mod probabilities;
pub mod special;
pub mod weights;

pub use error::Error;
pub use exactnum::{ExactValue, ZetaPolynomial};
pub use moments::AlphaMatrix;
pub use probabilities::RealCountDistribution;
pub use special::QuadratureSpec;
pub use weights::ProductSpec;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
