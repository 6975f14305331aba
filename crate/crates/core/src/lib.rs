//! Exact arithmetic and potential theory on the projective line over Q.
//!
//! The crate is organized in layers:
//!
//! * [`exact`] — arbitrary-precision polynomials, binary forms, homogeneous
//!   lifts of rational maps, multiplicity strata and the unit `D*` attached
//!   to the diagonal of a zeros divisor. Everything here is exact rational
//!   arithmetic; no floats.
//! * [`places`] — places of Q, valuations, Gauss norms, the product formula,
//!   and exact logarithmic bookkeeping (rational coefficients of `log p`).
//! * [`arch`] — the archimedean local theory: chordal metric, simultaneous
//!   root finding on squarefree strata, Mahler measures, Fekete sums,
//!   dynamical Green functions, equilibrium sampling, and the smoothing
//!   kernel used for regularized energies.
//! * [`nonarch`] — the p-adic local theory on the tree of closed disks:
//!   joins, Hsia and canonical kernels, the piecewise-affine tree functions
//!   with their Dirichlet norms, exact Green escape rates, and p-adic Fekete
//!   sums for rational configurations.
//! * [`heights`] — adelic assembly: weighted Mahler heights of divisors,
//!   canonical heights of rational points, and the global Fekete identity.
//! * [`experiments`] — seeded, reproducible experiment drivers producing
//!   CSV/JSON tables: equidistribution discrepancies, Fekete configurations,
//!   diagonal scans, proximity scans, Riesz residuals, and the regularized
//!   inequality suite.
//!
//! Exact quantities stay exact as long as possible (rationals, or rational
//! coefficients of `log p`); floating point enters only where a value is
//! genuinely transcendental, and every numeric result carries an error bound.

pub mod arch;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod heights;
pub mod nonarch;
pub mod places;
pub mod util;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
