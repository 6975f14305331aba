//! Potential theory over the complex numbers: the chordal kernel on the
//! projective line, numeric root clouds for exact forms, weighted Fekete
//! sums, escape-rate Green functions with certified tails, equilibrium
//! sampling, and smoothing of point masses at scale epsilon.

pub mod fekete;
pub mod green;
pub mod point;
pub mod regularize;
pub mod roots;

pub use fekete::{discrepancy_identity_check, fekete_sum, mahler_g, msharp_inf, WeightFn};
pub use green::{energy_estimate, equilibrium_sample, GreenEvaluator};
pub use point::PPoint;
pub use regularize::{
    pair_energy, regularized_fekete, smear_average, smeared_log, smoothed_log_kernel, C_XI,
};
pub use roots::{roots_complex, RootCloud};
