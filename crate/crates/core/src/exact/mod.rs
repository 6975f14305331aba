//! Exact rational algebra: univariate polynomials, binary forms, homogeneous
//! lifts of rational self-maps, multiplicity strata, and the unit `D*`.

pub mod divisor;
pub mod form;
pub mod parse;
pub mod poly;

pub use divisor::{dstar, dstar_divisor, MultiplicityStrata, Stratum, ZerosDivisor};
pub use form::{divisor_fn_eq_a, resultant_pair, wedge_pairs, BinaryForm, CoeffBudget, MapLift};
pub use poly::{resultant_uni, squarefree_strata, Rat, UniPoly};
