//! Genetic column generation for discrete optimal transport.
//!
//! The full transport LP over `l_1 x ... x l_N` configurations is never
//! formed. Instead an active set of `O(sum l_i)` configurations is kept,
//! the LP restricted to it is solved exactly ([`reduced_lp`]), and new
//! configurations are found by mutating the support of the current plan and
//! accepting mutations with positive gain ([`gencol`]). [`oracle`] solves
//! small instances densely and certifies results; [`counterexample`] holds
//! a three-marginal instance where the single-entry rule stalls.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below fix the scalar.

pub mod counterexample;
pub mod error;
pub mod gencol;
pub mod model;
pub mod oracle;
pub mod reduced_lp;
pub mod scalar;

pub use error::{Error, Result};
pub use gencol::{run, run_from, GenCol, GenColConfig, SearchRule, SolveReport, Termination};
pub use model::{
    Configuration, CostSpec, DiscreteMarginal, DualPotentials, Problem, SparsePlan,
};
pub use oracle::{Certificate, CcmViolation, DenseSolution};
pub use reduced_lp::{ActiveSet, Basis, ReducedSolution};
pub use scalar::{Real, Tolerances};

pub type Problem64 = Problem<f64>;
pub type Problem32 = Problem<f32>;
pub type Marginal64 = DiscreteMarginal<f64>;
pub type Marginal32 = DiscreteMarginal<f32>;
pub type Cost64 = CostSpec<f64>;
pub type Cost32 = CostSpec<f32>;
pub type SparsePlan64 = SparsePlan<f64>;
pub type SparsePlan32 = SparsePlan<f32>;
pub type Potentials64 = DualPotentials<f64>;
pub type Potentials32 = DualPotentials<f32>;
pub type SolveReport64 = SolveReport<f64>;
pub type SolveReport32 = SolveReport<f32>;
