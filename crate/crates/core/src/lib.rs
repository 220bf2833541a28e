//! Federated minimax optimization.
//!
//! Simulates a server and `m` agents jointly solving
//! `min_x max_y (1/m) Σ_i f_i(x, y)` with centralized gradient descent
//! ascent, Local SGDA (full local gradients, no correction) and FedGDA-GT
//! (local steps corrected by gradient tracking). Around the solvers sit
//! seeded problem generators, closed-form references, fixed-point analysis
//! and generalization-bound evaluators.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the common double-precision case.

// `!(a > b)` is used on purpose so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algorithms;
pub mod analysis;
pub mod datagen;
pub mod error;
pub mod genbounds;
pub mod iterate;
pub mod linalg;
pub mod problems;
pub mod scalar;
pub mod sets;
pub mod vector;

pub use error::{FedError, Result};
pub use iterate::Iterate;
pub use problems::{LocalObjective, MinimaxProblem};
pub use scalar::Scalar;
pub use sets::{FeasibleSet, ProductSet};

pub type Iterate64 = Iterate<f64>;
pub type FeasibleSet64 = FeasibleSet<f64>;
pub type ProductSet64 = ProductSet<f64>;
pub type ScalarTwoAgent64 = problems::ScalarTwoAgent<f64>;
pub type UncoupledQuadratic64 = problems::UncoupledQuadratic<f64>;
pub type RobustLinearRegression64 = problems::RobustLinearRegression<f64>;
pub type ProblemInstance64 = problems::ProblemInstance<f64>;
pub type AlgoConfig64 = algorithms::AlgoConfig<f64>;
pub type RunTrace64 = algorithms::RunTrace<f64>;

pub type Iterate32 = Iterate<f32>;
pub type ScalarTwoAgent32 = problems::ScalarTwoAgent<f32>;
pub type UncoupledQuadratic32 = problems::UncoupledQuadratic<f32>;
