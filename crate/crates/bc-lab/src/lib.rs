//! Numerical laboratory for event sequences: exact probability engines over
//! three model families, block-subsequence constructions with certificates,
//! convergence condition diagnostics, and seeded Monte Carlo cross-checks.
//!
//! Entry points:
//! - [`models::Model`] — marginals, pair probabilities, exact range unions,
//!   certified tail bounds, moment tables and path sampling.
//! - [`blocks`] — the two inductive block constructions and derived
//!   blocked models.
//! - [`diagnostics`] — condition checkers (summability, pairwise
//!   independence, mixing, matrix boundedness, variance growth) and the
//!   closed-form three-point counterexample arithmetic.
//! - [`montecarlo`] — reproducible path sampling, empirical moments and
//!   pathwise block-equivalence verification.
//! - [`config`] / [`runner`] — the JSON config schema and batch commands
//!   behind the `bc-lab` binary.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod blocks;
pub mod config;
pub mod diagnostics;
pub mod models;
pub mod montecarlo;
pub mod runner;
pub mod space;
pub mod sum;

pub use blocks::{
    block_probabilities, blocked_model, build_blocks_theorem_a, build_blocks_theorem_b,
    BlockError, BlockPlan, ConstructionTag,
};
pub use models::{
    FiniteStaticModel, IndependentModel, MarginalSpec, Model, ModelError, MomentEntry,
    MomentTable, TwoStateMarkovModel,
};
pub use space::{Event, FiniteSpace, SpaceError};
