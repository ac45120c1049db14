//! Likelihood-free inference with an exponential-kernel ABC pseudo-posterior.
//!
//! The crate is organised around the pieces of the sampler:
//!
//! - [`models`]: prior + simulator pairs, truth generators and a finite toy model.
//! - [`statistics`]: summary statistics and distances on statistic space.
//! - [`smc`]: the adaptive SMC driver (ESS-targeted temperature ladder,
//!   systematic resampling, running log normalizing constant).
//! - [`mcmc`]: pseudo-marginal random-walk Metropolis–Hastings rejuvenation.
//! - [`madapt`]: adaptation of the number of simulated replicates per particle.
//! - [`bounds`]: empirical PAC-Bayes bounds, adaptive bandwidth selection and
//!   rate calculators.
//! - [`cli`]: configuration documents, presets and experiment orchestration
//!   behind the `pacabc` binary.
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/`
//! directory (`cargo run --release --example <name>`).

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod madapt;
pub mod math;
pub mod mcmc;
pub mod models;
pub mod rng;
pub mod smc;
pub mod statistics;

pub use error::{Error, Result};
