//! Max-affine regression.
//!
//! The response is modeled as the pointwise maximum of `k` affine functions,
//! `y = max_j (<x, theta_j> + b_j) + noise`. This crate estimates the pieces with
//! alternating minimization (assign each sample to the piece attaining its max,
//! then refit every piece by least squares), initialized by a spectral moment
//! estimate of the span of the slopes followed by a scale-invariant random
//! search inside that span. Real phase retrieval, `y = |<x, theta>| + noise`,
//! is handled by the analogous sign-flipping iteration.
//!
//! Module map:
//!
//! - [`numerics`]: minimum-norm least squares, symmetric eigendecomposition,
//!   seeded random streams.
//! - [`model`]: parameters, evaluation, the argmax partition and geometric
//!   quantities of a parameter set.
//! - [`covariates`]: covariate laws, synthetic datasets and CSV I/O.
//! - [`am`]: the alternating-minimization estimators.
//! - [`init`]: spectral subspace estimate and low-dimensional random search.
//! - [`metrics`]: relabeling-invariant distances and diagnostics.
//! - [`experiments`]: the simulation harness and its config/CSV plumbing.
//!
//! The `examples/` directory of this crate has one runnable program per
//! capability; `cargo run --example fit_synthetic` is a good place to start.

pub mod am;
pub mod covariates;
mod error;
pub mod experiments;
pub mod init;
pub mod metrics;
pub mod model;
pub mod numerics;

pub use error::{Error, Result};

pub use am::{am_run, am_step, pr_run, pr_step, AmTrace, PrTrace};
pub use covariates::{synthesize, synthesize_pr, CovariateDist, Dataset};
pub use init::{full_init, pca_subspace, random_search, LiftedBasis, SubspaceEstimate};
pub use metrics::{dist, scaled_dist, subspace_error, MatchedDistance};
pub use model::{AffineParam, GeometryReport, ParamSet, Partition};
pub use numerics::{Matrix, RngStream, Vector};
