//! Partial and marginal association between mixed-type outcomes.
//!
//! Each outcome (continuous, binary or ordinal) is adjusted for covariates with
//! a regression model, its residual randomness is mapped to a common uniform
//! scale by a surrogate draw inside the model's CDF interval, and association
//! is measured with Kendall's tau on those residuals.

pub mod assoc;
pub mod data;
pub mod dist;
pub mod error;
pub mod inference;
pub mod ks;
pub mod models;
pub mod rng;
pub mod simgen;
pub mod surrogate;

pub use data::{encode_ordinal, Covariates, Dataset, PairData};
pub use dist::Link;
pub use error::{Error, Result};
pub use models::{fit, loglik_at, Family, FittedModel, ModelSpec, OutcomeKind, Params};
pub use rng::RngStream;
pub use assoc::{
    kendall_tau, marginal_t, moderation, moderation_analysis, partial_t, t_measure, AssocEstimate,
    AssocKind, ModerationResult,
};
pub use inference::{
    bootstrap_moderation, bootstrap_t, p_value_composite, p_value_simple, summarize,
    BootstrapConfig, BootstrapDistribution, Summary,
};
pub use surrogate::{normalize, residual, residual_matrix, surrogate_draw, ResidualMatrix};
