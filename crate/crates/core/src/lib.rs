//! Online learning to rank by multileave gradient descent.
//!
//! The learners ([`engine`]) optimize either a direct linear ranker or a
//! ranker that scores documents by weighted similarity to a small set of
//! reference documents ([`ranking`]). The cascading learner starts in the
//! small similarity space, detects convergence, and continues in the linear
//! space with rescaled weights. Users are simulated with cascade click models
//! ([`clicks`]) over multileaved result lists ([`multileaving`]) and runs are
//! scored with NDCG ([`evaluation`]).
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! and `*32` aliases below name the common instantiations.

// Negated comparisons such as `!(x > 0)` are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clicks;
pub mod engine;
pub mod error;
pub mod evaluation;
pub mod kmeans;
pub mod letor;
pub mod multileaving;
pub mod ranking;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Dataset64 = letor::Dataset<f64>;
pub type QueryGroup64 = letor::QueryGroup<f64>;
pub type Document64 = letor::Document<f64>;
pub type RankerModel64 = ranking::RankerModel<f64>;
pub type LinearModel64 = ranking::LinearModel<f64>;
pub type SimilarityModel64 = ranking::SimilarityModel<f64>;
pub type ReferenceSet64 = ranking::ReferenceSet<f64>;
pub type EngineConfig64 = engine::EngineConfig<f64>;
pub type RunTrace64 = engine::RunTrace<f64>;

pub type Dataset32 = letor::Dataset<f32>;
pub type RankerModel32 = ranking::RankerModel<f32>;
pub type EngineConfig32 = engine::EngineConfig<f32>;
pub type RunTrace32 = engine::RunTrace<f32>;
