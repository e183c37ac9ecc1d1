//! Exact verification toolkit for conditional Shannon information inequalities.
//!
//! Finite joint distributions are held with exact rational probabilities
//! ([`Rational`] by default, any [`Exact`] scalar in general). Information
//! measures are reported in bits as `f64`; every support-level condition and
//! every error-term certificate is decided on the exact rationals.
//!
//! Modules:
//! - [`probkit`]: distributions, marginals, conditioning, Shannon measures.
//! - [`lawcheck`]: witness-producing checkers for the side conditions.
//! - [`ineqlab`]: inequality gaps, error terms and theorem certificates.
//! - [`catalog`]: deterministic families and seeded samplers.
//! - [`graphlab`]: colored bipartite graphs, matching partitions, biclique covers.

pub mod catalog;
pub mod error;
pub mod graphlab;
pub mod ineqlab;
pub mod lawcheck;
pub mod probkit;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Exact;

/// Arbitrary-precision rational; the default probability scalar.
pub type Rational = num_rational::BigRational;

/// Fixed-width rational for small hand-built examples. Arithmetic overflow panics.
pub type Rational64 = num_rational::Rational64;

/// Joint distribution over [`Rational`] probabilities.
pub type Distribution = probkit::JointDistribution<Rational>;

/// Colored bipartite graph with [`Rational`] edge weights.
pub type Graph = graphlab::ColoredBipartiteGraph<Rational>;

/// Absolute tolerance for every floating-point comparison of information measures.
pub const TAU: f64 = 1e-9;
