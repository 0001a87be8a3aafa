//! Stability certificates for weighted-homogeneous systems with a constant delay.
//!
//! The pipeline runs from a [`SystemModel`] with its growth constants
//! ([`homcore`]) through the bounds of a Lyapunov–Krasovskii functional
//! ([`functional`]) to attraction radii and decay envelopes ([`estimates`]),
//! which are then checked against simulated solutions ([`sim`]).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod check;
pub mod error;
pub mod estimates;
pub mod example;
pub mod functional;
pub mod history;
pub mod homcore;
pub mod model;
pub mod monomial;
pub mod roots;
pub mod sim;

pub use check::BoundCheck;
pub use error::{Error, Result};
pub use estimates::{EstimateCertificate, SearchGrid};
pub use functional::{FunctionalCertificate, Variant, WeightSplit};
pub use history::HistoryFunction;
pub use homcore::{BoundConstants, HomogeneousStructure, SamplingSpec};
pub use model::{Domain, LyapunovFunction, SystemModel, VectorField};
pub use sim::{Envelope, Trajectory};
