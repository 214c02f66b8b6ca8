//! Stochastic configuration networks (SCNs): single-hidden-layer approximators
//! grown one random node at a time, where every candidate node must pass a
//! data-dependent inequality before it may join the model. The inequality
//! keeps each added node useful enough that the training residual provably
//! contracts, which is what separates these builders from naive incremental
//! random-basis learners.
//!
//! The crate provides the three construction variants (constructive weights,
//! moving-window re-solve, full global re-solve), the unconstrained baseline
//! they are measured against, the candidate search with its adaptive
//! admissibility relaxation, and the data plumbing used by the command-line
//! tools: CSV loading, min-max normalization, and the DB1 benchmark
//! generator.

pub mod configurator;
pub mod data;
pub mod error;
pub mod linalg;
pub mod model;
pub mod trainer;
pub mod weights;

pub use configurator::{AlgorithmKind, CandidateScore, RngStream, ScnConfig, TauMode};
pub use data::{Dataset, NormMeta, SplitSpec};
pub use error::{Result, ScnError};
pub use linalg::{Matrix, SolveTolerance};
pub use model::{ActivationKind, HiddenNode, ScnModel};
pub use trainer::{StopReason, TrainReport, TrainingTrace};
