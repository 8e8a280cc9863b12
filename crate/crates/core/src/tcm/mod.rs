//! Temporal configuration model: edges persist by Bernoulli trial, broken
//! edges release their stubs, stubs are rematched uniformly.

mod model;
mod network;
mod process;

pub use model::{BetaParams, ModelKind, PersistenceModel, Window};
pub use network::{evolve, evolve_with, persistence_drift_report, DriftReport, DriftRow, TemporalNetwork};
pub(crate) use network::persisting_edges;
pub use process::{StepStats, TcmProcess};
