//! Temporal configuration model networks: persistence models, estimators,
//! SIR epidemics on evolving contact graphs, and degree-distribution
//! distances.
//!
//! Numerical routines that admit exact arithmetic are generic over
//! [`Scalar`]; stochastic simulation runs in `f64`.

pub mod dataio;
pub mod degree;
pub mod epidemics;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod metrics;
pub mod netcore;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod tcm;

pub use degree::DegreeDistribution;
pub use error::{Error, ErrorKind, Result};
pub use netcore::{Edge, Graph, NodeId};
pub use rng::{child_rng, child_seed, rng_from_seed, SimRng};
pub use scalar::{Real, Scalar};
pub use tcm::{BetaParams, ModelKind, PersistenceModel, TemporalNetwork, Window};

pub type DegreeDist64 = DegreeDistribution<f64>;
pub type DegreeDist32 = DegreeDistribution<f32>;
pub type Pgf64 = epidemics::Pgf<f64>;
pub type Pgf32 = epidemics::Pgf<f32>;
pub type BetaParams64 = BetaParams<f64>;
pub type BetaParams32 = BetaParams<f32>;
