//! Static graphs, degree sequences and configuration-model stub matching.

mod degrees;
mod graph;
mod matching;

pub use degrees::{sample_poisson_degrees, DegreeLaw, DegreeSequence};
pub use graph::{degree_distribution, Edge, Graph, NodeId};
pub use matching::{
    configuration_model, configuration_model_with, rematch_stubs, rematch_stubs_avoiding, rematch_stubs_with, MatchPolicy,
    Matched, StubPool,
};
