use rand::seq::SliceRandom;
use rand::Rng;
use rustc_hash::FxHashSet;

use super::degrees::DegreeSequence;
use super::graph::{Edge, Graph, NodeId};
use crate::error::{Error, Result};

/// Multiset of free stubs, one entry per unmatched half-edge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StubPool {
    stubs: Vec<NodeId>,
}

impl StubPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_degrees(degrees: &DegreeSequence) -> Self {
        let mut stubs = Vec::with_capacity(degrees.total());
        for (node, &k) in degrees.degrees().iter().enumerate() {
            stubs.extend(std::iter::repeat_n(node, k));
        }
        Self { stubs }
    }

    pub fn push(&mut self, node: NodeId) {
        self.stubs.push(node);
    }

    /// Releases both endpoints of a broken edge.
    pub fn release(&mut self, e: Edge) {
        self.stubs.push(e.lo());
        self.stubs.push(e.hi());
    }

    pub fn len(&self) -> usize {
        self.stubs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stubs.is_empty()
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.stubs
    }
}

impl FromIterator<NodeId> for StubPool {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        Self {
            stubs: iter.into_iter().collect(),
        }
    }
}

/// How invalid stub pairs are handled.
///
/// With `max_retries = 0` a pair that would form a self-loop or duplicate
/// edge is dropped and both stubs are consumed. With `r > 0` the stubs of
/// dropped pairs are reshuffled and matched again, up to `r` extra rounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchPolicy {
    pub max_retries: usize,
}

/// Result of a stub matching.
#[derive(Debug, Clone)]
pub struct Matched {
    pub graph: Graph,
    /// Pairs dropped as self-loops or multi-edges.
    pub discards: usize,
    /// Edges added by the matching, in the order they were formed.
    pub new_edges: Vec<Edge>,
    /// Stubs of the dropped pairs.
    pub leftover: Vec<NodeId>,
}

/// Uniform stub matching: shuffle, pair consecutive stubs, drop pairs that
/// would create a self-loop or an edge already in `graph`.
pub fn rematch_stubs<R: Rng + ?Sized>(
    graph: Graph,
    stubs: StubPool,
    rng: &mut R,
) -> Result<Matched> {
    rematch_stubs_with(graph, stubs, MatchPolicy::default(), rng)
}

pub fn rematch_stubs_with<R: Rng + ?Sized>(
    graph: Graph,
    stubs: StubPool,
    policy: MatchPolicy,
    rng: &mut R,
) -> Result<Matched> {
    match_pool(graph, stubs, policy, |_| false, rng)
}

/// As [`rematch_stubs_with`], but pairs forming a dyad in `avoid` are
/// treated like multi-edges. The temporal model passes the edges broken in
/// the current step so that a broken edge cannot re-form at once; every
/// edge shared by consecutive snapshots is then a genuine survivor.
pub fn rematch_stubs_avoiding<R: Rng + ?Sized>(
    graph: Graph,
    stubs: StubPool,
    avoid: &FxHashSet<Edge>,
    policy: MatchPolicy,
    rng: &mut R,
) -> Result<Matched> {
    match_pool(graph, stubs, policy, |e| avoid.contains(&e), rng)
}

fn match_pool<R: Rng + ?Sized>(
    mut graph: Graph,
    stubs: StubPool,
    policy: MatchPolicy,
    forbidden: impl Fn(Edge) -> bool,
    rng: &mut R,
) -> Result<Matched> {
    if stubs.len() % 2 == 1 {
        return Err(Error::OddStubCount(stubs.len()));
    }
    if let Some(&bad) = stubs.stubs.iter().find(|&&s| s >= graph.node_count()) {
        return Err(Error::InvalidGraph(format!(
            "stub at node {bad} outside 0..{}",
            graph.node_count()
        )));
    }
    let mut pool = stubs.stubs;
    let mut new_edges = Vec::with_capacity(pool.len() / 2);
    let mut rounds = 0;
    loop {
        pool.shuffle(rng);
        let mut rejected = Vec::new();
        for pair in pool.chunks_exact(2) {
            match Edge::new(pair[0], pair[1]) {
                Some(e) if !forbidden(e) && graph.insert(e) => new_edges.push(e),
                _ => rejected.extend_from_slice(pair),
            }
        }
        if rejected.is_empty() || rounds == policy.max_retries {
            return Ok(Matched {
                graph,
                discards: rejected.len() / 2,
                new_edges,
                leftover: rejected,
            });
        }
        rounds += 1;
        pool = rejected;
    }
}

/// Configuration-model graph for `degrees`.
pub fn configuration_model<R: Rng + ?Sized>(degrees: &DegreeSequence, rng: &mut R) -> Result<Matched> {
    configuration_model_with(degrees, MatchPolicy::default(), rng)
}

pub fn configuration_model_with<R: Rng + ?Sized>(
    degrees: &DegreeSequence,
    policy: MatchPolicy,
    rng: &mut R,
) -> Result<Matched> {
    let total = degrees.total();
    if total % 2 == 1 {
        return Err(Error::OddDegreeSum(total));
    }
    rematch_stubs_with(
        Graph::empty(degrees.len()),
        StubPool::from_degrees(degrees),
        policy,
        rng,
    )
}
