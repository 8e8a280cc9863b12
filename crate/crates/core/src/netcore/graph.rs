use std::fmt;

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;

use crate::degree::DegreeDistribution;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense node index in `0..N`.
pub type NodeId = usize;

/// Undirected edge stored with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    lo: NodeId,
    hi: NodeId,
}

impl Edge {
    /// Normalises the endpoint order. Returns `None` for a self-loop.
    pub fn new(a: NodeId, b: NodeId) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(Self { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(self) -> NodeId {
        self.lo
    }

    pub fn hi(self) -> NodeId {
        self.hi
    }

    pub fn endpoints(self) -> (NodeId, NodeId) {
        (self.lo, self.hi)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

pub(crate) type EdgeSet = IndexSet<Edge, FxBuildHasher>;

/// Simple undirected graph on nodes `0..N`.
///
/// Edges live in an insertion-ordered hash set: membership is O(1) expected
/// and iteration order is a deterministic function of the operations applied,
/// so seeded runs replay exactly. Equality is set equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: EdgeSet,
}

impl Graph {
    pub fn empty(node_count: usize) -> Self {
        Self {
            node_count,
            edges: EdgeSet::default(),
        }
    }

    /// Builds a graph from endpoint pairs, rejecting self-loops, duplicates
    /// and out-of-range endpoints.
    pub fn from_edges<I>(node_count: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Self::empty(node_count);
        for (a, b) in pairs {
            if a >= node_count || b >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) outside 0..{node_count}"
                )));
            }
            let e = Edge::new(a, b)
                .ok_or_else(|| Error::InvalidGraph(format!("self-loop at node {a}")))?;
            if !g.edges.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge {e}")));
            }
        }
        Ok(g)
    }

    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                g.edges.insert(Edge { lo: a, hi: b });
            }
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        Edge::new(a, b).is_some_and(|e| self.edges.contains(&e))
    }

    /// Inserts an edge; `false` if it was already present.
    ///
    /// Panics if an endpoint is out of range.
    pub fn insert(&mut self, e: Edge) -> bool {
        assert!(e.hi < self.node_count, "edge {e} outside 0..{}", self.node_count);
        self.edges.insert(e)
    }

    /// Edges in storage order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    /// Edges in ascending `(lo, hi)` order.
    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut v: Vec<Edge> = self.edges.iter().copied().collect();
        v.sort_unstable();
        v
    }

    /// Keeps the edges for which `keep` returns true, preserving order.
    pub fn retain(&mut self, mut keep: impl FnMut(Edge) -> bool) {
        self.edges.retain(|e| keep(*e));
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.node_count];
        for e in &self.edges {
            d[e.lo] += 1;
            d[e.hi] += 1;
        }
        d
    }

    /// Number of edges present in both graphs.
    pub fn common_edge_count(&self, other: &Graph) -> usize {
        let (small, large) = if self.edges.len() <= other.edges.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.edges.iter().filter(|e| large.edges.contains(*e)).count()
    }

    /// Edge set union over the same node set.
    pub fn union_with(&mut self, other: &Graph) {
        assert_eq!(self.node_count, other.node_count, "node counts differ");
        self.edges.extend(other.edges.iter().copied());
    }

    /// Checks the simple-graph invariants. Always true for graphs built
    /// through this API; used by tests and after deserialisation.
    pub fn validate(&self) -> Result<()> {
        for e in &self.edges {
            if e.lo >= e.hi || e.hi >= self.node_count {
                return Err(Error::InvalidGraph(format!("bad edge {e}")));
            }
        }
        Ok(())
    }
}

/// Mass at `k` is the fraction of the `N` nodes with degree `k`, isolated
/// nodes included.
pub fn degree_distribution<S: Scalar>(graph: &Graph) -> DegreeDistribution<S> {
    if graph.node_count == 0 {
        return DegreeDistribution::point(0);
    }
    DegreeDistribution::from_degrees(&graph.degrees()).expect("non-empty node set")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_normalises_and_rejects_loops() {
        assert_eq!(Edge::new(3, 1).unwrap().endpoints(), (1, 3));
        assert!(Edge::new(2, 2).is_none());
    }

    #[test]
    fn from_edges_validates() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        let g = Graph::from_edges(3, [(0, 1), (2, 1)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(1, 2));
        assert_eq!(g.degrees(), vec![1, 2, 1]);
    }

    #[test]
    fn equality_ignores_order() {
        let a = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let b = Graph::from_edges(4, [(2, 3), (0, 1)]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degree_distribution_examples() {
        let two = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(degree_distribution::<f64>(&two).masses(), &[0.0, 1.0]);

        let empty = Graph::empty(5);
        assert_eq!(degree_distribution::<f64>(&empty).masses(), &[1.0]);

        let k4 = Graph::complete(4);
        let d = degree_distribution::<f64>(&k4);
        assert_eq!(d.mass(3), 1.0);
        assert_eq!(d.max_degree(), 3);
    }
}
