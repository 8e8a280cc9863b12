use rustc_hash::FxHashMap;

use super::pings::PingRecord;
use crate::error::{invalid, Error, Result};
use crate::estimate::{beta_from_moments, fit_model3_node_dist, one_step_survival, two_step_survival};
use crate::netcore::{Edge, Graph, NodeId};
use crate::tcm::{ModelKind, PersistenceModel, Window};

/// Graphs over a shared node set, one per period.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSequence {
    /// External id of each dense node index.
    node_ids: Vec<i64>,
    graphs: Vec<Graph>,
    /// Period index of each graph (day or week number).
    labels: Vec<usize>,
}

impl NetworkSequence {
    /// Sequence whose external ids equal the dense indices.
    pub fn from_graphs(graphs: Vec<Graph>) -> Result<Self> {
        let n = graphs.first().map(Graph::node_count).ok_or(Error::EmptyInput("graphs"))?;
        if graphs.iter().any(|g| g.node_count() != n) {
            return Err(invalid("all graphs must share one node set"));
        }
        let labels = (0..graphs.len()).collect();
        Ok(Self {
            node_ids: (0..n as i64).collect(),
            graphs,
            labels,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn node_ids(&self) -> &[i64] {
        &self.node_ids
    }

    pub fn node_index(&self) -> FxHashMap<i64, NodeId> {
        self.node_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect()
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }
}

/// Splits retained pings into periods of `period_length` seconds starting at
/// the earliest timestamp; period `p` has edge `(i, j)` iff at least one
/// ping between `i` and `j` falls in `[p·L, (p+1)·L)`.
///
/// Nodes are every user in the retained pings, indexed by first appearance
/// in `(timestamp, user_a, user_b, rssi)` order, so input order does not
/// matter. `n_periods` defaults to the number of periods the data spans;
/// later pings are ignored.
pub fn build_period_networks(
    pings: &[PingRecord],
    period_length: i64,
    n_periods: Option<usize>,
) -> Result<NetworkSequence> {
    build_period_networks_with_roster(pings, period_length, n_periods, None)
}

/// As [`build_period_networks`], but with the node set pinned to `roster`
/// (in that order). Pings naming a user outside the roster are an error.
pub fn build_period_networks_with_roster(
    pings: &[PingRecord],
    period_length: i64,
    n_periods: Option<usize>,
    roster: Option<&[i64]>,
) -> Result<NetworkSequence> {
    if period_length <= 0 {
        return Err(invalid(format!("period length must be positive, got {period_length}")));
    }
    let mut sorted = pings.to_vec();
    sorted.sort_unstable();
    let start = sorted.first().map(|p| p.timestamp).unwrap_or(0);
    let periods = match n_periods {
        Some(n) => n,
        None => match sorted.last() {
            Some(last) => ((last.timestamp - start) / period_length) as usize + 1,
            None => 0,
        },
    };

    let mut node_ids: Vec<i64> = Vec::new();
    let mut index: FxHashMap<i64, NodeId> = FxHashMap::default();
    if let Some(r) = roster {
        for &id in r {
            if index.insert(id, node_ids.len()).is_some() {
                return Err(invalid(format!("user {id} listed twice in roster")));
            }
            node_ids.push(id);
        }
    }
    let mut edges: Vec<Vec<Edge>> = vec![Vec::new(); periods];
    for p in &sorted {
        let mut lookup = |id: i64| -> Result<NodeId> {
            if let Some(&i) = index.get(&id) {
                return Ok(i);
            }
            if roster.is_some() {
                return Err(Error::Data(format!("user {id} not in roster")));
            }
            index.insert(id, node_ids.len());
            node_ids.push(id);
            Ok(node_ids.len() - 1)
        };
        let a = lookup(p.user_a)?;
        let b = lookup(p.user_b)?;
        let period = ((p.timestamp - start) / period_length) as usize;
        if period < periods {
            if let Some(e) = Edge::new(a, b) {
                edges[period].push(e);
            }
        }
    }
    let n = node_ids.len();
    let graphs = edges
        .into_iter()
        .map(|es| {
            let mut g = Graph::empty(n);
            for e in es {
                g.insert(e);
            }
            g
        })
        .collect();
    Ok(NetworkSequence {
        node_ids,
        graphs,
        labels: (0..periods).collect(),
    })
}

/// Unions consecutive groups of `group_size` graphs (e.g. days into weeks).
pub fn union_networks(seq: &NetworkSequence, group_size: usize) -> Result<NetworkSequence> {
    if group_size == 0 {
        return Err(invalid("group size must be at least 1"));
    }
    if !seq.graphs.len().is_multiple_of(group_size) {
        return Err(Error::Data(format!(
            "{} periods do not split into groups of {group_size}",
            seq.graphs.len()
        )));
    }
    let graphs = seq
        .graphs
        .chunks(group_size)
        .map(|chunk| {
            let mut g = chunk[0].clone();
            for other in &chunk[1..] {
                g.union_with(other);
            }
            g
        })
        .collect::<Vec<_>>();
    let labels = (0..graphs.len()).collect();
    Ok(NetworkSequence {
        node_ids: seq.node_ids.clone(),
        graphs,
        labels,
    })
}

/// Fits a persistence model from the first graphs of a sequence.
///
/// Model 1 uses `p̂ = |E₁∩E₂|/|E₁|`. Models 2 and 3 match a Beta law to the
/// one- and two-step survival ratios from the first graph; the fitted
/// probabilities are held fixed for the whole prediction horizon.
pub fn fit_from_sequence(seq: &NetworkSequence, kind: ModelKind) -> Result<PersistenceModel> {
    let graphs = seq.graphs();
    match kind {
        ModelKind::Model0 => Ok(PersistenceModel::Model0),
        ModelKind::Model1 => PersistenceModel::model1(one_step_survival(graphs, 0)?),
        ModelKind::Model2 | ModelKind::Model3 => {
            let z = one_step_survival(graphs, 0)?;
            let v = two_step_survival(graphs, 0)?;
            let dist = if kind == ModelKind::Model2 {
                beta_from_moments(z, v)?
            } else {
                fit_model3_node_dist(z, v)?
            };
            Ok(if kind == ModelKind::Model2 {
                PersistenceModel::Model2 {
                    dist,
                    window: Window::Forever,
                }
            } else {
                PersistenceModel::Model3 {
                    dist,
                    window: Window::Forever,
                }
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ping(t: i64, a: i64, b: i64) -> PingRecord {
        PingRecord {
            timestamp: t,
            user_a: a,
            user_b: b,
            rssi: -60,
        }
    }

    #[test]
    fn single_ping_single_period() {
        let s = build_period_networks(&[ping(0, 10, 20)], 100, Some(3)).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.graphs()[0].edge_count(), 1);
        assert!(s.graphs()[1].is_empty() && s.graphs()[2].is_empty());
        assert_eq!(s.node_ids(), &[10, 20]);
    }

    #[test]
    fn boundary_ping_opens_next_period() {
        let s = build_period_networks(&[ping(0, 1, 2), ping(100, 2, 1)], 100, None).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.graphs().iter().all(|g| g.has_edge(0, 1)));
    }

    #[test]
    fn periods_start_at_first_ping() {
        let s = build_period_networks(&[ping(1000, 1, 2), ping(1099, 1, 3), ping(1100, 2, 3)], 100, None).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.graphs()[0].edge_count(), 2);
        assert_eq!(s.graphs()[1].edge_count(), 1);
    }

    #[test]
    fn roster_pins_node_set() {
        let roster = [5, 1, 2, 9];
        let s = build_period_networks_with_roster(&[ping(0, 1, 2)], 10, None, Some(&roster)).unwrap();
        assert_eq!(s.node_count(), 4);
        assert!(s.graphs()[0].has_edge(1, 2));
        assert!(build_period_networks_with_roster(&[ping(0, 1, 7)], 10, None, Some(&roster)).is_err());
    }

    #[test]
    fn union_examples() {
        let g1 = Graph::from_edges(3, [(0, 1)]).unwrap();
        let g2 = Graph::from_edges(3, [(1, 2)]).unwrap();
        let seq = NetworkSequence::from_graphs(vec![g1.clone(), g2.clone()]).unwrap();
        assert_eq!(union_networks(&seq, 1).unwrap(), seq);
        let u = union_networks(&seq, 2).unwrap();
        assert_eq!(u.len(), 1);
        assert_eq!(u.graphs()[0].edge_count(), 2);
        let same = NetworkSequence::from_graphs(vec![g1.clone(), g1.clone()]).unwrap();
        assert_eq!(union_networks(&same, 2).unwrap().graphs()[0], g1);
        let three = NetworkSequence::from_graphs(vec![g1.clone(), g1.clone(), g2]).unwrap();
        assert!(matches!(union_networks(&three, 2), Err(Error::Data(_))));
    }

    #[test]
    fn fit_model1_ratio() {
        let g1 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let g2 = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let seq = NetworkSequence::from_graphs(vec![g1, g2]).unwrap();
        assert_eq!(
            fit_from_sequence(&seq, ModelKind::Model1).unwrap(),
            PersistenceModel::Model1 { p: 0.5 }
        );
        assert!(fit_from_sequence(&seq, ModelKind::Model2).is_err());
        assert_eq!(fit_from_sequence(&seq, ModelKind::Model0).unwrap(), PersistenceModel::Model0);
    }
}
