use rand::Rng;
use rand_distr::{Beta, Distribution};
use rustc_hash::{FxHashMap, FxHashSet};

use super::model::{PersistenceModel, Window};
use crate::error::{invalid, Result};
use crate::netcore::{rematch_stubs_avoiding, Edge, Graph, MatchPolicy, NodeId, StubPool};

/// Bookkeeping for one transition `G_{t-1} -> G_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    /// Index of the snapshot produced by this step.
    pub t: usize,
    /// Edges of `G_{t-1}` that passed their Bernoulli trial.
    pub survived: usize,
    /// Edges of `G_{t-1}` that broke.
    pub broken: usize,
    /// New edges formed by rematching.
    pub rewired: usize,
    /// Stub pairs dropped as self-loops, duplicate edges, or re-formations
    /// of an edge broken in this step.
    pub discards: usize,
    /// Stubs carried to the next step (twice `discards`).
    pub pending: usize,
}

/// Latent persistence state attached to the current graph.
#[derive(Debug, Clone)]
enum Latent {
    Constant(f64),
    /// Model 2. With a periodic window the map holds the active edges only;
    /// with `Forever` it caches every dyad ever formed.
    Edge {
        law: Beta<f64>,
        window: Window,
        probs: FxHashMap<Edge, f64>,
    },
    /// Model 3: one probability per node.
    Node {
        law: Beta<f64>,
        window: Window,
        probs: Vec<f64>,
    },
}

/// Stepwise temporal configuration model.
///
/// Holds the current snapshot `G_t` and its latent persistence state. Each
/// call to [`step`](Self::step) produces `G_{t+1}`.
#[derive(Debug, Clone)]
pub struct TcmProcess {
    model: PersistenceModel,
    graph: Graph,
    t: usize,
    policy: MatchPolicy,
    latent: Latent,
    /// Stubs of pairs dropped in earlier steps, returned to the pool at the
    /// next step so that node degrees are not eroded over time.
    pending: Vec<NodeId>,
}

impl TcmProcess {
    /// Starts the process at `initial`, drawing initial probabilities.
    pub fn new<R: Rng + ?Sized>(initial: Graph, model: PersistenceModel, rng: &mut R) -> Result<Self> {
        Self::with_policy(initial, model, MatchPolicy::default(), rng)
    }

    pub fn with_policy<R: Rng + ?Sized>(
        initial: Graph,
        model: PersistenceModel,
        policy: MatchPolicy,
        rng: &mut R,
    ) -> Result<Self> {
        model.validate()?;
        let beta_law = |a: f64, b: f64| Beta::new(a, b).map_err(|e| invalid(e.to_string()));
        let latent = match model {
            PersistenceModel::Model0 => Latent::Constant(0.0),
            PersistenceModel::Model1 { p } => Latent::Constant(p),
            PersistenceModel::Model2 { dist, window } => {
                let law = beta_law(dist.alpha, dist.beta)?;
                let probs = initial.edges().map(|e| (e, law.sample(rng))).collect();
                Latent::Edge { law, window, probs }
            }
            PersistenceModel::Model3 { dist, window } => {
                let law = beta_law(dist.alpha, dist.beta)?;
                let probs = (0..initial.node_count()).map(|_| law.sample(rng)).collect();
                Latent::Node { law, window, probs }
            }
        };
        Ok(Self {
            model,
            graph: initial,
            t: 0,
            policy,
            latent,
            pending: Vec::new(),
        })
    }

    pub fn model(&self) -> &PersistenceModel {
        &self.model
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    /// Index of the current snapshot.
    pub fn time(&self) -> usize {
        self.t
    }

    /// Stubs waiting to be matched at the next step.
    pub fn pending_stubs(&self) -> &[NodeId] {
        &self.pending
    }

    /// Persistence probability the next trial would use for `e`, if `e` is
    /// an edge of the current graph.
    pub fn edge_probability(&self, e: Edge) -> Option<f64> {
        if !self.graph.contains(&e) {
            return None;
        }
        Some(edge_prob(&self.latent, e))
    }

    /// Node-level probability (Model 3 only).
    pub fn node_probability(&self, node: NodeId) -> Option<f64> {
        match &self.latent {
            Latent::Node { probs, .. } => probs.get(node).copied(),
            _ => None,
        }
    }

    fn refresh_due(&self) -> bool {
        let window = match &self.latent {
            Latent::Edge { window, .. } | Latent::Node { window, .. } => *window,
            Latent::Constant(_) => return false,
        };
        match window {
            Window::Periodic(len) => self.t > 0 && self.t.is_multiple_of(len),
            Window::Forever => false,
        }
    }

    fn refresh<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        match &mut self.latent {
            Latent::Edge { law, probs, .. } => {
                probs.clear();
                for e in self.graph.edges() {
                    probs.insert(e, law.sample(rng));
                }
            }
            Latent::Node { law, probs, .. } => {
                for p in probs.iter_mut() {
                    *p = law.sample(rng);
                }
            }
            Latent::Constant(_) => {}
        }
    }

    /// Advances one step: refresh at window boundaries, Bernoulli trial per
    /// edge, rematch the released stubs.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> StepStats {
        if self.refresh_due() {
            self.refresh(rng);
        }
        let before = self.graph.edge_count();
        let mut pool: StubPool = std::mem::take(&mut self.pending).into_iter().collect();
        let mut broken = FxHashSet::default();
        let mut graph = std::mem::replace(&mut self.graph, Graph::empty(0));
        match self.latent {
            Latent::Constant(p) if p >= 1.0 => {}
            Latent::Constant(p) if p <= 0.0 => {
                for e in graph.edges() {
                    pool.release(e);
                    broken.insert(e);
                }
                graph.retain(|_| false);
            }
            _ => {
                let latent = &self.latent;
                graph.retain(|e| {
                    let keep = rng.random_bool(edge_prob(latent, e));
                    if !keep {
                        pool.release(e);
                        broken.insert(e);
                    }
                    keep
                });
            }
        }
        let survived = graph.edge_count();
        if let Latent::Edge {
            window: Window::Periodic(_),
            probs,
            ..
        } = &mut self.latent
        {
            probs.retain(|e, _| graph.contains(e));
        }

        let matched = rematch_stubs_avoiding(graph, pool, &broken, self.policy, rng)
            .expect("released stubs come in pairs and lie inside the node range");
        if let Latent::Edge { law, window, probs } = &mut self.latent {
            for &e in &matched.new_edges {
                match window {
                    Window::Periodic(_) => {
                        probs.insert(e, law.sample(rng));
                    }
                    Window::Forever => {
                        probs.entry(e).or_insert_with(|| law.sample(rng));
                    }
                }
            }
        }
        self.graph = matched.graph;
        self.pending = matched.leftover;
        self.t += 1;
        StepStats {
            t: self.t,
            survived,
            broken: before - survived,
            rewired: matched.new_edges.len(),
            discards: matched.discards,
            pending: self.pending.len(),
        }
    }
}

fn edge_prob(latent: &Latent, e: Edge) -> f64 {
    match latent {
        Latent::Constant(p) => *p,
        Latent::Edge { probs, .. } => probs[&e],
        Latent::Node { probs, .. } => probs[e.lo()] * probs[e.hi()],
    }
}
