use rand::Rng;
use rustc_hash::FxHashSet;

use super::model::{PersistenceModel, Window};
use super::process::{StepStats, TcmProcess};
use crate::error::{invalid, Error, Result};
use crate::netcore::{Edge, Graph, MatchPolicy};
use crate::stats::quartiles;

/// Snapshot sequence `G_0..G_T` with per-step bookkeeping.
#[derive(Debug, Clone)]
pub struct TemporalNetwork {
    model: PersistenceModel,
    snapshots: Vec<Graph>,
    step_stats: Vec<StepStats>,
    /// Persistence probability of every edge of `G_0` at `t = 0`
    /// (Models 2 and 3 only).
    initial_probabilities: Option<Vec<(Edge, f64)>>,
}

impl TemporalNetwork {
    pub fn model(&self) -> &PersistenceModel {
        &self.model
    }

    pub fn snapshots(&self) -> &[Graph] {
        &self.snapshots
    }

    pub fn snapshot(&self, t: usize) -> &Graph {
        &self.snapshots[t]
    }

    /// Number of steps `T`.
    pub fn steps(&self) -> usize {
        self.snapshots.len() - 1
    }

    /// Stats of the step producing snapshot `t` (`1 <= t <= T`).
    pub fn step_stats(&self, t: usize) -> &StepStats {
        &self.step_stats[t - 1]
    }

    pub fn all_step_stats(&self) -> &[StepStats] {
        &self.step_stats
    }

    pub fn initial_probabilities(&self) -> Option<&[(Edge, f64)]> {
        self.initial_probabilities.as_deref()
    }

    pub fn into_snapshots(self) -> Vec<Graph> {
        self.snapshots
    }
}

/// Runs the temporal configuration model for `steps` steps from `initial`.
pub fn evolve<R: Rng + ?Sized>(
    initial: Graph,
    model: PersistenceModel,
    steps: usize,
    rng: &mut R,
) -> Result<TemporalNetwork> {
    evolve_with(initial, model, steps, MatchPolicy::default(), rng)
}

pub fn evolve_with<R: Rng + ?Sized>(
    initial: Graph,
    model: PersistenceModel,
    steps: usize,
    policy: MatchPolicy,
    rng: &mut R,
) -> Result<TemporalNetwork> {
    let mut process = TcmProcess::with_policy(initial.clone(), model, policy, rng)?;
    let initial_probabilities = match model {
        PersistenceModel::Model2 { .. } | PersistenceModel::Model3 { .. } => Some(
            initial
                .edges()
                .map(|e| (e, process.edge_probability(e).expect("edge of G_0")))
                .collect(),
        ),
        _ => None,
    };
    let mut snapshots = Vec::with_capacity(steps + 1);
    let mut step_stats = Vec::with_capacity(steps);
    snapshots.push(initial);
    for _ in 0..steps {
        step_stats.push(process.step(rng));
        snapshots.push(process.graph().clone());
    }
    Ok(TemporalNetwork {
        model,
        snapshots,
        step_stats,
        initial_probabilities,
    })
}

/// Quartiles of the persistence probabilities of original edges still alive
/// at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftRow {
    pub t: usize,
    /// Edges of `G_0` present in every snapshot `G_0..G_t`.
    pub alive: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

/// Survivor-bias report: for each `t`, the distribution of latent
/// probabilities over edges of `G_0` that have survived continuously.
/// Rows stop once no original edge is left.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub rows: Vec<DriftRow>,
}

impl DriftReport {
    pub fn row(&self, t: usize) -> Option<&DriftRow> {
        self.rows.iter().find(|r| r.t == t)
    }
}

pub fn persistence_drift_report(tn: &TemporalNetwork) -> Result<DriftReport> {
    match tn.model.window() {
        Some(Window::Forever) => {}
        Some(Window::Periodic(_)) => {
            return Err(invalid("drift report needs probabilities fixed for the whole run"))
        }
        None => {
            return Err(invalid(format!(
                "model {} has a single persistence probability; nothing drifts",
                tn.model.kind()
            )))
        }
    }
    let probs = tn.initial_probabilities.as_ref().ok_or(Error::EmptyInitialGraph)?;
    if probs.is_empty() {
        return Err(Error::EmptyInitialGraph);
    }
    let mut alive: Vec<(Edge, f64)> = probs.clone();
    let mut rows = Vec::with_capacity(tn.snapshots.len());
    for (t, g) in tn.snapshots.iter().enumerate() {
        alive.retain(|(e, _)| g.contains(e));
        if alive.is_empty() {
            break;
        }
        let values: Vec<f64> = alive.iter().map(|&(_, p)| p).collect();
        let (q1, median, q3) = quartiles(&values);
        rows.push(DriftRow {
            t,
            alive: alive.len(),
            q1,
            median,
            q3,
        });
    }
    Ok(DriftReport { rows })
}

/// Edges present in every snapshot from `from` to `to` inclusive.
pub(crate) fn persisting_edges(snapshots: &[Graph], from: usize, to: usize) -> FxHashSet<Edge> {
    let mut set: FxHashSet<Edge> = snapshots[from].edges().collect();
    for g in &snapshots[from + 1..=to] {
        set.retain(|e| g.contains(e));
    }
    set
}
