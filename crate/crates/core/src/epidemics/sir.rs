//! Discrete-time stochastic SIR co-evolving with a temporal configuration
//! model.
//!
//! Within a step: every edge of the current snapshot joining a node that
//! was infectious at the start of the step to a susceptible node transmits
//! with probability β; then every node infectious at the start of the step
//! recovers with probability γ; then the network takes one TCM step.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::netcore::{Graph, NodeId};
use crate::tcm::{PersistenceModel, TcmProcess};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compartment {
    Susceptible,
    Infectious,
    Recovered,
}

/// Who is infected at time zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Seeding {
    /// This many distinct nodes, chosen uniformly.
    Count(usize),
    Nodes(Vec<NodeId>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpidemicParams {
    /// Per-step, per-contact transmission probability.
    pub beta: f64,
    /// Per-step recovery probability.
    pub gamma: f64,
    pub seeding: Seeding,
}

impl EpidemicParams {
    pub fn new(beta: f64, gamma: f64, seeding: Seeding) -> Result<Self> {
        let p = Self { beta, gamma, seeding };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(invalid(format!("beta = {} outside [0, 1]", self.beta)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(invalid(format!("gamma = {} outside (0, 1]", self.gamma)));
        }
        match &self.seeding {
            Seeding::Count(0) => Err(invalid("at least one initial infection is required")),
            Seeding::Nodes(v) if v.is_empty() => Err(invalid("at least one initial infection is required")),
            _ => Ok(()),
        }
    }
}

/// Run controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirConfig {
    pub max_steps: usize,
    /// Infectees count toward the early-stage tally while cumulative
    /// infections are below this fraction of `N`.
    pub early_fraction: f64,
    /// Stop as soon as every early-stage infectee has recovered instead of
    /// running the epidemic to extinction.
    pub stop_after_early_stage: bool,
}

impl Default for SirConfig {
    fn default() -> Self {
        Self {
            max_steps: 10_000,
            early_fraction: 0.01,
            stop_after_early_stage: false,
        }
    }
}

/// Compartment sizes after a step (row 0 is the seeded state).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompartmentCounts {
    pub step: usize,
    pub susceptible: usize,
    pub infectious: usize,
    pub recovered: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeRecord {
    pub infected_at: Option<usize>,
    pub recovered_at: Option<usize>,
    pub infector: Option<NodeId>,
    /// 0 for seeds, infector's generation + 1 otherwise.
    pub generation: Option<u32>,
    /// Transmissions credited to this node.
    pub secondary: usize,
}

/// Infectees of a group and the transmissions they caused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OffspringTally {
    pub infectees: usize,
    pub secondary: usize,
    /// Every member has recovered, so the counts are final.
    pub complete: bool,
}

impl OffspringTally {
    pub fn mean(&self) -> Option<f64> {
        (self.infectees > 0).then(|| self.secondary as f64 / self.infectees as f64)
    }

    pub fn merge(&mut self, other: &OffspringTally) {
        self.infectees += other.infectees;
        self.secondary += other.secondary;
        self.complete &= other.complete;
    }
}

/// Mutable epidemic state; one call to [`SirState::step`] is one time step
/// on a fixed snapshot.
#[derive(Debug, Clone)]
pub struct SirState {
    status: Vec<Compartment>,
    records: Vec<NodeRecord>,
    infectious: Vec<NodeId>,
    seeds: Vec<NodeId>,
    t: usize,
    cumulative: usize,
    early_threshold: usize,
    /// Cumulative infections after each step (index = step).
    cumulative_by_step: Vec<usize>,
}

impl SirState {
    pub fn seeded<R: Rng + ?Sized>(
        n: usize,
        seeding: &Seeding,
        early_fraction: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let seeds: Vec<NodeId> = match seeding {
            Seeding::Count(c) => {
                if *c > n {
                    return Err(invalid(format!("cannot seed {c} of {n} nodes")));
                }
                let mut v = sample(rng, n, *c).into_vec();
                v.sort_unstable();
                v
            }
            Seeding::Nodes(v) => {
                let mut v = v.clone();
                v.sort_unstable();
                v.dedup();
                if let Some(&bad) = v.iter().find(|&&i| i >= n) {
                    return Err(invalid(format!("seed node {bad} outside 0..{n}")));
                }
                v
            }
        };
        if seeds.is_empty() {
            return Err(invalid("at least one initial infection is required"));
        }
        if !(0.0..=1.0).contains(&early_fraction) {
            return Err(invalid(format!("early fraction {early_fraction} outside [0, 1]")));
        }
        let mut status = vec![Compartment::Susceptible; n];
        let mut records = vec![NodeRecord::default(); n];
        for &s in &seeds {
            status[s] = Compartment::Infectious;
            records[s].infected_at = Some(0);
            records[s].generation = Some(0);
        }
        let cumulative = seeds.len();
        Ok(Self {
            status,
            records,
            infectious: seeds.clone(),
            seeds,
            t: 0,
            cumulative,
            early_threshold: (early_fraction * n as f64).ceil() as usize,
            cumulative_by_step: vec![cumulative],
        })
    }

    pub fn time(&self) -> usize {
        self.t
    }

    pub fn status(&self, node: NodeId) -> Compartment {
        self.status[node]
    }

    pub fn infectious_count(&self) -> usize {
        self.infectious.len()
    }

    pub fn counts(&self) -> CompartmentCounts {
        let recovered = self.status.iter().filter(|&&s| s == Compartment::Recovered).count();
        CompartmentCounts {
            step: self.t,
            susceptible: self.status.len() - self.infectious.len() - recovered,
            infectious: self.infectious.len(),
            recovered,
        }
    }

    /// Transmission then recovery on `graph`.
    pub fn step<R: Rng + ?Sized>(&mut self, graph: &Graph, beta: f64, gamma: f64, rng: &mut R) {
        self.t += 1;
        let t = self.t;
        let mut newly = Vec::new();
        if beta > 0.0 && !self.infectious.is_empty() {
            for e in graph.edges() {
                let (a, b) = e.endpoints();
                let (src, dst) = if self.infectious_at_start(a) && self.status[b] == Compartment::Susceptible {
                    (a, b)
                } else if self.infectious_at_start(b) && self.status[a] == Compartment::Susceptible {
                    (b, a)
                } else {
                    continue;
                };
                if rng.random_bool(beta) {
                    self.status[dst] = Compartment::Infectious;
                    let generation = self.records[src].generation.map(|g| g + 1);
                    let rec = &mut self.records[dst];
                    rec.infected_at = Some(t);
                    rec.infector = Some(src);
                    rec.generation = generation;
                    self.records[src].secondary += 1;
                    newly.push(dst);
                }
            }
        }
        let mut still = Vec::with_capacity(self.infectious.len() + newly.len());
        for &i in &self.infectious {
            if rng.random_bool(gamma) {
                self.status[i] = Compartment::Recovered;
                self.records[i].recovered_at = Some(t);
            } else {
                still.push(i);
            }
        }
        self.cumulative += newly.len();
        still.extend(newly);
        self.infectious = still;
        self.cumulative_by_step.push(self.cumulative);
    }

    fn infectious_at_start(&self, node: NodeId) -> bool {
        self.status[node] == Compartment::Infectious && self.records[node].infected_at != Some(self.t)
    }

    /// Non-seed infectees that were infected during a step which began
    /// with fewer than `early_threshold` cumulative infections.
    fn is_early(&self, rec: &NodeRecord) -> bool {
        match (rec.infected_at, rec.generation) {
            (Some(t), Some(g)) if g >= 1 && t >= 1 => self.cumulative_by_step[t - 1] < self.early_threshold,
            _ => false,
        }
    }

    fn early_stage_resolved(&self) -> bool {
        self.cumulative >= self.early_threshold
            && self
                .records
                .iter()
                .filter(|r| self.is_early(r))
                .all(|r| r.recovered_at.is_some())
    }
}

/// Result of one epidemic run.
#[derive(Debug, Clone)]
pub struct EpidemicTrace {
    pub counts: Vec<CompartmentCounts>,
    pub nodes: Vec<NodeRecord>,
    pub seeds: Vec<NodeId>,
    /// Cumulative-infection count that ends the early stage.
    pub early_threshold: usize,
    /// Early-stage infectees (seeds excluded) and their transmissions.
    pub early_stage: OffspringTally,
    /// Seeds and their transmissions.
    pub seed_tally: OffspringTally,
}

impl EpidemicTrace {
    /// Mean transmissions per seed.
    pub fn measured_r0(&self) -> Option<f64> {
        self.seed_tally.mean()
    }

    /// Mean transmissions per early-stage infectee.
    pub fn measured_r_star(&self) -> Option<f64> {
        self.early_stage.mean()
    }

    /// `(generation, infectees, transmissions)` for every generation seen.
    pub fn generation_offspring(&self) -> Vec<(u32, usize, usize)> {
        let mut out: Vec<(u32, usize, usize)> = Vec::new();
        for rec in &self.nodes {
            if let Some(g) = rec.generation {
                let g_idx = g as usize;
                if out.len() <= g_idx {
                    out.extend((out.len()..=g_idx).map(|i| (i as u32, 0, 0)));
                }
                out[g_idx].1 += 1;
                out[g_idx].2 += rec.secondary;
            }
        }
        out
    }

    pub fn final_size(&self) -> usize {
        self.nodes.iter().filter(|r| r.infected_at.is_some()).count()
    }
}

/// Runs SIR while co-evolving the network from `initial` under `model`.
pub fn simulate_sir<R: Rng + ?Sized>(
    initial: Graph,
    model: PersistenceModel,
    params: &EpidemicParams,
    config: &SirConfig,
    rng: &mut R,
) -> Result<EpidemicTrace> {
    params.validate()?;
    let n = initial.node_count();
    let mut state = SirState::seeded(n, &params.seeding, config.early_fraction, rng)?;
    let mut process = TcmProcess::new(initial, model, rng)?;
    let mut counts = vec![state.counts()];
    while state.infectious_count() > 0 && state.time() < config.max_steps {
        state.step(process.graph(), params.beta, params.gamma, rng);
        counts.push(state.counts());
        if config.stop_after_early_stage && state.early_stage_resolved() {
            break;
        }
        process.step(rng);
    }
    Ok(finish(state, counts))
}

fn finish(state: SirState, counts: Vec<CompartmentCounts>) -> EpidemicTrace {
    let mut early = OffspringTally {
        complete: true,
        ..Default::default()
    };
    for rec in state.records.iter().filter(|r| state.is_early(r)) {
        early.infectees += 1;
        early.secondary += rec.secondary;
        early.complete &= rec.recovered_at.is_some();
    }
    let mut seed_tally = OffspringTally {
        complete: true,
        ..Default::default()
    };
    for &s in &state.seeds {
        let rec = &state.records[s];
        seed_tally.infectees += 1;
        seed_tally.secondary += rec.secondary;
        seed_tally.complete &= rec.recovered_at.is_some();
    }
    EpidemicTrace {
        counts,
        nodes: state.records,
        seeds: state.seeds,
        early_threshold: state.early_threshold,
        early_stage: early,
        seed_tally,
    }
}
