//! Moment estimators of edge persistence computed from snapshots alone,
//! Beta moment matching, and replication-level bias summaries.

use crate::error::{invalid, Error, Result};
use crate::netcore::Graph;
use crate::scalar::{Real, Scalar};
use crate::stats::{mean, sample_sd};
use crate::tcm::{persisting_edges, BetaParams, ModelKind};

fn check_len(snapshots: &[Graph], needed: usize) -> Result<()> {
    if snapshots.len() < needed {
        return Err(Error::TooFewSnapshots {
            needed,
            got: snapshots.len(),
        });
    }
    Ok(())
}

/// Fraction of the edges of snapshot `s` still present at `s + 1`.
pub fn one_step_survival(snapshots: &[Graph], s: usize) -> Result<f64> {
    check_len(snapshots, s + 2)?;
    let base = snapshots[s].edge_count();
    if base == 0 {
        return Err(if s == 0 { Error::EmptyInitialGraph } else { Error::EmptySnapshot(s) });
    }
    Ok(snapshots[s].common_edge_count(&snapshots[s + 1]) as f64 / base as f64)
}

/// Fraction of the edges of snapshot `s` present in both `s + 1` and `s + 2`.
pub fn two_step_survival(snapshots: &[Graph], s: usize) -> Result<f64> {
    check_len(snapshots, s + 3)?;
    let base = snapshots[s].edge_count();
    if base == 0 {
        return Err(if s == 0 { Error::EmptyInitialGraph } else { Error::EmptySnapshot(s) });
    }
    Ok(persisting_edges(snapshots, s, s + 2).len() as f64 / base as f64)
}

/// `Z_1 = |E_0 ∩ E_1| / |E_0|`.
pub fn z1(snapshots: &[Graph]) -> Result<f64> {
    one_step_survival(snapshots, 0)
}

/// `V_1 = |E_0 ∩ E_1 ∩ E_2| / |E_0|`.
pub fn v1(snapshots: &[Graph]) -> Result<f64> {
    two_step_survival(snapshots, 0)
}

/// Number of complete windows `m = floor(T / T0)`.
pub fn window_count(steps: usize, window: usize) -> Result<usize> {
    if window == 0 {
        return Err(invalid("window length must be at least 1"));
    }
    if window > steps {
        return Err(Error::WindowTooLarge { window, steps });
    }
    Ok(steps / window)
}

/// Average one-step survival over window starts `s = k·T0`, `k < m`.
///
/// With `window = 1` this is the mean of `X_t / X_{t-1}^+` over all steps.
/// The sum is divided by `m`, the number of windows.
pub fn zbar(snapshots: &[Graph], window: usize) -> Result<f64> {
    check_len(snapshots, 2)?;
    let m = window_count(snapshots.len() - 1, window)?;
    let mut total = 0.0;
    for k in 0..m {
        total += one_step_survival(snapshots, k * window)?;
    }
    Ok(total / m as f64)
}

/// Average two-step survival over window starts. Both transitions of each
/// pair must fall inside one window, so `window >= 2`.
pub fn vbar(snapshots: &[Graph], window: usize) -> Result<f64> {
    if window < 2 {
        return Err(invalid(format!(
            "two-step survival needs a window of at least 2 steps, got {window}"
        )));
    }
    check_len(snapshots, 3)?;
    let m = window_count(snapshots.len() - 1, window)?;
    let mut total = 0.0;
    for k in 0..m {
        total += two_step_survival(snapshots, k * window)?;
    }
    Ok(total / m as f64)
}

/// Beta law with first moment `m1` and second moment `m2`.
///
/// `c = m1(1 − m1)/(m2 − m1²) − 1`, `α = m1·c`, `β = (1 − m1)·c`. Requires
/// `0 < m1 < 1` and `m1² < m2 < m1`.
pub fn beta_from_moments<S: Scalar>(m1: S, m2: S) -> Result<BetaParams<S>> {
    let infeasible = |reason| Error::InfeasibleMoments {
        m1: m1.to_string(),
        m2: m2.to_string(),
        reason,
    };
    if !(m1 > S::zero() && m1 < S::one()) {
        return Err(infeasible("first moment must lie strictly inside (0, 1)"));
    }
    if !(m2 > m1 * m1) {
        return Err(infeasible("second moment must exceed the squared first moment (positive variance)"));
    }
    if !(m2 < m1) {
        return Err(infeasible("second moment must be below the first moment (variance < m1(1 - m1))"));
    }
    let c = m1 * (S::one() - m1) / (m2 - m1 * m1) - S::one();
    BetaParams::new(m1 * c, (S::one() - m1) * c)
}

/// Node-level Beta law under the product model, where edge moments are the
/// squares of node moments: `m1 = √z`, `m2 = √v`.
pub fn fit_model3_node_dist<S: Real>(z_est: S, v_est: S) -> Result<BetaParams<S>> {
    if !(z_est.in_unit_interval() && v_est.in_unit_interval()) {
        return Err(Error::InfeasibleMoments {
            m1: z_est.to_string(),
            m2: v_est.to_string(),
            reason: "edge-level moments must lie in [0, 1]",
        });
    }
    beta_from_moments(z_est.sqrt(), v_est.sqrt())
}

fn relative_errors(pairs: &[(f64, f64)]) -> Result<Vec<f64>> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("estimate/truth pairs"));
    }
    pairs
        .iter()
        .map(|&(est, truth)| {
            if truth == 0.0 {
                Err(invalid("relative bias undefined for a zero true value"))
            } else {
                Ok((est - truth) / truth)
            }
        })
        .collect()
}

/// Mean and sample standard deviation of `|est − truth| / truth`.
pub fn bias_stats(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    let abs: Vec<f64> = relative_errors(pairs)?.into_iter().map(f64::abs).collect();
    Ok((mean(&abs), sample_sd(&abs)))
}

/// [`bias_stats`] over the concatenation of first- and second-moment
/// pairs, i.e. `(1/2R)(Σ|…| + Σ|…|)` for `R` replications each.
pub fn joint_bias_stats(first: &[(f64, f64)], second: &[(f64, f64)]) -> Result<(f64, f64)> {
    let all: Vec<(f64, f64)> = first.iter().chain(second).copied().collect();
    bias_stats(&all)
}

/// Relative-error summary of one estimator over replications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeErrorSummary {
    /// `|mean((est − truth)/truth)|`: magnitude of the average relative bias.
    pub abs_mean: f64,
    /// Sample sd of the signed relative errors.
    pub sd: f64,
    /// `mean(|est − truth|/truth)`, as [`bias_stats`].
    pub mean_abs: f64,
    /// Sample sd of the absolute relative errors.
    pub sd_abs: f64,
    pub count: usize,
}

impl RelativeErrorSummary {
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let rel = relative_errors(pairs)?;
        let abs: Vec<f64> = rel.iter().map(|r| r.abs()).collect();
        Ok(Self {
            abs_mean: mean(&rel).abs(),
            sd: sample_sd(&rel),
            mean_abs: mean(&abs),
            sd_abs: sample_sd(&abs),
            count: rel.len(),
        })
    }

    pub fn joint(first: &[(f64, f64)], second: &[(f64, f64)]) -> Result<Self> {
        let all: Vec<(f64, f64)> = first.iter().chain(second).copied().collect();
        Self::from_pairs(&all)
    }
}

/// Estimates from one observed snapshot sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub model: ModelKind,
    pub n: usize,
    /// Number of steps `T`.
    pub t: usize,
    /// Window length used for `zbar` and `vbar`.
    pub t0: usize,
    pub z1: f64,
    pub zbar: f64,
    pub v1: Option<f64>,
    pub vbar: Option<f64>,
    /// `m = floor(T / T0)`.
    pub m_windows: usize,
    /// Fitted Beta law: edge-level for Model 2, node-level for Model 3.
    pub derived: Option<BetaParams<f64>>,
}

/// Computes every estimator that the sequence length allows, and the
/// derived Beta law for Models 2 and 3.
///
/// The derived law uses the windowed averages when the window holds two
/// transitions, otherwise the first-window ratios `z1`, `v1`.
pub fn estimate_report(snapshots: &[Graph], model: ModelKind, window: usize) -> Result<EstimateReport> {
    check_len(snapshots, 2)?;
    let t = snapshots.len() - 1;
    let m_windows = window_count(t, window)?;
    let z1 = z1(snapshots)?;
    let zbar = zbar(snapshots, window)?;
    let v1 = if t >= 2 { Some(v1(snapshots)?) } else { None };
    let vbar = if window >= 2 { Some(vbar(snapshots, window)?) } else { None };
    let (m1, m2) = match vbar {
        Some(vb) => (zbar, Some(vb)),
        None => (z1, v1),
    };
    let derived = match model {
        ModelKind::Model2 | ModelKind::Model3 => {
            let m2 = m2.ok_or(Error::TooFewSnapshots {
                needed: 3,
                got: snapshots.len(),
            })?;
            Some(if model == ModelKind::Model2 {
                beta_from_moments(m1, m2)?
            } else {
                fit_model3_node_dist(m1, m2)?
            })
        }
        _ => None,
    };
    Ok(EstimateReport {
        model,
        n: snapshots[0].node_count(),
        t,
        t0: window,
        z1,
        zbar,
        v1,
        vbar,
        m_windows,
        derived,
    })
}
