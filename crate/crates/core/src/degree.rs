//! Degree distributions: normalised mass over degrees `0..=k_max`.

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Probability mass over node degrees. `masses[k]` is the mass at degree `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution<S> {
    masses: Vec<S>,
}

impl<S: Scalar> DegreeDistribution<S> {
    /// Builds a distribution from explicit masses. Masses must be
    /// non-negative and sum to one within `1e-12`.
    pub fn new(masses: Vec<S>) -> Result<Self> {
        if masses.is_empty() {
            return Err(invalid("degree distribution needs at least one mass"));
        }
        let mut total = S::zero();
        for (k, &m) in masses.iter().enumerate() {
            if m < S::zero() {
                return Err(invalid(format!("negative mass {m} at degree {k}")));
            }
            total = total + m;
        }
        if total.abs_diff(S::one()) > S::lit(1e-12) {
            return Err(invalid(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { masses })
    }

    /// Empirical distribution of a degree list (one entry per node).
    pub fn from_degrees(degrees: &[usize]) -> Result<Self> {
        if degrees.is_empty() {
            return Err(invalid("no nodes"));
        }
        let k_max = degrees.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0usize; k_max + 1];
        for &d in degrees {
            counts[d] += 1;
        }
        let n = S::from_count(degrees.len());
        let masses = counts.into_iter().map(|c| S::from_count(c) / n).collect();
        Ok(Self { masses })
    }

    /// All mass on degree `k`.
    pub fn point(k: usize) -> Self {
        let mut masses = vec![S::zero(); k + 1];
        masses[k] = S::one();
        Self { masses }
    }

    pub fn masses(&self) -> &[S] {
        &self.masses
    }

    pub fn max_degree(&self) -> usize {
        self.masses.len() - 1
    }

    /// Mass at degree `k`; zero outside the stored support.
    pub fn mass(&self, k: usize) -> S {
        self.masses.get(k).copied().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, S)> + '_ {
        self.masses.iter().copied().enumerate()
    }
}

/// Zero-pads both distributions to a common support `0..=max(k_max)`.
pub fn aligned<'a, S: Scalar>(
    p: &'a DegreeDistribution<S>,
    q: &'a DegreeDistribution<S>,
) -> impl Iterator<Item = (S, S)> + 'a {
    let len = p.masses.len().max(q.masses.len());
    (0..len).map(move |k| (p.mass(k), q.mass(k)))
}
