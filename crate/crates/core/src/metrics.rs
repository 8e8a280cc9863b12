//! Distances between degree distributions.

use std::fmt;
use std::str::FromStr;

use crate::degree::{aligned, DegreeDistribution};
use crate::error::{invalid, Error, Result};
use crate::netcore::{degree_distribution, Graph};
use crate::scalar::{Real, Scalar};

/// `(1/2) Σ |p_k − q_k|` over the zero-padded common support.
pub fn total_variation<S: Scalar>(p: &DegreeDistribution<S>, q: &DegreeDistribution<S>) -> S {
    let sum = aligned(p, q).fold(S::zero(), |acc, (a, b)| acc + a.abs_diff(b));
    sum / S::from_count(2)
}

/// `(1/√2) √(Σ (√p_k − √q_k)²)`.
pub fn hellinger<S: Real>(p: &DegreeDistribution<S>, q: &DegreeDistribution<S>) -> S {
    let ss = aligned(p, q).fold(S::zero(), |acc, (a, b)| {
        let d = a.sqrt() - b.sqrt();
        acc + d * d
    });
    (ss / S::from_count(2)).sqrt()
}

/// Hellinger distance through the Bhattacharyya coefficient,
/// `√(1 − Σ √(p_k q_k))`. Clamped at zero against rounding.
pub fn hellinger_via_affinity<S: Real>(p: &DegreeDistribution<S>, q: &DegreeDistribution<S>) -> S {
    let bc = aligned(p, q).fold(S::zero(), |acc, (a, b)| acc + (a * b).sqrt());
    (S::one() - bc).max(S::zero()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    TotalVariation,
    Hellinger,
}

impl Metric {
    pub fn distance(self, p: &DegreeDistribution<f64>, q: &DegreeDistribution<f64>) -> f64 {
        match self {
            Metric::TotalVariation => total_variation(p, q),
            Metric::Hellinger => hellinger(p, q),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tv" | "total-variation" => Ok(Metric::TotalVariation),
            "hellinger" | "h" => Ok(Metric::Hellinger),
            _ => Err(invalid(format!("unknown metric `{s}` (expected tv or hellinger)"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::TotalVariation => "tv",
            Metric::Hellinger => "hellinger",
        })
    }
}

/// Mean distance between the degree distributions of (predicted, observed)
/// graph pairs.
pub fn mean_distance(pairs: &[(&Graph, &Graph)], metric: Metric) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("graph pairs"));
    }
    let total: f64 = pairs
        .iter()
        .map(|(a, b)| metric.distance(&degree_distribution(a), &degree_distribution(b)))
        .sum();
    Ok(total / pairs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(m: &[f64]) -> DegreeDistribution<f64> {
        DegreeDistribution::new(m.to_vec()).unwrap()
    }

    #[test]
    fn tv_examples() {
        let p = dist(&[0.5, 0.5]);
        assert_eq!(total_variation(&p, &p), 0.0);
        assert_eq!(total_variation(&dist(&[1.0]), &dist(&[0.0, 0.0, 1.0])), 1.0);
        assert_eq!(total_variation(&p, &dist(&[1.0])), 0.5);
    }

    #[test]
    fn hellinger_examples() {
        let p = dist(&[0.5, 0.5]);
        assert_eq!(hellinger(&p, &p), 0.0);
        assert!((hellinger(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])) - 1.0).abs() < 1e-15);
        let h = hellinger(&p, &dist(&[1.0]));
        let expected = ((0.5f64.sqrt() - 1.0).powi(2) + 0.5).sqrt() / 2f64.sqrt();
        assert!((h - expected).abs() < 1e-15);
        assert!((h - 0.5412).abs() < 1e-4);
        // H² = 1 − Σ√(pq)
        assert!((h * h - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
        assert!((hellinger_via_affinity(&p, &dist(&[1.0])) - h).abs() < 1e-12);
    }

    #[test]
    fn mean_distance_examples() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let h = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(mean_distance(&[(&g, &g), (&h, &h)], Metric::TotalVariation).unwrap(), 0.0);
        let single = mean_distance(&[(&g, &h)], Metric::Hellinger).unwrap();
        let direct = hellinger(&degree_distribution(&g), &degree_distribution(&h));
        assert_eq!(single, direct);
        assert!(mean_distance(&[], Metric::Hellinger).is_err());
    }
}
