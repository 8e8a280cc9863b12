//! Closed-form early-stage quantities for SIR on a temporal configuration
//! model with constant persistence `p`.
//!
//! Everything here is generic over [`Scalar`], so the identities can be
//! checked exactly with rational arithmetic as well as in floating point.

use crate::degree::DegreeDistribution;
use crate::error::{invalid, Error, Result};
use crate::scalar::{Real, Scalar};

fn check_probability<S: Scalar>(name: &str, x: S) -> Result<()> {
    if x.in_unit_interval() {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {x} outside [0, 1]")))
    }
}

/// Probability generating function of a degree distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Pgf<S> {
    /// Finite support.
    Finite(DegreeDistribution<S>),
    /// Poisson(λ), whose derivatives at 1 are known exactly.
    Poisson { lambda: S },
}

/// `g'(1)` and `g''(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgfDerivatives<S> {
    /// `Σ k p_k`.
    pub first: S,
    /// `Σ k(k − 1) p_k`.
    pub second: S,
}

impl<S: Scalar> PgfDerivatives<S> {
    /// Mean excess degree `g₁'(1) = g''(1)/g'(1)`.
    pub fn excess_mean(&self) -> Result<S> {
        if self.first == S::zero() {
            return Err(Error::Degenerate("g'(1) = 0: every node has degree 0".into()));
        }
        Ok(self.second / self.first)
    }
}

impl<S: Scalar> Pgf<S> {
    pub fn finite(dist: DegreeDistribution<S>) -> Self {
        Pgf::Finite(dist)
    }

    /// All mass on degree `m`.
    pub fn regular(m: usize) -> Self {
        Pgf::Finite(DegreeDistribution::point(m))
    }

    pub fn poisson(lambda: S) -> Result<Self> {
        if !(lambda > S::zero()) {
            return Err(invalid(format!("Poisson mean must be positive, got {lambda}")));
        }
        Ok(Pgf::Poisson { lambda })
    }

    pub fn derivatives(&self) -> PgfDerivatives<S> {
        match self {
            Pgf::Poisson { lambda } => PgfDerivatives {
                first: *lambda,
                second: *lambda * *lambda,
            },
            Pgf::Finite(dist) => {
                let mut first = S::zero();
                let mut second = S::zero();
                for (k, pk) in dist.iter() {
                    let k_s = S::from_count(k);
                    first = first + k_s * pk;
                    if k >= 1 {
                        second = second + k_s * S::from_count(k - 1) * pk;
                    }
                }
                PgfDerivatives { first, second }
            }
        }
    }
}

impl<S: Real> Pgf<S> {
    /// Poisson(λ) masses cut where the remaining tail mass drops below 1e-12.
    pub fn poisson_truncated(lambda: S) -> Result<Self> {
        Ok(Pgf::Finite(poisson_masses(lambda)?))
    }

    /// Finite-support masses; the Poisson variant is truncated.
    pub fn to_distribution(&self) -> Result<DegreeDistribution<S>> {
        match self {
            Pgf::Finite(d) => Ok(d.clone()),
            Pgf::Poisson { lambda } => poisson_masses(*lambda),
        }
    }
}

fn poisson_masses<S: Real>(lambda: S) -> Result<DegreeDistribution<S>> {
    if !(lambda > S::zero() && lambda.is_finite()) {
        return Err(invalid(format!("Poisson mean must be positive, got {lambda}")));
    }
    let tol = S::lit(1e-12);
    let mut pk = (-lambda).exp();
    let mut masses = vec![pk];
    let mut cumulative = pk;
    let mut k = 0usize;
    // stop once past the mode and the tail is negligible
    while S::one() - cumulative >= tol || S::from_count(k) < lambda {
        k += 1;
        pk = pk * lambda / S::from_count(k);
        masses.push(pk);
        cumulative = cumulative + pk;
        if k > 100_000 {
            break;
        }
    }
    let total: S = masses.iter().fold(S::zero(), |a, &b| a + b);
    DegreeDistribution::new(masses.into_iter().map(|m| m / total).collect())
}

/// Per-step derivatives of the generating function.
pub fn pgf_derivatives<S: Scalar>(pgf: &Pgf<S>) -> PgfDerivatives<S> {
    pgf.derivatives()
}

/// Probability that an infectious–susceptible tie transmits before it
/// breaks or the infector recovers: `τ = β / (1 − p(1 − β)(1 − γ))`.
pub fn transmission_probability<S: Scalar>(beta: S, gamma: S, p: S) -> Result<S> {
    check_probability("beta", beta)?;
    check_probability("gamma", gamma)?;
    check_probability("p", p)?;
    let denom = S::one() - p * (S::one() - beta) * (S::one() - gamma);
    if denom == S::zero() {
        return Err(Error::Degenerate(
            "p = 1, beta = 0, gamma = 0: the tie never breaks, transmits or recovers".into(),
        ));
    }
    Ok(beta / denom)
}

/// Mean transmissions from the initially infected node: `τ g'(1)`.
pub fn analytic_r0<S: Scalar>(pgf: &Pgf<S>, beta: S, gamma: S, p: S) -> Result<S> {
    Ok(transmission_probability(beta, gamma, p)? * pgf.derivatives().first)
}

/// Mean number of distinct contacts of an early-stage infectee, not
/// counting the contact that infected it:
/// `(1 − γ)(1 − p)/γ + (1 − p + γp) g''(1)/(γ g'(1))`.
pub fn h1_tilde_derivative<S: Scalar>(pgf: &Pgf<S>, gamma: S, p: S) -> Result<S> {
    check_probability("gamma", gamma)?;
    check_probability("p", p)?;
    if gamma == S::zero() {
        return Err(Error::Degenerate("gamma = 0: infinite infectious period".into()));
    }
    let excess = pgf.derivatives().excess_mean()?;
    let one = S::one();
    Ok((one - gamma) * (one - p) / gamma + (one - p + gamma * p) * excess / gamma)
}

/// Early-stage reproductive number `R* = τ · H̃₁'(1)`.
pub fn analytic_r_star<S: Scalar>(pgf: &Pgf<S>, beta: S, gamma: S, p: S) -> Result<S> {
    let contacts = h1_tilde_derivative(pgf, gamma, p)?;
    Ok(transmission_probability(beta, gamma, p)? * contacts)
}

fn excess_masses<S: Real>(dist: &DegreeDistribution<S>) -> Result<Vec<(usize, S)>> {
    let g1 = Pgf::Finite(dist.clone()).derivatives().first;
    if g1 == S::zero() {
        return Err(Error::Degenerate("g'(1) = 0".into()));
    }
    Ok(dist
        .iter()
        .filter(|&(k, pk)| k >= 1 && pk > S::zero())
        .map(|(k, pk)| (k, S::from_count(k) * pk / g1))
        .collect())
}

/// `H̃₁(x)` in closed form:
/// `γ/[1 − (1−γ)a] + γ Σ_k q_k x^{k−1} / [1 − (1−γ)a^{k−1}]`, `a = x(1−p) + p`.
pub fn h1_tilde<S: Real>(dist: &DegreeDistribution<S>, gamma: S, p: S, x: S) -> Result<S> {
    let one = S::one();
    let a = x * (one - p) + p;
    let mut total = gamma / (one - (one - gamma) * a);
    for (k, qk) in excess_masses(dist)? {
        let e = (k - 1) as i32;
        total = total + gamma * qk * x.powi(e) / (one - (one - gamma) * a.powi(e));
    }
    Ok(total)
}

/// `H̃₁(x)` as the double series over the infectious period `ℓ` and the
/// degree `k`, truncated at `ℓ ≤ max_ell`:
/// `Σ_ℓ γ(1−γ)^ℓ [a^ℓ + Σ_k q_k (x a^ℓ)^{k−1}]`.
pub fn h1_tilde_series<S: Real>(
    dist: &DegreeDistribution<S>,
    gamma: S,
    p: S,
    x: S,
    max_ell: usize,
) -> Result<S> {
    let one = S::one();
    let a = x * (one - p) + p;
    let q = excess_masses(dist)?;
    let mut total = S::zero();
    let mut weight = gamma;
    let mut a_pow = one;
    for _ in 0..=max_ell {
        let mut inner = a_pow;
        for &(k, qk) in &q {
            inner = inner + qk * (x * a_pow).powi((k - 1) as i32);
        }
        total = total + weight * inner;
        weight = weight * (one - gamma);
        a_pow = a_pow * a;
    }
    Ok(total)
}
