use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{invalid, Error, Result};

/// Per-node target degrees with an even sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<usize>,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        let sum: usize = degrees.iter().sum();
        if sum % 2 == 1 {
            return Err(Error::OddDegreeSum(sum));
        }
        Ok(Self { degrees })
    }

    /// Accepts any sequence; an odd sum is repaired by adding one to the
    /// degree of a uniformly chosen node. The flag reports whether that
    /// happened.
    pub fn repaired<R: Rng + ?Sized>(mut degrees: Vec<usize>, rng: &mut R) -> Result<(Self, bool)> {
        if degrees.is_empty() {
            return Err(invalid("degree sequence needs at least one node"));
        }
        let sum: usize = degrees.iter().sum();
        let odd = sum % 2 == 1;
        if odd {
            let i = rng.random_range(0..degrees.len());
            degrees[i] += 1;
        }
        Ok((Self { degrees }, odd))
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }
}

/// `n` independent Poisson(`mean`) degrees, parity-repaired.
pub fn sample_poisson_degrees<R: Rng + ?Sized>(
    n: usize,
    mean: f64,
    rng: &mut R,
) -> Result<DegreeSequence> {
    Ok(DegreeLaw::Poisson(mean).sample(n, rng)?.0)
}

/// Degree law accepted on the command line: `poisson:<mean>` or `const:<k>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreeLaw {
    Poisson(f64),
    Constant(usize),
}

impl DegreeLaw {
    /// Draws `n` degrees; the flag reports an odd-sum repair.
    pub fn sample<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Result<(DegreeSequence, bool)> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let raw = match self {
            DegreeLaw::Poisson(mean) => {
                if !(mean > 0.0 && mean.is_finite()) {
                    return Err(invalid(format!("Poisson mean must be positive, got {mean}")));
                }
                let law = Poisson::new(mean).map_err(|e| invalid(e.to_string()))?;
                (0..n).map(|_| law.sample(rng) as usize).collect()
            }
            DegreeLaw::Constant(k) => vec![k; n],
        };
        DegreeSequence::repaired(raw, rng)
    }

    pub fn mean(self) -> f64 {
        match self {
            DegreeLaw::Poisson(m) => m,
            DegreeLaw::Constant(k) => k as f64,
        }
    }
}

impl FromStr for DegreeLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| invalid(format!("degree law `{s}`: expected poisson:<mean> or const:<k>")))?;
        match kind {
            "poisson" => value
                .parse::<f64>()
                .map(DegreeLaw::Poisson)
                .map_err(|_| invalid(format!("bad Poisson mean `{value}`"))),
            "const" => value
                .parse::<usize>()
                .map(DegreeLaw::Constant)
                .map_err(|_| invalid(format!("bad constant degree `{value}`"))),
            _ => Err(invalid(format!("unknown degree law `{kind}`"))),
        }
    }
}

impl fmt::Display for DegreeLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeLaw::Poisson(m) => write!(f, "poisson:{m}"),
            DegreeLaw::Constant(k) => write!(f, "const:{k}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn odd_sum_rejected_or_repaired() {
        assert!(matches!(DegreeSequence::new(vec![1, 0]), Err(Error::OddDegreeSum(1))));
        let mut rng = rng_from_seed(3);
        let (seq, fixed) = DegreeSequence::repaired(vec![1, 1, 1], &mut rng).unwrap();
        assert!(fixed);
        assert_eq!(seq.total(), 4);
        let (seq, fixed) = DegreeSequence::repaired(vec![1, 1], &mut rng).unwrap();
        assert!(!fixed);
        assert_eq!(seq.degrees(), &[1, 1]);
    }

    #[test]
    fn tiny_mean_gives_zero_degree() {
        let mut rng = rng_from_seed(0);
        let seq = sample_poisson_degrees(1, 1e-12, &mut rng).unwrap();
        assert_eq!(seq.degrees(), &[0]);
    }

    #[test]
    fn poisson_mean_close_to_six() {
        // mean of 1000 draws within 3 standard errors, for several seeds
        for seed in 0..20 {
            let mut rng = rng_from_seed(seed);
            let seq = sample_poisson_degrees(1000, 6.0, &mut rng).unwrap();
            let mean = seq.total() as f64 / 1000.0;
            assert!((mean - 6.0).abs() < 3.0 * (6.0f64 / 1000.0).sqrt() + 1e-3, "seed {seed}: {mean}");
        }
    }

    #[test]
    fn poisson_variance_matches_mean() {
        let mut vars = Vec::new();
        for seed in 0..20 {
            let mut rng = rng_from_seed(100 + seed);
            let seq = sample_poisson_degrees(10_000, 6.0, &mut rng).unwrap();
            let d: Vec<f64> = seq.degrees().iter().map(|&k| k as f64).collect();
            let m = d.iter().sum::<f64>() / d.len() as f64;
            let v = d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (d.len() - 1) as f64;
            vars.push(v);
        }
        let avg = vars.iter().sum::<f64>() / vars.len() as f64;
        assert!((avg - 6.0).abs() < 0.6, "variance {avg}");
    }

    #[test]
    fn parses_laws() {
        assert_eq!("poisson:6".parse::<DegreeLaw>().unwrap(), DegreeLaw::Poisson(6.0));
        assert_eq!("const:3".parse::<DegreeLaw>().unwrap(), DegreeLaw::Constant(3));
        assert!("gauss:1".parse::<DegreeLaw>().is_err());
        assert!("poisson".parse::<DegreeLaw>().is_err());
        assert!(DegreeLaw::Poisson(-1.0).sample(3, &mut rng_from_seed(0)).is_err());
    }
}
