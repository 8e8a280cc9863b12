use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Shape parameters of a Beta distribution on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams<S> {
    pub alpha: S,
    pub beta: S,
}

impl<S: Scalar> BetaParams<S> {
    pub fn new(alpha: S, beta: S) -> Result<Self> {
        if !(alpha > S::zero() && beta > S::zero()) {
            return Err(invalid(format!("Beta shapes must be positive, got ({alpha}, {beta})")));
        }
        Ok(Self { alpha, beta })
    }

    /// E(W) = α / (α + β).
    pub fn mean(&self) -> S {
        self.alpha / (self.alpha + self.beta)
    }

    /// E(W²) = α(α + 1) / ((α + β)(α + β + 1)).
    pub fn second_moment(&self) -> S {
        let s = self.alpha + self.beta;
        self.alpha * (self.alpha + S::one()) / (s * (s + S::one()))
    }

    /// Var(W) = αβ / ((α + β)²(α + β + 1)).
    pub fn variance(&self) -> S {
        let s = self.alpha + self.beta;
        self.alpha * self.beta / (s * s * (s + S::one()))
    }
}

impl<S: fmt::Display> fmt::Display for BetaParams<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Beta({}, {})", self.alpha, self.beta)
    }
}

/// How long drawn persistence probabilities stay fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Redrawn at every snapshot index divisible by the window length.
    Periodic(usize),
    /// Drawn once and kept for the whole run.
    Forever,
}

impl Window {
    pub fn periodic(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(invalid("window length must be at least 1"));
        }
        Ok(Window::Periodic(len))
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "forever" {
            return Ok(Window::Forever);
        }
        let len = s
            .parse::<usize>()
            .map_err(|_| invalid(format!("window `{s}`: expected a positive integer or `forever`")))?;
        Window::periodic(len)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Periodic(n) => write!(f, "{n}"),
            Window::Forever => f.write_str("forever"),
        }
    }
}

/// Edge persistence model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PersistenceModel {
    /// Every edge breaks at every step.
    Model0,
    /// One persistence probability for all edges.
    Model1 { p: f64 },
    /// Edge-level probabilities drawn from a Beta law.
    Model2 { dist: BetaParams<f64>, window: Window },
    /// Node-level probabilities drawn from a Beta law; an edge persists
    /// with the product of its endpoints' probabilities.
    Model3 { dist: BetaParams<f64>, window: Window },
}

/// Model family without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Model0,
    Model1,
    Model2,
    Model3,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Model0, ModelKind::Model1, ModelKind::Model2, ModelKind::Model3];

    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::Model0 => "m0",
            ModelKind::Model1 => "m1",
            ModelKind::Model2 => "m2",
            ModelKind::Model3 => "m3",
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m0" | "model0" | "0" => Ok(ModelKind::Model0),
            "m1" | "model1" | "1" => Ok(ModelKind::Model1),
            "m2" | "model2" | "2" => Ok(ModelKind::Model2),
            "m3" | "model3" | "3" => Ok(ModelKind::Model3),
            _ => Err(invalid(format!("unknown model `{s}` (expected m0..m3)"))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl PersistenceModel {
    pub fn model1(p: f64) -> Result<Self> {
        let m = PersistenceModel::Model1 { p };
        m.validate()?;
        Ok(m)
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            PersistenceModel::Model0 => ModelKind::Model0,
            PersistenceModel::Model1 { .. } => ModelKind::Model1,
            PersistenceModel::Model2 { .. } => ModelKind::Model2,
            PersistenceModel::Model3 { .. } => ModelKind::Model3,
        }
    }

    pub fn window(&self) -> Option<Window> {
        match self {
            PersistenceModel::Model2 { window, .. } | PersistenceModel::Model3 { window, .. } => Some(*window),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PersistenceModel::Model0 => Ok(()),
            PersistenceModel::Model1 { p } => {
                if (0.0..=1.0).contains(&p) {
                    Ok(())
                } else {
                    Err(invalid(format!("persistence probability {p} outside [0, 1]")))
                }
            }
            PersistenceModel::Model2 { dist, window } | PersistenceModel::Model3 { dist, window } => {
                if !(dist.alpha > 0.0 && dist.beta > 0.0 && dist.alpha.is_finite() && dist.beta.is_finite()) {
                    return Err(invalid(format!("bad Beta shapes {dist}")));
                }
                if window == Window::Periodic(0) {
                    return Err(invalid("window length must be at least 1"));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for PersistenceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PersistenceModel::Model0 => f.write_str("m0"),
            PersistenceModel::Model1 { p } => write!(f, "m1 p={p}"),
            PersistenceModel::Model2 { dist, window } => write!(f, "m2 W={dist} window={window}"),
            PersistenceModel::Model3 { dist, window } => write!(f, "m3 W={dist} window={window}"),
        }
    }
}
