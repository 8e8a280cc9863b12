//! Discrete-time SIR on temporal networks and its generating-function
//! analytics.

mod analytic;
mod sir;

pub use analytic::{
    analytic_r0, analytic_r_star, h1_tilde, h1_tilde_derivative, h1_tilde_series, pgf_derivatives,
    transmission_probability, Pgf, PgfDerivatives,
};
pub use sir::{
    simulate_sir, Compartment, CompartmentCounts, EpidemicParams, EpidemicTrace, NodeRecord,
    OffspringTally, Seeding, SirConfig, SirState,
};
