//! Proximity-ping ingestion, period networks and file formats.

mod formats;
mod pings;
mod sequence;

pub use formats::*;
pub use pings::{load_pings, read_pings, PingLoad, PingRecord};
pub use sequence::{
    build_period_networks, build_period_networks_with_roster, fit_from_sequence, union_networks, NetworkSequence,
};
