//! Link-level simulator for bacterial molecular computing on a chip.
//!
//! Pipeline: molecular pulse trains ([`transmitter`]) drive Hill-kinetics
//! logic gates ([`gate`]); the gate output diffuses to the sensor
//! ([`channel`]), picks up electrolyte noise ([`receiver`]) and is
//! digitised and scored ([`detection`]). [`electrochem`] maps outputs to pH,
//! sensor current and saturation; [`harness`] runs sweeps and writes CSV.

pub mod channel;
pub mod config;
pub mod detection;
pub mod electrochem;
pub mod error;
pub mod gate;
pub mod harness;
pub mod receiver;
pub mod rng;
pub mod transmitter;
pub mod units;

pub use config::{load_params, DetectorKind, GateKind, ScenarioFlags, SimParams};
pub use error::{Error, Result};
