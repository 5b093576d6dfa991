//! Models of a single electron on superfluid helium in an electrostatic dot,
//! coupled to a high-impedance microwave resonator.
//!
//! All quantities are SI. Frequencies and rates are angular (rad/s) unless a
//! name says otherwise; see [`units`].

pub mod constants;
pub mod analytic;
pub mod cluster;
pub mod cavity;
pub mod config;
pub mod error;
pub mod fitters;
pub mod potential;
pub mod qsolver;
pub mod resonator;
pub mod synth;
pub mod units;

pub use config::Config;
pub use constants::{PhysicalConstants, CODATA};
pub use error::{Error, Result};
pub use resonator::{derived_resonator_quantities, DerivedResonator, ResonatorParams};
pub use units::{convert_frequency, FreqUnit, Frequency};
