//! Age-of-information minimization for RIS-assisted uplink NOMA IoT networks.
//!
//! The crate is organised around the per-slot pipeline:
//!
//! 1. [`channel`] places devices and draws block-fading channels.
//! 2. [`phase`] picks a shared RIS phase vector maximizing the minimum weak
//!    device gain (semidefinite relaxation in [`sdr`], then Gaussian
//!    randomization).
//! 3. [`power`] decides weak-device power inside each candidate NOMA pair.
//! 4. [`clustering`] prices every strong/weak pair by its resulting sum age
//!    and pairs devices with the Hungarian method.
//! 5. [`engine`] advances the ages and aggregates Monte Carlo statistics.
//!
//! [`config`] and [`sweep`] handle configuration files and CSV results;
//! [`validation`] bundles the brute-force oracle suites.

pub mod channel;
pub mod clustering;
pub mod config;
pub mod engine;
pub mod error;
pub mod phase;
pub mod power;
pub mod rng;
pub mod sdr;
pub mod sweep;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
