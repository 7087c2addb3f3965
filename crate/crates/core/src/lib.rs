//! Downlink channel training of an FDD massive-MIMO link attacked by a
//! multi-antenna jammer.
//!
//! The base station sends `L` unitary pilot symbols from `M` antennas; a
//! jammer with `N` antennas transmits a unitary block over the same symbols;
//! the single-antenna UE forms the MMSE estimate of its spatially correlated
//! channel. This crate computes the resulting per-antenna MSE in closed form
//! and by Monte Carlo for optimal, worst-case and random pilots and for
//! silent, single-shot, eigen-optimal and random jammers.
//!
//! ```
//! use fddjam::channel::{exponential_covariance, CorrelationSpec};
//! use fddjam::jammer::optimal_jamming;
//! use fddjam::training::{optimal_pilots, scenario_mse, EstimatorMode, TrainingConfig};
//!
//! let cfg = TrainingConfig::new(32, 16, 8, 5.0, 5.0, 0.7);
//! let r_h = exponential_covariance(CorrelationSpec::new(32, 0.7)?)?;
//! let r_g = exponential_covariance(CorrelationSpec::new(16, 0.7)?)?;
//! let pilots = optimal_pilots(&r_h, 8)?;
//! let z = optimal_jamming(&r_g, 8)?;
//! let silent = scenario_mse(&pilots, None, &r_h, &r_g, &cfg, EstimatorMode::JammerAware)?;
//! let jammed = scenario_mse(&pilots, Some(&z), &r_h, &r_g, &cfg, EstimatorMode::JammerAware)?;
//! assert!(jammed > silent);
//! # Ok::<(), fddjam::Error>(())
//! ```

pub mod channel;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod experiments;
pub mod jammer;
pub mod linalg;
pub mod seed;
pub mod tolerances;
pub mod training;

pub use error::{Error, Result};
