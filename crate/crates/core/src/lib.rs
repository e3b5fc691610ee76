//! Monte Carlo simulation of entanglement swapping with random Jones vectors
//! and threshold detectors.

pub mod bsm;
pub mod chsh;
pub mod config;
pub mod field;
pub mod harness;
pub mod optics;
pub mod oracle;
pub mod output;
pub mod rng;
pub mod sampler;
pub mod tomography;
