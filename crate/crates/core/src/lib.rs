//! Coherent dynamics of a laser-driven three-level ladder atom
//! (ground → intermediate → Rydberg) in a thermal vapor.
//!
//! The crate is `no_std` with `alloc`. It covers the density-matrix model,
//! the cw steady state, adaptive time propagation through a coupling pulse,
//! Doppler averaging over velocity classes, scan drivers, spectral analysis
//! and the simultaneous-pulse optimizer. IO, configuration files and thread
//! pools live in the `rydberg-sim` companion crate; parallelism is injected
//! through the [`exec::Executor`] trait.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > y)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod constants;
pub mod doppler;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod integrate;
pub mod linalg;
pub mod liouville;
pub mod model;
pub mod optimize;
pub mod oracle;

pub use error::{Error, Result};
pub use linalg::{c64, Mat3};
pub use model::{DecayRates, DensityMatrix, LaserField, PulseEnvelope, PulseShape, RabiCalibration, VaporParams};
