//! Error-probability bounds for reading a beam-splitter optical memory with
//! classical light and with an entangled (two-mode squeezed vacuum) transmitter.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`, which is what the tolerances in
//! this crate are tuned for.

// `!(x > 0)` style guards are deliberate: they reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod channel;
pub mod critical;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod optimize;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type GaussianState = gaussian::GaussianState<f64>;
pub type MemoryCell = channel::MemoryCell<f64>;
pub type IdealCell = channel::IdealCell<f64>;
pub type SignalProfile = channel::SignalProfile<f64>;
pub type GainReport = bounds::GainReport<f64>;
pub type CellBounds = bounds::CellBounds<f64>;
pub type CriticalPoint = critical::CriticalPoint<f64>;
pub type FockOperator = fock::FockOperator<f64>;
