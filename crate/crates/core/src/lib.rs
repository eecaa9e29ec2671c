//! Frame bounds and weaving certificates for dilation and Gabor systems.
//!
//! The crate computes certified frame bounds for painless wavelet-type
//! systems whose frame operator is a pointwise multiplier, checks when
//! several such systems can be woven (mixed scale by scale without losing
//! the frame property), runs the analogous construction for regular Gabor
//! systems, explores finite-dimensional fusion frames of subspace packets,
//! and carries an analysis/synthesis engine to exercise the certificates on
//! concrete signals.

pub mod error;
pub mod frame_core;
pub mod gabor;
pub mod generators;
pub mod packets;
pub mod rng;
mod sweep;
pub mod transform;
pub mod weaving;

pub use error::{FrameError, Result};
