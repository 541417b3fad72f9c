//! Broadband signal recovery for defective analog receive links.
//!
//! The crate synthesizes radar echoes ([`signals`]), pushes them through
//! parametric models of a defective analog link ([`channel`]), and learns the
//! end-to-end inverse with a residual 1D convolutional autoencoder ([`rae`])
//! built on a small hand-differentiated kernel library ([`tensor`]) and trained
//! with Adam ([`train`]). [`eval`] and [`analysis`] hold the recovery metrics,
//! the noise-robustness sweep and the t-SNE feature study.
//!
//! Everything here is pure computation over `alloc` collections; file formats,
//! spectral tools and the command-line front end live in the `mwp` crate.
//! The `std` feature (on by default) only enables batch-parallel training.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod channel;
mod error;
mod par;
pub mod eval;
pub mod math;
pub mod rae;
pub mod rng;
pub mod signals;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
