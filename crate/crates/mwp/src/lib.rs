//! Files, spectra and the command line around `mwp-core`.
//!
//! Binary formats live in [`format`], CSV in [`table`], the run
//! configuration and its sidecars in [`config`]. [`spectral`] and [`labels`]
//! need an FFT and so sit here rather than in the core crate.

pub mod cli;
pub mod config;
mod error;
pub mod format;
pub mod labels;
pub mod spectral;
pub mod study;
pub mod table;

pub use error::{Error, FormatError, Result};
