//! Transmit waveforms and radar-echo synthesis.

mod chirp;
mod echo;
pub mod interp;
mod scene;
mod waveform;

pub use chirp::{
    costas_sequence, gen_costas, gen_lfm, is_prime, is_primitive_root, primitive_roots,
};
pub use echo::{synthesize_echo, synthesize_echo_raw};
pub use scene::{
    sample_target_scene, Scatterer, TargetScene, MAX_RADIAL_VELOCITY_MPS, MAX_RANGE_OFFSET_M,
    MAX_ROTATION_RATE_RPS, MAX_SCATTERERS, MAX_SPIN_RADIUS_M,
};
pub use waveform::{normalize, Waveform};

/// Default digitizer rate, samples per second.
pub const DEFAULT_SAMPLE_RATE: f64 = 20e9;
/// Default record length; a multiple of 16 as the autoencoder requires.
pub const DEFAULT_RECORD_LEN: usize = 4096;
/// Peak amplitude of every clean waveform entering the link.
pub const DEFAULT_PEAK: f64 = 0.9;
