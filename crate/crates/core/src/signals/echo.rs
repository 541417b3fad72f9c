//! Multi-scattering-center echo synthesis.

use alloc::format;
use alloc::vec;

use super::interp::Kernel;
use super::{normalize, TargetScene, Waveform};
use crate::math::{sin, SPEED_OF_LIGHT};
use crate::Result;

/// Sum of delayed, scaled copies of `tx`, one per scatterer, without
/// normalization.
///
/// Scatterer `i` sits at `R_i(t) = r_i + v t + ρ_i sin(ω t + φ_i)` and
/// contributes `σ_i tx(t - 2 R_i(t) / c)`. Fractional delays use the
/// band-limited kernel in [`super::interp`]; content delayed past the end of
/// the record is dropped.
pub fn synthesize_echo_raw(tx: &Waveform, scene: &TargetScene) -> Result<Waveform> {
    scene.validate()?;
    let fs = tx.sample_rate();
    let x = tx.samples();
    let mut out = vec![0.0; x.len()];
    for s in &scene.scatterers {
        if s.cross_section == 0.0 {
            continue;
        }
        for (n, y) in out.iter_mut().enumerate() {
            let t = n as f64 / fs;
            let range = s.range_offset
                + scene.radial_velocity * t
                + s.spin_radius * sin(scene.rotation_rate * t + s.spin_phase);
            let delay_samples = 2.0 * range / SPEED_OF_LIGHT * fs;
            *y += s.cross_section * Kernel::at(n as f64 - delay_samples).apply(x);
        }
    }
    let mut echo = tx.with_samples(out)?;
    echo.label = format!("{} echo ({} scatterers)", tx.label, scene.scatterers.len());
    Ok(echo)
}

/// [`synthesize_echo_raw`] followed by peak normalization.
pub fn synthesize_echo(tx: &Waveform, scene: &TargetScene, peak: f64) -> Result<Waveform> {
    normalize(&synthesize_echo_raw(tx, scene)?, peak)
}
