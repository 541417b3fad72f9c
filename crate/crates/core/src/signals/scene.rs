use alloc::vec::Vec;

use rand::Rng as _;

use crate::math::PI;
use crate::rng::{rng_from, stream};
use crate::{Error, Result};

pub const MAX_SCATTERERS: usize = 12;
pub const MAX_RANGE_OFFSET_M: f64 = 10.0;
pub const MAX_RADIAL_VELOCITY_MPS: f64 = 300.0;
pub const MAX_ROTATION_RATE_RPS: f64 = 0.2;
/// Lever arm of a scatterer about the target's rotation centre.
pub const MAX_SPIN_RADIUS_M: f64 = 1.0;

/// One point reflector of a multi-scattering-center target.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scatterer {
    /// Normalized reflectivity in `[0, 1]`.
    pub cross_section: f64,
    /// Range relative to the receive gate, meters.
    pub range_offset: f64,
    pub spin_radius: f64,
    pub spin_phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TargetScene {
    pub scatterers: Vec<Scatterer>,
    /// m/s, positive receding.
    pub radial_velocity: f64,
    /// rad/s.
    pub rotation_rate: f64,
}

impl TargetScene {
    pub fn validate(&self) -> Result<()> {
        let n = self.scatterers.len();
        if !(1..=MAX_SCATTERERS).contains(&n) {
            return Err(Error::invalid("scatterers", "count must be in 1..=12"));
        }
        let within = |x: f64, hi: f64| (0.0..=hi).contains(&x);
        for s in &self.scatterers {
            if !within(s.cross_section, 1.0) {
                return Err(Error::invalid("cross_section", "must be in [0, 1]"));
            }
            if !within(s.range_offset, MAX_RANGE_OFFSET_M) {
                return Err(Error::invalid("range_offset", "must be in [0, 10] m"));
            }
            if !within(s.spin_radius, MAX_SPIN_RADIUS_M) {
                return Err(Error::invalid("spin_radius", "must be in [0, 1] m"));
            }
            if !s.spin_phase.is_finite() {
                return Err(Error::invalid("spin_phase", "must be finite"));
            }
        }
        if !within(self.radial_velocity, MAX_RADIAL_VELOCITY_MPS) {
            return Err(Error::invalid("radial_velocity", "must be in [0, 300] m/s"));
        }
        if !within(self.rotation_rate, MAX_ROTATION_RATE_RPS) {
            return Err(Error::invalid("rotation_rate", "must be in [0, 0.2] rad/s"));
        }
        Ok(())
    }

    /// The scene restricted to a subset of scatterers (same motion).
    pub fn subset(&self, indices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            scatterers: indices.into_iter().map(|i| self.scatterers[i]).collect(),
            radial_velocity: self.radial_velocity,
            rotation_rate: self.rotation_rate,
        }
    }
}

/// Draws a random target; every parameter is uniform over its interval.
pub fn sample_target_scene(rng_seed: u64) -> TargetScene {
    let mut rng = rng_from(rng_seed, &[stream::SCENE]);
    let count = rng.random_range(1..=MAX_SCATTERERS);
    let scatterers = (0..count)
        .map(|_| Scatterer {
            cross_section: rng.random_range(0.0..=1.0),
            range_offset: rng.random_range(0.0..=MAX_RANGE_OFFSET_M),
            spin_radius: rng.random_range(0.0..=MAX_SPIN_RADIUS_M),
            spin_phase: rng.random_range(0.0..2.0 * PI),
        })
        .collect();
    TargetScene {
        scatterers,
        radial_velocity: rng.random_range(0.0..=MAX_RADIAL_VELOCITY_MPS),
        rotation_rate: rng.random_range(0.0..=MAX_ROTATION_RATE_RPS),
    }
}
