//! Local frequency and amplitude of the input under each bottleneck step.

use std::f64::consts::PI;

use mwp_core::analysis::receptive_field;
use mwp_core::rae::LENGTH_MULTIPLE;

use crate::spectral::analytic;

/// `(freq_hz, amplitude)` for the 16-sample segment centred on each
/// bottleneck step's receptive field. Frequency is the mean phase advance of
/// the analytic signal; amplitude is the envelope rms `sqrt(mean|z|² / 2)`,
/// which equals the segment rms for whole cycles and stays flat for a
/// constant envelope at any phase.
pub fn label_segments(x: &[f64], sample_rate: f64) -> Vec<(f64, f64)> {
    let len = x.len();
    let steps = len / LENGTH_MULTIPLE;
    if steps == 0 {
        return Vec::new();
    }
    // zero padding keeps the transform's circular wrap away from the record
    let mut padded = x.to_vec();
    padded.resize(2 * len, 0.0);
    let z = analytic(&padded);
    let rf = receptive_field(len);
    let half = LENGTH_MULTIPLE as isize / 2;
    (0..steps)
        .map(|t| {
            let centre = t as isize * rf.jump as isize + rf.offset + (rf.size as isize - 1) / 2;
            let lo = (centre - half).clamp(0, len as isize - LENGTH_MULTIPLE as isize) as usize;
            let seg = &z[lo..lo + LENGTH_MULTIPLE];
            let advance: f64 = seg.windows(2).map(|w| (w[1] * w[0].conj()).arg()).sum::<f64>()
                / (seg.len() - 1) as f64;
            let freq = (advance * sample_rate / (2.0 * PI)).abs();
            let power = seg.iter().map(|c| c.norm_sqr()).sum::<f64>() / seg.len() as f64;
            (freq, (power / 2.0).sqrt())
        })
        .collect()
}
