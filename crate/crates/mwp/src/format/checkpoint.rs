use std::path::Path;

use mwp_core::rae::{RaeParams, RaeShape, KERNELS, NUM_LAYERS, STRIDES};
use mwp_core::tensor::ConvLayerParams;
use mwp_core::train::{AdamState, TrainState};

use super::{in_file, put_f32s, read_file, write_file, Reader};
use crate::error::{FormatError, Result};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"MWPC";
pub const CHECKPOINT_VERSION: u32 = 1;
const KIND: &str = "checkpoint";

/// Network weights, plus the optimizer state when training can resume.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: RaeParams<f32>,
    pub optimizer: Option<(usize, AdamState)>,
}

impl Checkpoint {
    pub fn weights_only(params: RaeParams<f32>) -> Self {
        Self { params, optimizer: None }
    }

    pub fn from_state(state: &TrainState) -> Self {
        Self {
            params: state.params.clone(),
            optimizer: Some((state.iteration, state.adam.clone())),
        }
    }

    /// Resumable state; a weights-only checkpoint restarts the optimizer.
    pub fn into_state(self) -> TrainState {
        let n = self.params.param_count();
        let (iteration, adam) = self.optimizer.unwrap_or_else(|| (0, AdamState::new(n)));
        TrainState {
            params: self.params,
            adam,
            iteration,
        }
    }
}

/// Per layer `(in, out, kernel)` as u32 then weights and bias as f32; then a
/// flag byte and, when set, iteration u64, Adam step u64 and the two moment
/// vectors as f64.
pub fn encode_checkpoint(ck: &Checkpoint) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    for l in ck.params.layers() {
        for d in [l.in_channels, l.out_channels, l.kernel_width] {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        put_f32s(&mut out, &l.weights);
        put_f32s(&mut out, &l.bias);
    }
    match &ck.optimizer {
        None => out.push(0),
        Some((iteration, adam)) => {
            out.push(1);
            out.extend_from_slice(&(*iteration as u64).to_le_bytes());
            out.extend_from_slice(&adam.step_count.to_le_bytes());
            for v in adam.m.iter().chain(&adam.v) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    out
}

pub fn decode_checkpoint(bytes: &[u8]) -> std::result::Result<Checkpoint, FormatError> {
    let mut r = Reader::new(bytes, KIND);
    r.magic(CHECKPOINT_MAGIC)?;
    r.version(CHECKPOINT_VERSION)?;
    let mut layers = Vec::with_capacity(NUM_LAYERS);
    for i in 0..NUM_LAYERS {
        let (cin, cout, k) = (r.u32()? as usize, r.u32()? as usize, r.u32()? as usize);
        if k != KERNELS[i] {
            return Err(r.invalid(format!("layer {i} has kernel {k}, expected {}", KERNELS[i])));
        }
        let mut layer = ConvLayerParams::zeros(RaeShape::kind(i), cin, cout, k, STRIDES[i]);
        layer.weights = r.f32s(cin * cout * k)?;
        layer.bias = r.f32s(cout)?;
        layers.push(layer);
    }
    let outs: Vec<usize> = layers.iter().map(|l| l.out_channels).collect();
    let shape = RaeShape {
        conv: outs[..5].try_into().expect("five conv layers"),
        deconv: outs[5..8].try_into().expect("three hidden transposed layers"),
    };
    let params = RaeParams::from_layers(shape, layers).map_err(|e| r.invalid(e.to_string()))?;
    let optimizer = match r.u8()? {
        0 => None,
        1 => {
            let iteration = r.u64()? as usize;
            let n = params.param_count();
            let mut adam = AdamState::new(n);
            adam.step_count = r.u64()?;
            adam.m = r.f64s(n)?;
            adam.v = r.f64s(n)?;
            adam.validate(n).map_err(|e| r.invalid(e.to_string()))?;
            Some((iteration, adam))
        }
        flag => return Err(r.invalid(format!("optimizer flag {flag} is neither 0 nor 1"))),
    };
    r.finish()?;
    Ok(Checkpoint { params, optimizer })
}

pub fn write_checkpoint(path: &Path, ck: &Checkpoint) -> Result<()> {
    write_file(path, &encode_checkpoint(ck))
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    decode_checkpoint(&read_file(path)?).map_err(in_file(path))
}
