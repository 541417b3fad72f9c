use std::path::Path;

use mwp_core::channel::{Dataset, Example};

use super::{in_file, put_f32s, read_file, write_file, Reader};
use crate::error::{FormatError, Result};

pub const DATASET_MAGIC: &[u8; 4] = b"MWPD";
pub const DATASET_VERSION: u32 = 1;
const KIND: &str = "dataset";

/// Header, then each example's clean record followed by its distorted one.
pub fn encode_dataset(ds: &Dataset) -> Vec<u8> {
    let mut out = Vec::with_capacity(28 + ds.examples.len() * ds.length * 8);
    out.extend_from_slice(DATASET_MAGIC);
    out.extend_from_slice(&DATASET_VERSION.to_le_bytes());
    out.extend_from_slice(&(ds.examples.len() as u32).to_le_bytes());
    out.extend_from_slice(&(ds.length as u32).to_le_bytes());
    out.extend_from_slice(&ds.sample_rate.to_le_bytes());
    out.extend_from_slice(&(ds.train_count as u32).to_le_bytes());
    for ex in &ds.examples {
        put_f32s(&mut out, &ex.clean);
        put_f32s(&mut out, &ex.distorted);
    }
    out
}

pub fn decode_dataset(bytes: &[u8]) -> std::result::Result<Dataset, FormatError> {
    let mut r = Reader::new(bytes, KIND);
    r.magic(DATASET_MAGIC)?;
    r.version(DATASET_VERSION)?;
    let count = r.u32()? as usize;
    let length = r.u32()? as usize;
    let sample_rate = r.f64()?;
    let train_count = r.u32()? as usize;
    if train_count > count {
        return Err(r.invalid(format!("split boundary {train_count} exceeds {count} examples")));
    }
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(r.invalid(format!("sample rate {sample_rate} is not positive")));
    }
    r.need(count * length * 8)?;
    let examples = (0..count)
        .map(|_| {
            Ok(Example {
                clean: r.f32s(length)?,
                distorted: r.f32s(length)?,
            })
        })
        .collect::<std::result::Result<Vec<_>, FormatError>>()?;
    r.finish()?;
    Ok(Dataset {
        sample_rate,
        length,
        train_count,
        examples,
    })
}

pub fn write_dataset(path: &Path, ds: &Dataset) -> Result<()> {
    write_file(path, &encode_dataset(ds))
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let ds = decode_dataset(&read_file(path)?).map_err(in_file(path))?;
    ds.validate()?;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Dataset {
        Dataset {
            sample_rate: 20e9,
            length: 16,
            train_count: 2,
            examples: (0..3)
                .map(|i| Example {
                    clean: (0..16).map(|n| (n + i) as f32 * 0.01).collect(),
                    distorted: (0..16).map(|n| -((n * i) as f32) * 0.02).collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn round_trip() {
        let ds = tiny();
        let bytes = encode_dataset(&ds);
        assert_eq!(bytes.len(), 28 + 3 * 16 * 8);
        assert_eq!(decode_dataset(&bytes).unwrap(), ds);
    }

    #[test]
    fn rejects_bad_headers() {
        let mut bytes = encode_dataset(&tiny());
        bytes[4] = 9;
        let err = decode_dataset(&bytes).unwrap_err();
        assert!(matches!(err, FormatError::UnsupportedVersion { found: 9, supported: 1, .. }));
        assert!(err.to_string().contains("version 9") && err.to_string().contains("version 1"));
        bytes[0] = b'X';
        assert!(matches!(decode_dataset(&bytes), Err(FormatError::BadMagic { .. })));
    }

    #[test]
    fn rejects_truncation_and_trailing_bytes() {
        let bytes = encode_dataset(&tiny());
        let err = decode_dataset(&bytes[..bytes.len() - 3]).unwrap_err();
        assert!(matches!(err, FormatError::Truncated { needed, available, .. } if needed == bytes.len() && available == bytes.len() - 3));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(decode_dataset(&long), Err(FormatError::TrailingBytes { extra: 1, .. })));
    }
}
