//! Little-endian binary containers: datasets (`MWPD`) and network
//! checkpoints (`MWPC`).

mod checkpoint;
mod dataset;

use std::fs;
use std::path::Path;

pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, read_checkpoint, write_checkpoint, Checkpoint, CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
};
pub use dataset::{decode_dataset, encode_dataset, read_dataset, write_dataset, DATASET_MAGIC, DATASET_VERSION};

use crate::error::{Error, FormatError, Result};

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    kind: &'static str,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8], kind: &'static str) -> Self {
        Self { buf, pos: 0, kind }
    }

    /// Fails up front when fewer than `n` bytes remain.
    pub(crate) fn need(&self, n: usize) -> std::result::Result<(), FormatError> {
        if self.buf.len() - self.pos < n {
            return Err(FormatError::Truncated {
                kind: self.kind,
                needed: self.pos + n,
                available: self.buf.len(),
            });
        }
        Ok(())
    }

    fn take<const N: usize>(&mut self) -> std::result::Result<[u8; N], FormatError> {
        self.need(N)?;
        let out = self.buf[self.pos..self.pos + N].try_into().expect("length checked");
        self.pos += N;
        Ok(out)
    }

    pub(crate) fn magic(&mut self, expected: &[u8; 4]) -> std::result::Result<(), FormatError> {
        let found = self.take::<4>()?;
        if &found != expected {
            return Err(FormatError::BadMagic {
                kind: self.kind,
                expected: String::from_utf8_lossy(expected).into_owned(),
                found: String::from_utf8_lossy(&found).into_owned(),
            });
        }
        Ok(())
    }

    pub(crate) fn version(&mut self, supported: u32) -> std::result::Result<(), FormatError> {
        let found = self.u32()?;
        if found != supported {
            return Err(FormatError::UnsupportedVersion {
                kind: self.kind,
                found,
                supported,
            });
        }
        Ok(())
    }

    pub(crate) fn u8(&mut self) -> std::result::Result<u8, FormatError> {
        Ok(self.take::<1>()?[0])
    }

    pub(crate) fn u32(&mut self) -> std::result::Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    pub(crate) fn u64(&mut self) -> std::result::Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    pub(crate) fn f64(&mut self) -> std::result::Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take()?))
    }

    pub(crate) fn f32s(&mut self, n: usize) -> std::result::Result<Vec<f32>, FormatError> {
        self.need(n * 4)?;
        (0..n).map(|_| Ok(f32::from_le_bytes(self.take()?))).collect()
    }

    pub(crate) fn f64s(&mut self, n: usize) -> std::result::Result<Vec<f64>, FormatError> {
        self.need(n * 8)?;
        (0..n).map(|_| self.f64()).collect()
    }

    pub(crate) fn finish(self) -> std::result::Result<(), FormatError> {
        match self.buf.len() - self.pos {
            0 => Ok(()),
            extra => Err(FormatError::TrailingBytes { kind: self.kind, extra }),
        }
    }

    pub(crate) fn invalid(&self, reason: impl Into<String>) -> FormatError {
        FormatError::Invalid {
            kind: self.kind,
            reason: reason.into(),
        }
    }
}

pub(crate) fn put_f32s(out: &mut Vec<u8>, v: &[f32]) {
    for x in v {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn in_file(path: &Path) -> impl Fn(FormatError) -> Error + '_ {
    move |source| Error::Format {
        path: path.to_path_buf(),
        source,
    }
}
