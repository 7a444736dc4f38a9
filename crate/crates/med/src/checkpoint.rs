//! Binary parameter checkpoints.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic    8 bytes  "MEDPARAM"
//! version  u32
//! dims     7 × u64  input_vocab output_vocab embedding hidden attention readout maxout_pieces
//! count    u32
//! count × { name_len u32, name utf-8, ndim u32, shape ndim × u64, values f64 × Π shape }
//! ```
//!
//! Values are stored as raw IEEE-754 bits, so a round trip is exact.

use std::path::Path;

use med_core::neural::{Dims, ModelParams, NeuralError, Tensor};

use crate::{io_err, Error, Result};

pub const MAGIC: &[u8; 8] = b"MEDPARAM";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CheckpointError {
    #[error("not a parameter checkpoint (bad magic header)")]
    BadMagic,
    #[error("unsupported checkpoint version {0} (expected {VERSION})")]
    Version(u32),
    #[error("checkpoint is truncated")]
    Truncated,
    #[error("{0} unexpected trailing bytes")]
    TrailingBytes(usize),
    #[error("tensor {index}: expected {expected:?}, found {found:?}")]
    Name { index: usize, expected: String, found: String },
    #[error("tensor name is not UTF-8")]
    BadName,
    #[error(transparent)]
    Shape(#[from] NeuralError),
}

pub fn encode(params: &ModelParams) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + 8 * params.parameter_count());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let d = params.dims();
    for v in [d.input_vocab, d.output_vocab, d.embedding, d.hidden, d.attention, d.readout, d.maxout_pieces] {
        out.extend_from_slice(&(v as u64).to_le_bytes());
    }
    let names = ModelParams::names();
    let tensors = params.tensors();
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for (name, t) in names.iter().zip(tensors) {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(t.shape().len() as u32).to_le_bytes());
        for s in t.shape() {
            out.extend_from_slice(&(*s as u64).to_le_bytes());
        }
        for v in t.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        if self.bytes.len() < n {
            return Err(CheckpointError::Truncated);
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CheckpointError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize, CheckpointError> {
        usize::try_from(self.u64()?).map_err(|_| CheckpointError::Truncated)
    }
}

pub fn decode(bytes: &[u8]) -> Result<ModelParams, CheckpointError> {
    let mut r = Reader { bytes };
    if r.take(MAGIC.len()).map_err(|_| CheckpointError::BadMagic)? != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(CheckpointError::Version(version));
    }
    let dims = Dims {
        input_vocab: r.usize()?,
        output_vocab: r.usize()?,
        embedding: r.usize()?,
        hidden: r.usize()?,
        attention: r.usize()?,
        readout: r.usize()?,
        maxout_pieces: r.usize()?,
    };
    let names = ModelParams::names();
    let count = r.u32()? as usize;
    let mut tensors = Vec::with_capacity(count);
    for index in 0..count {
        let len = r.u32()? as usize;
        let found = std::str::from_utf8(r.take(len)?).map_err(|_| CheckpointError::BadName)?;
        let expected = names.get(index).map(String::as_str).unwrap_or("");
        if found != expected {
            return Err(CheckpointError::Name {
                index,
                expected: expected.into(),
                found: found.into(),
            });
        }
        let ndim = r.u32()? as usize;
        let shape = (0..ndim).map(|_| r.usize()).collect::<Result<Vec<_>, _>>()?;
        let n = shape
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or(CheckpointError::Truncated)?;
        let raw = r.take(n.checked_mul(8).ok_or(CheckpointError::Truncated)?)?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        tensors.push(Tensor::from_vec(&shape, data)?);
    }
    if !r.bytes.is_empty() {
        return Err(CheckpointError::TrailingBytes(r.bytes.len()));
    }
    Ok(ModelParams::from_tensors(dims, tensors)?)
}

pub fn save(path: &Path, params: &ModelParams) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    std::fs::write(path, encode(params)).map_err(io_err(path))
}

pub fn load(path: &Path) -> Result<ModelParams> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    decode(&bytes).map_err(|e| match e {
        CheckpointError::Version(found) => Error::Version {
            path: path.into(),
            found: found.into(),
            expected: VERSION.into(),
        },
        other => crate::format_err(path, other.to_string()),
    })
}
