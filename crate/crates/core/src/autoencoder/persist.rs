//! Binary model file.
//!
//! ```text
//! "DCAE"                      4 bytes magic
//! version                     u32 LE
//! header length               u32 LE
//! header                      UTF-8 JSON {"config": AEConfig, "meta": TrainingMeta}
//! per tensor, in params() order:
//!     element count           u32 LE
//!     elements                f64 LE each
//! checksum                    u64 LE, wrapping sum of every tensor element byte
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{AEConfig, TrainingMeta};
use super::model::AEModel;
use crate::error::{Error, ModelFormatError, Result};
use crate::nn::{DenseLayer, PointwiseConvLayer};

pub const MODEL_MAGIC: &[u8; 4] = b"DCAE";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    config: AEConfig,
    meta: TrainingMeta,
}

pub fn model_to_bytes(model: &AEModel) -> Vec<u8> {
    let header = serde_json::to_vec(&Header {
        config: model.config().clone(),
        meta: model.meta.clone(),
    })
    .expect("model header serializes");

    let mut out = Vec::with_capacity(16 + header.len() + 8 * model.param_count());
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(&header);

    let mut checksum = 0u64;
    for tensor in model.params() {
        out.extend_from_slice(&(tensor.len() as u32).to_le_bytes());
        for v in tensor {
            let bytes = v.to_le_bytes();
            checksum = bytes
                .iter()
                .fold(checksum, |acc, &b| acc.wrapping_add(u64::from(b)));
            out.extend_from_slice(&bytes);
        }
    }
    out.extend_from_slice(&checksum.to_le_bytes());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ModelFormatError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or(ModelFormatError::Truncated {
                offset: self.bytes.len(),
            })?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32, ModelFormatError> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    fn u64(&mut self) -> Result<u64, ModelFormatError> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
}

pub fn model_from_bytes(bytes: &[u8]) -> Result<AEModel, ModelFormatError> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r
        .take(4)
        .map_err(|_| ModelFormatError::BadMagic(bytes.to_vec()))?;
    if magic != MODEL_MAGIC {
        return Err(ModelFormatError::BadMagic(magic.to_vec()));
    }
    let version = r.u32()?;
    if version != MODEL_VERSION {
        return Err(ModelFormatError::UnsupportedVersion {
            found: version,
            supported: MODEL_VERSION,
        });
    }
    let header_len = r.u32()? as usize;
    let header: Header = serde_json::from_slice(r.take(header_len)?)
        .map_err(|e| ModelFormatError::Config(e.to_string()))?;
    header
        .config
        .validate()
        .map_err(|e| ModelFormatError::Config(e.to_string()))?;

    let mut checksum = 0u64;
    let mut read_tensor = |r: &mut Reader<'_>, expected: usize, what: &str| {
        let count = r.u32()? as usize;
        if count != expected {
            return Err(ModelFormatError::ShapeMismatch(format!(
                "{what}: config implies {expected} elements, file stores {count}"
            )));
        }
        let raw = r.take(
            count
                .checked_mul(8)
                .ok_or(ModelFormatError::Truncated { offset: r.pos })?,
        )?;
        checksum = raw
            .iter()
            .fold(checksum, |acc, &b| acc.wrapping_add(u64::from(b)));
        let values: Vec<f64> = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ModelFormatError::ShapeMismatch(format!(
                "{what} contains non-finite values"
            )));
        }
        Ok(values)
    };

    let config = header.config;
    let mut encoder = Vec::new();
    for (i, w) in config.encoder_chain().windows(2).enumerate() {
        let weights = read_tensor(&mut r, w[0] * w[1], &format!("encoder[{i}].weights"))?;
        let bias = read_tensor(&mut r, w[1], &format!("encoder[{i}].bias"))?;
        encoder.push(
            PointwiseConvLayer::new(w[0], w[1], weights, bias)
                .map_err(|e| ModelFormatError::ShapeMismatch(e.to_string()))?,
        );
    }
    let mut decoder = Vec::new();
    for (i, w) in config.decoder_chain().windows(2).enumerate() {
        let weights = read_tensor(&mut r, w[0] * w[1], &format!("decoder[{i}].weights"))?;
        let bias = read_tensor(&mut r, w[1], &format!("decoder[{i}].bias"))?;
        decoder.push(
            DenseLayer::new(w[0], w[1], weights, bias)
                .map_err(|e| ModelFormatError::ShapeMismatch(e.to_string()))?,
        );
    }

    let stored = r.u64()?;
    if stored != checksum {
        return Err(ModelFormatError::Checksum {
            stored,
            computed: checksum,
        });
    }
    if r.pos != bytes.len() {
        return Err(ModelFormatError::TrailingData(bytes.len() - r.pos));
    }
    Ok(AEModel::from_parts(config, encoder, decoder, header.meta))
}

pub fn save_model(model: &AEModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model_to_bytes(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<AEModel> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(model_from_bytes(&bytes)?)
}
