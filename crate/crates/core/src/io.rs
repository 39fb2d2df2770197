//! Tensor-container file format shared by dataset shards, checkpoints and
//! trajectory dumps.
//!
//! Layout on disk:
//!
//! ```text
//! [8-byte magic][u32 LE format version][u64 LE manifest length]
//! [manifest JSON][raw little-endian tensor blob]
//! ```
//!
//! The manifest holds an arbitrary JSON header plus a table mapping tensor
//! names to dtype, shape and byte offset into the blob. Writing the same
//! logical content twice produces byte-identical files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

pub const MAGIC_DATASET: &[u8; 8] = b"INRFDSET";
pub const MAGIC_CHECKPOINT: &[u8; 8] = b"INRFCKPT";
pub const MAGIC_TRAJECTORY: &[u8; 8] = b"INRFTRAJ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    F32,
    F64,
    I64,
}

impl Dtype {
    pub fn byte_width(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
            Dtype::I64 => 8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    pub dtype: Dtype,
    pub shape: Vec<usize>,
    pub offset: u64,
    pub byte_len: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    header: serde_json::Value,
    tensors: Vec<TensorEntry>,
}

/// An in-memory tensor container, ready to be written or just read.
#[derive(Debug)]
pub struct BlobFile {
    pub magic: [u8; 8],
    pub header: serde_json::Value,
    tensors: Vec<TensorEntry>,
    blob: Vec<u8>,
}

impl BlobFile {
    pub fn new(magic: &[u8; 8], header: serde_json::Value) -> Self {
        BlobFile {
            magic: *magic,
            header,
            tensors: Vec::new(),
            blob: Vec::new(),
        }
    }

    pub fn tensor_names(&self) -> impl Iterator<Item = &str> {
        self.tensors.iter().map(|t| t.name.as_str())
    }

    pub fn entry(&self, name: &str) -> Option<&TensorEntry> {
        self.tensors.iter().find(|t| t.name == name)
    }

    fn push_raw(&mut self, name: &str, dtype: Dtype, shape: &[usize], bytes: Vec<u8>) {
        let entry = TensorEntry {
            name: name.to_string(),
            dtype,
            shape: shape.to_vec(),
            offset: self.blob.len() as u64,
            byte_len: bytes.len() as u64,
        };
        self.blob.extend_from_slice(&bytes);
        self.tensors.push(entry);
    }

    pub fn push_f32(&mut self, name: &str, shape: &[usize], data: &[f32]) {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        let mut bytes = Vec::with_capacity(data.len() * 4);
        for v in data {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        self.push_raw(name, Dtype::F32, shape, bytes);
    }

    pub fn push_f64(&mut self, name: &str, shape: &[usize], data: &[f64]) {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        let mut bytes = Vec::with_capacity(data.len() * 8);
        for v in data {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        self.push_raw(name, Dtype::F64, shape, bytes);
    }

    pub fn push_i64(&mut self, name: &str, shape: &[usize], data: &[i64]) {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        let mut bytes = Vec::with_capacity(data.len() * 8);
        for v in data {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        self.push_raw(name, Dtype::I64, shape, bytes);
    }

    fn raw_slice(&self, entry: &TensorEntry) -> Result<&[u8]> {
        let start = entry.offset as usize;
        let end = start + entry.byte_len as usize;
        self.blob.get(start..end).ok_or_else(|| {
            Error::format(entry.offset, format!("tensor `{}` overruns blob", entry.name))
        })
    }

    pub fn get_f32(&self, name: &str) -> Result<(Vec<usize>, Vec<f32>)> {
        let entry = self.require(name, Dtype::F32)?;
        let bytes = self.raw_slice(&entry)?;
        let data = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok((entry.shape, data))
    }

    pub fn get_f64(&self, name: &str) -> Result<(Vec<usize>, Vec<f64>)> {
        let entry = self.require(name, Dtype::F64)?;
        let bytes = self.raw_slice(&entry)?;
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes([c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]]))
            .collect();
        Ok((entry.shape, data))
    }

    pub fn get_i64(&self, name: &str) -> Result<(Vec<usize>, Vec<i64>)> {
        let entry = self.require(name, Dtype::I64)?;
        let bytes = self.raw_slice(&entry)?;
        let data = bytes
            .chunks_exact(8)
            .map(|c| i64::from_le_bytes([c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]]))
            .collect();
        Ok((entry.shape, data))
    }

    fn require(&self, name: &str, dtype: Dtype) -> Result<TensorEntry> {
        let entry = self
            .entry(name)
            .ok_or_else(|| Error::data(format!("tensor `{name}` missing from container")))?;
        if entry.dtype != dtype {
            return Err(Error::data(format!(
                "tensor `{name}` has dtype {:?}, expected {:?}",
                entry.dtype, dtype
            )));
        }
        Ok(entry.clone())
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let manifest = Manifest {
            header: self.header.clone(),
            tensors: self.tensors.clone(),
        };
        let manifest_bytes =
            serde_json::to_vec(&manifest).map_err(|e| Error::data(format!("manifest: {e}")))?;
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&self.magic)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(manifest_bytes.len() as u64).to_le_bytes())?;
        w.write_all(&manifest_bytes)?;
        w.write_all(&self.blob)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from(path: &Path, expected_magic: &[u8; 8]) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|_| Error::format(0, "file shorter than magic header"))?;
        if &magic != expected_magic {
            return Err(Error::format(
                0,
                format!(
                    "bad magic {:?}, expected {:?}",
                    String::from_utf8_lossy(&magic),
                    String::from_utf8_lossy(expected_magic)
                ),
            ));
        }
        let mut buf4 = [0u8; 4];
        r.read_exact(&mut buf4)
            .map_err(|_| Error::format(8, "missing format version"))?;
        let version = u32::from_le_bytes(buf4);
        if version != FORMAT_VERSION {
            return Err(Error::format(
                8,
                format!("unsupported container version {version}"),
            ));
        }
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)
            .map_err(|_| Error::format(12, "missing manifest length"))?;
        let manifest_len = u64::from_le_bytes(buf8) as usize;
        let mut manifest_bytes = vec![0u8; manifest_len];
        r.read_exact(&mut manifest_bytes)
            .map_err(|_| Error::format(20, "truncated manifest"))?;
        let manifest: Manifest = serde_json::from_slice(&manifest_bytes)
            .map_err(|e| Error::format(20, format!("manifest parse: {e}")))?;
        let mut blob = Vec::new();
        r.read_to_end(&mut blob)?;
        for t in &manifest.tensors {
            let end = t.offset + t.byte_len;
            if end as usize > blob.len() {
                return Err(Error::format(
                    20 + manifest_len as u64 + t.offset,
                    format!("tensor `{}` truncated", t.name),
                ));
            }
        }
        Ok(BlobFile {
            magic,
            header: manifest.header,
            tensors: manifest.tensors,
            blob,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.bin");
        let p2 = dir.path().join("b.bin");

        let mut f = BlobFile::new(MAGIC_DATASET, serde_json::json!({"k": 1}));
        f.push_f32("x", &[2, 2], &[1.0, 2.0, 3.0, -4.5]);
        f.push_i64("ids", &[3], &[7, -1, 9]);
        f.write_to(&p1).unwrap();

        let g = BlobFile::read_from(&p1, MAGIC_DATASET).unwrap();
        g.write_to(&p2).unwrap();

        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        let (shape, data) = g.get_f32("x").unwrap();
        assert_eq!(shape, vec![2, 2]);
        assert_eq!(data, vec![1.0, 2.0, 3.0, -4.5]);
    }

    #[test]
    fn wrong_magic_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.bin");
        let f = BlobFile::new(MAGIC_DATASET, serde_json::Value::Null);
        f.write_to(&p).unwrap();
        let err = BlobFile::read_from(&p, MAGIC_CHECKPOINT).unwrap_err();
        assert!(matches!(err, Error::Format { offset: 0, .. }));
    }
}
