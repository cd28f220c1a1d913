//! EMB1 embedding files and their alignment with labels.
//!
//! Layout: an ASCII header line `EMB1 <count> <dim>\n`, then `count` records
//! of an 8-byte little-endian id followed by `dim` little-endian IEEE-754
//! binary32 values.

mod pseudo;

use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::corpus::AdId;
use crate::error::{Error, Result};
use crate::labelnet::RiskClass;

pub use pseudo::{pseudo_embed, tokenize, PseudoEmbedder};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    ids: Vec<u64>,
    dim: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(ids: Vec<u64>, dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmbHeader("dim must be positive".into()));
        }
        if data.len() != ids.len() * dim {
            return Err(Error::InvalidInput(format!(
                "{} values for {} rows of dim {dim}",
                data.len(),
                ids.len()
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for &id in &ids {
            if !seen.insert(id) {
                return Err(Error::EmbDuplicateId(id));
            }
        }
        for (row, chunk) in data.chunks(dim).enumerate() {
            if chunk.iter().any(|v| !v.is_finite()) {
                return Err(Error::EmbNonFinite { row, id: ids[row] });
            }
        }
        Ok(Self { ids, dim, data })
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = format!("EMB1 {} {}\n", self.ids.len(), self.dim);
        let mut out = Vec::with_capacity(header.len() + self.ids.len() * (8 + 4 * self.dim));
        out.extend_from_slice(header.as_bytes());
        for (i, id) in self.ids.iter().enumerate() {
            out.extend_from_slice(&id.to_le_bytes());
            for v in self.row(i) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let newline = bytes
            .iter()
            .take(64)
            .position(|b| *b == b'\n')
            .ok_or_else(|| Error::EmbHeader("missing header line".into()))?;
        let header = std::str::from_utf8(&bytes[..newline])
            .map_err(|_| Error::EmbHeader("header is not ASCII".into()))?;
        let fields: Vec<&str> = header.split(' ').collect();
        if fields.len() != 3 || fields[0] != "EMB1" {
            return Err(Error::EmbHeader(format!("bad header `{header}`")));
        }
        let count: usize = fields[1]
            .parse()
            .map_err(|_| Error::EmbHeader(format!("bad count `{}`", fields[1])))?;
        let dim: usize = fields[2]
            .parse()
            .map_err(|_| Error::EmbHeader(format!("bad dim `{}`", fields[2])))?;
        if dim == 0 {
            return Err(Error::EmbHeader("dim must be positive".into()));
        }
        let record = 8 + 4 * dim;
        let payload = &bytes[newline + 1..];
        let expected = count
            .checked_mul(record)
            .ok_or_else(|| Error::EmbHeader("size overflow".into()))?;
        if payload.len() < expected {
            return Err(Error::EmbTruncated {
                expected,
                found: payload.len(),
            });
        }
        if payload.len() > expected {
            return Err(Error::EmbHeader(format!(
                "{} trailing bytes after {count} records",
                payload.len() - expected
            )));
        }
        let mut ids = Vec::with_capacity(count);
        let mut data = Vec::with_capacity(count * dim);
        for rec in payload.chunks_exact(record) {
            ids.push(u64::from_le_bytes(rec[..8].try_into().expect("8 bytes")));
            data.extend(
                rec[8..]
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))),
            );
        }
        Self::new(ids, dim, data)
    }
}

pub fn write_emb1(matrix: &EmbeddingMatrix, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&matrix.to_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn read_emb1(path: &Path) -> Result<EmbeddingMatrix> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    EmbeddingMatrix::from_bytes(&bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingPolicy {
    Strict,
    /// Drop labeled ids that have no embedding row, counting them.
    Drop,
}

#[derive(Debug, Clone)]
pub struct Joined {
    pub ids: Vec<AdId>,
    pub x: Array2<f64>,
    pub y: Vec<u8>,
    pub missing: Vec<AdId>,
}

/// Rows of `matrix` in label order, with targets 0 = Safe, 1 = Risky.
pub fn join(
    matrix: &EmbeddingMatrix,
    labels: &[(AdId, RiskClass)],
    policy: MissingPolicy,
) -> Result<Joined> {
    let index: HashMap<u64, usize> = matrix
        .ids
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, i))
        .collect();
    let mut rows = Vec::with_capacity(labels.len());
    let mut missing = Vec::new();
    for (id, class) in labels {
        match index.get(&id.0) {
            Some(&row) => rows.push((*id, row, *class)),
            None if policy == MissingPolicy::Strict => {
                return Err(Error::MissingEmbedding(id.to_string()))
            }
            None => missing.push(*id),
        }
    }
    if !missing.is_empty() {
        log::warn!("{} labeled ids have no embedding and were dropped", missing.len());
    }
    let dim = matrix.dim;
    let mut x = Array2::<f64>::zeros((rows.len(), dim));
    for (r, (_, row, _)) in rows.iter().enumerate() {
        for (c, v) in matrix.row(*row).iter().enumerate() {
            x[[r, c]] = *v as f64;
        }
    }
    Ok(Joined {
        ids: rows.iter().map(|r| r.0).collect(),
        y: rows.iter().map(|r| r.2.as_target()).collect(),
        x,
        missing,
    })
}
