//! Random-projection text vectors, used when no neural embedder is
//! available. Tokens are hashed into a sparse count vector, weighted by
//! `1 + ln(tf)`, L2-normalized, and multiplied by a seeded Gaussian matrix.

use std::collections::HashMap;

use super::EmbeddingMatrix;
use crate::corpus::{scrub_phones, AdRecord};
use crate::error::Result;
use crate::lexicon::is_cjk;
use crate::rng::DetRng;

const BUCKETS: u64 = 1 << 16;

/// Lowercased word tokens; each CJK character is its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for c in text.chars().flat_map(char::to_lowercase) {
        if is_cjk(c) {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
            tokens.push(c.to_string());
        } else if c.is_alphanumeric() || c == '<' || c == '>' {
            word.push(c);
        } else if !word.is_empty() {
            tokens.push(std::mem::take(&mut word));
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Debug)]
pub struct PseudoEmbedder {
    dim: usize,
    seed: u64,
    rows: HashMap<u64, Vec<f64>>,
}

impl PseudoEmbedder {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self {
            dim,
            seed,
            rows: HashMap::new(),
        }
    }

    fn projection_row(&mut self, bucket: u64) -> &[f64] {
        let (dim, seed) = (self.dim, self.seed);
        self.rows.entry(bucket).or_insert_with(|| {
            let mut rng = DetRng::derive(seed, bucket);
            let scale = 1.0 / (dim as f64).sqrt();
            (0..dim).map(|_| rng.normal() * scale).collect()
        })
    }

    pub fn embed_text(&mut self, text: &str) -> Vec<f32> {
        let mut counts: HashMap<u64, u32> = HashMap::new();
        for tok in tokenize(text) {
            *counts.entry(fnv1a(tok.as_bytes()) % BUCKETS).or_default() += 1;
        }
        let mut weighted: Vec<(u64, f64)> = counts
            .into_iter()
            .map(|(b, c)| (b, 1.0 + (c as f64).ln()))
            .collect();
        weighted.sort_by_key(|(b, _)| *b);
        let norm = weighted.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        let mut out = vec![0.0f64; self.dim];
        if norm > 0.0 {
            for (bucket, w) in weighted {
                let row = self.projection_row(bucket).to_vec();
                for (o, r) in out.iter_mut().zip(row) {
                    *o += w / norm * r;
                }
            }
        }
        out.into_iter().map(|v| v as f32).collect()
    }
}

/// Embed the phone-scrubbed title and body of each record.
pub fn pseudo_embed(records: &[AdRecord], dim: usize, seed: u64) -> Result<EmbeddingMatrix> {
    let mut embedder = PseudoEmbedder::new(dim, seed);
    let mut data = Vec::with_capacity(records.len() * dim);
    for r in records {
        data.extend(embedder.embed_text(&scrub_phones(r).full_text()));
    }
    EmbeddingMatrix::new(records.iter().map(|r| r.id.0).collect(), dim, data)
}
