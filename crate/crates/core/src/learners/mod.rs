//! Native classifiers, their model files, and the prediction-file schema
//! shared with external baselines.

pub mod ffnn;
pub mod gbt;
pub mod logreg;
pub mod pca;

use std::path::Path;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

pub use ffnn::{train_ffnn, Dense, FfnnConfig, FfnnModel, FitReport};
pub use gbt::{fit_gbt, train_gbt, GbtGrid, GbtModel, GbtParams, GbtSearch, Validation};
pub use logreg::{train_logreg, LogRegConfig, LogRegModel};
pub use pca::{pca_project, Pca};

use crate::error::{Error, Result};
use crate::io::{read_json, read_jsonl, write_json, write_jsonl};
use crate::labelnet::RiskClass;

pub const THRESHOLD: f64 = 0.5;

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
pub fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub(crate) fn check_binary(rows: usize, y: &[u8]) -> Result<()> {
    if rows != y.len() {
        return Err(Error::InvalidInput(format!(
            "{rows} feature rows but {} targets",
            y.len()
        )));
    }
    if let Some(bad) = y.iter().find(|&&t| t > 1) {
        return Err(Error::InvalidInput(format!("target {bad} is not 0 or 1")));
    }
    let pos = y.iter().filter(|&&t| t == 1).count();
    if y.len() < 2 || pos == 0 || pos == y.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Risky only when the score is strictly above 0.5.
pub fn label_for(score: f64) -> RiskClass {
    if score > THRESHOLD {
        RiskClass::Risky
    } else {
        RiskClass::Safe
    }
}

/// One line of a prediction file. External baselines that only emit labels
/// leave `score` out; an abstaining model writes `"label": null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    pub label: Option<RiskClass>,
    pub model_name: String,
}

pub fn write_predictions(path: &Path, rows: &[Prediction]) -> Result<()> {
    write_jsonl(path, rows)
}

pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>> {
    let rows: Vec<Prediction> = read_jsonl(path)?;
    for (i, p) in rows.iter().enumerate() {
        if let Some(s) = p.score {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::schema(
                    format!("{}:{}", path.display(), i + 1),
                    format!("score {s} outside [0, 1]"),
                ));
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    LogReg(LogRegModel),
    Ffnn(FfnnModel),
    Gbt(GbtModel),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::LogReg(_) => "logreg",
            Model::Ffnn(_) => "ffnn",
            Model::Gbt(_) => "gbt",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::LogReg(m) => m.dim(),
            Model::Ffnn(m) => m.dim(),
            Model::Gbt(m) => m.dim,
        }
    }

    pub fn scores(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: x.ncols(),
            });
        }
        Ok(match self {
            Model::LogReg(m) => m.scores(x),
            Model::Ffnn(m) => m.scores(x),
            Model::Gbt(m) => m.scores(x),
        })
    }
}

pub fn predict<I: ToString>(
    model: &Model,
    ids: &[I],
    x: ArrayView2<f64>,
    model_name: &str,
) -> Result<Vec<Prediction>> {
    if ids.len() != x.nrows() {
        return Err(Error::InvalidInput(format!(
            "{} ids for {} rows",
            ids.len(),
            x.nrows()
        )));
    }
    let scores = model.scores(x)?;
    Ok(ids
        .iter()
        .zip(scores)
        .map(|(id, s)| Prediction {
            id: id.to_string(),
            score: Some(s),
            label: Some(label_for(s)),
            model_name: model_name.to_string(),
        })
        .collect())
}

pub const MODEL_FORMAT: &str = "adrisk-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    body: ModelBody,
}

#[derive(Serialize, Deserialize)]
struct LayerBlob {
    inputs: usize,
    outputs: usize,
    w: String,
    b: String,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ModelBody {
    LogReg {
        dim: usize,
        c: f64,
        bias: f64,
        weights: String,
    },
    Ffnn {
        sizes: Vec<usize>,
        dropout: f64,
        layers: Vec<LayerBlob>,
    },
    Gbt(GbtModel),
}

/// Little-endian f64 values, base64 encoded.
pub fn encode_f64s<'a>(values: impl IntoIterator<Item = &'a f64>) -> String {
    let bytes: Vec<u8> = values.into_iter().flat_map(|v| v.to_le_bytes()).collect();
    B64.encode(bytes)
}

pub fn decode_f64s(blob: &str, expected: usize) -> Result<Vec<f64>> {
    let bytes = B64
        .decode(blob)
        .map_err(|e| Error::schema("model weights", e.to_string()))?;
    if bytes.len() != expected * 8 {
        return Err(Error::schema(
            "model weights",
            format!("expected {} values, blob holds {} bytes", expected, bytes.len()),
        ));
    }
    let vals: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::schema("model weights", "non-finite parameter"));
    }
    Ok(vals)
}

pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    let body = match model {
        Model::LogReg(m) => ModelBody::LogReg {
            dim: m.dim(),
            c: m.c,
            bias: m.bias,
            weights: encode_f64s(m.weights.iter()),
        },
        Model::Ffnn(m) => ModelBody::Ffnn {
            sizes: m.sizes(),
            dropout: m.dropout,
            layers: m
                .layers
                .iter()
                .map(|l| LayerBlob {
                    inputs: l.w.nrows(),
                    outputs: l.w.ncols(),
                    w: encode_f64s(l.w.iter()),
                    b: encode_f64s(l.b.iter()),
                })
                .collect(),
        },
        Model::Gbt(m) => ModelBody::Gbt(m.clone()),
    };
    write_json(
        path,
        &ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            body,
        },
    )
}

pub fn load_model(path: &Path) -> Result<Model> {
    let file: ModelFile = read_json(path)?;
    let ctx = path.display().to_string();
    if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
        return Err(Error::schema(
            ctx,
            format!("unsupported model file {} v{}", file.format, file.version),
        ));
    }
    Ok(match file.body {
        ModelBody::LogReg {
            dim,
            c,
            bias,
            weights,
        } => Model::LogReg(LogRegModel {
            weights: Array1::from(decode_f64s(&weights, dim)?),
            bias,
            c,
        }),
        ModelBody::Ffnn {
            sizes,
            dropout,
            layers,
        } => {
            if layers.len() + 1 != sizes.len() {
                return Err(Error::schema(ctx, "layer count does not match sizes"));
            }
            let mut out = Vec::with_capacity(layers.len());
            for (i, l) in layers.into_iter().enumerate() {
                if l.inputs != sizes[i] || l.outputs != sizes[i + 1] {
                    return Err(Error::schema(ctx, format!("layer {i} shape mismatch")));
                }
                let w = decode_f64s(&l.w, l.inputs * l.outputs)?;
                out.push(Dense {
                    w: Array2::from_shape_vec((l.inputs, l.outputs), w)
                        .map_err(|e| Error::schema(ctx.clone(), e.to_string()))?,
                    b: Array1::from(decode_f64s(&l.b, l.outputs)?),
                });
            }
            Model::Ffnn(FfnnModel {
                layers: out,
                dropout,
            })
        }
        ModelBody::Gbt(m) => {
            for tree in &m.trees {
                for node in &tree.nodes {
                    if let gbt::Node::Split { feature, left, right, .. } = node {
                        if *feature >= m.dim || *left >= tree.nodes.len() || *right >= tree.nodes.len() {
                            return Err(Error::schema(ctx, "tree node out of range"));
                        }
                    }
                }
            }
            Model::Gbt(m)
        }
    })
}
