//! Second-order gradient boosting on logistic loss with exact greedy splits.
//!
//! Each round uses `g = p - y` and `h = p(1 - p)`. A split maximizes
//! `½[G_L²/(H_L+λ) + G_R²/(H_R+λ) - G²/(H+λ)] - γ` and a leaf takes the
//! weight `-G/(H+λ)`. Trees grow level by level over columns presorted once
//! per fit, so each level costs one pass over every sampled feature.

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::{check_binary, sigmoid, softplus};
use crate::error::{Error, Result};
use crate::evalkit::{roc_auc, stratified_holdout};
use crate::rng::DetRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub subsample: f64,
    pub colsample: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub min_child_weight: f64,
    pub seed: u64,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self {
            n_trees: 200,
            max_depth: 6,
            learning_rate: 0.1,
            subsample: 1.0,
            colsample: 1.0,
            lambda: 1.0,
            gamma: 0.0,
            min_child_weight: 1.0,
            seed: crate::rng::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        weight: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn eval(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { weight } => return weight,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[feature] < threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub dim: usize,
    pub base_logit: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
    pub params: GbtParams,
}

impl GbtModel {
    pub fn margin(&self, row: &[f64]) -> f64 {
        self.base_logit
            + self
                .trees
                .iter()
                .map(|t| self.learning_rate * t.eval(row))
                .sum::<f64>()
    }

    pub fn scores(&self, x: ArrayView2<f64>) -> Vec<f64> {
        x.axis_iter(Axis(0))
            .map(|row| {
                let row = row.to_vec();
                sigmoid(self.margin(&row))
            })
            .collect()
    }

    /// Model keeping only the first `n` trees.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            trees: self.trees[..n.min(self.trees.len())].to_vec(),
            params: GbtParams {
                n_trees: n,
                ..self.params
            },
            ..self.clone()
        }
    }
}

pub fn logistic_loss(margins: &[f64], y: &[u8]) -> f64 {
    margins
        .iter()
        .zip(y)
        .map(|(m, &t)| softplus(*m) - t as f64 * m)
        .sum::<f64>()
        / y.len() as f64
}

const NO_NODE: usize = usize::MAX;

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

struct Grower<'a> {
    x: ArrayView2<'a, f64>,
    sorted: &'a [Vec<usize>],
    params: &'a GbtParams,
}

impl Grower<'_> {
    fn score(&self, g: f64, h: f64) -> f64 {
        g * g / (h + self.params.lambda)
    }

    fn grow(&self, grad: &[f64], hess: &[f64], in_sample: &[bool], features: &[usize]) -> Tree {
        let n = grad.len();
        let mut nodes: Vec<Node> = vec![Node::Leaf { weight: 0.0 }];
        let mut pos: Vec<usize> = (0..n).map(|i| if in_sample[i] { 0 } else { NO_NODE }).collect();
        let mut open: Vec<usize> = vec![0];
        let lambda = self.params.lambda;

        for _depth in 0..=self.params.max_depth {
            let total = nodes.len();
            let mut g_sum = vec![0.0; total];
            let mut h_sum = vec![0.0; total];
            for i in 0..n {
                if pos[i] != NO_NODE {
                    g_sum[pos[i]] += grad[i];
                    h_sum[pos[i]] += hess[i];
                }
            }
            for &node in &open {
                nodes[node] = Node::Leaf {
                    weight: -g_sum[node] / (h_sum[node] + lambda),
                };
            }
            if _depth == self.params.max_depth {
                break;
            }

            let mut is_open = vec![false; total];
            for &node in &open {
                is_open[node] = true;
            }
            let mut best: Vec<Option<Candidate>> = (0..total).map(|_| None).collect();
            let mut gl = vec![0.0; total];
            let mut hl = vec![0.0; total];
            let mut last_val = vec![f64::NAN; total];
            for &f in features {
                gl.iter_mut().for_each(|v| *v = 0.0);
                hl.iter_mut().for_each(|v| *v = 0.0);
                last_val.iter_mut().for_each(|v| *v = f64::NAN);
                for &i in &self.sorted[f] {
                    let node = pos[i];
                    if node == NO_NODE || !is_open[node] {
                        continue;
                    }
                    let v = self.x[[i, f]];
                    let prev = last_val[node];
                    if !prev.is_nan() && v > prev {
                        let (gr, hr) = (g_sum[node] - gl[node], h_sum[node] - hl[node]);
                        let mcw = self.params.min_child_weight;
                        if hl[node] >= mcw && hr >= mcw {
                            let gain = 0.5
                                * (self.score(gl[node], hl[node]) + self.score(gr, hr)
                                    - self.score(g_sum[node], h_sum[node]))
                                - self.params.gamma;
                            if gain > 1e-12 && best[node].as_ref().is_none_or(|b| gain > b.gain) {
                                best[node] = Some(Candidate {
                                    gain,
                                    feature: f,
                                    threshold: prev + (v - prev) / 2.0,
                                });
                            }
                        }
                    }
                    gl[node] += grad[i];
                    hl[node] += hess[i];
                    last_val[node] = v;
                }
            }

            let mut next_open = Vec::new();
            let mut child_of: Vec<Option<(usize, usize, usize, f64)>> = vec![None; total];
            for &node in &open {
                if let Some(c) = &best[node] {
                    let left = nodes.len();
                    nodes.push(Node::Leaf { weight: 0.0 });
                    nodes.push(Node::Leaf { weight: 0.0 });
                    nodes[node] = Node::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        left,
                        right: left + 1,
                    };
                    child_of[node] = Some((left, left + 1, c.feature, c.threshold));
                    next_open.push(left);
                    next_open.push(left + 1);
                }
            }
            if next_open.is_empty() {
                break;
            }
            for i in 0..n {
                if pos[i] == NO_NODE {
                    continue;
                }
                if let Some((l, r, f, t)) = child_of[pos[i]] {
                    pos[i] = if self.x[[i, f]] < t { l } else { r };
                }
            }
            open = next_open;
        }
        Tree { nodes }
    }
}

fn presort(x: ArrayView2<f64>) -> Vec<Vec<usize>> {
    (0..x.ncols())
        .map(|f| {
            let mut idx: Vec<usize> = (0..x.nrows()).collect();
            idx.sort_by(|&a, &b| x[[a, f]].total_cmp(&x[[b, f]]).then(a.cmp(&b)));
            idx
        })
        .collect()
}

/// Fit one boosted ensemble. With `subsample == colsample == 1` the result is
/// independent of the seed.
pub fn fit_gbt(x: &Array2<f64>, y: &[u8], params: &GbtParams) -> Result<GbtModel> {
    check_binary(x.nrows(), y)?;
    if !(params.subsample > 0.0 && params.subsample <= 1.0)
        || !(params.colsample > 0.0 && params.colsample <= 1.0)
    {
        return Err(Error::InvalidInput("subsample and colsample must be in (0, 1]".into()));
    }
    let n = x.nrows();
    let d = x.ncols();
    let sorted = presort(x.view());
    let grower = Grower {
        x: x.view(),
        sorted: &sorted,
        params,
    };
    let mut rng = DetRng::new(params.seed);
    let mut margins = vec![0.0; n];
    let mut trees = Vec::with_capacity(params.n_trees);
    let n_cols = ((params.colsample * d as f64).round() as usize).clamp(1, d);
    let rows: Vec<Vec<f64>> = x.axis_iter(Axis(0)).map(|r| r.to_vec()).collect();
    for _ in 0..params.n_trees {
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];
        for i in 0..n {
            let p = sigmoid(margins[i]);
            grad[i] = p - y[i] as f64;
            hess[i] = p * (1.0 - p);
        }
        let in_sample: Vec<bool> = if params.subsample < 1.0 {
            (0..n).map(|_| rng.bernoulli(params.subsample)).collect()
        } else {
            vec![true; n]
        };
        let features: Vec<usize> = if n_cols < d {
            let mut all: Vec<usize> = (0..d).collect();
            rng.shuffle(&mut all);
            let mut chosen = all[..n_cols].to_vec();
            chosen.sort_unstable();
            chosen
        } else {
            (0..d).collect()
        };
        let tree = grower.grow(&grad, &hess, &in_sample, &features);
        for (m, row) in margins.iter_mut().zip(&rows) {
            *m += params.learning_rate * tree.eval(row);
        }
        trees.push(tree);
    }
    Ok(GbtModel {
        dim: d,
        base_logit: 0.0,
        learning_rate: params.learning_rate,
        trees,
        params: *params,
    })
}

/// Hyperparameter grid; every combination is one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbtGrid {
    pub n_trees: Vec<usize>,
    pub max_depth: Vec<usize>,
    pub learning_rate: Vec<f64>,
    pub subsample: Vec<f64>,
    pub colsample: Vec<f64>,
}

impl Default for GbtGrid {
    fn default() -> Self {
        Self {
            n_trees: vec![200, 400, 600],
            max_depth: vec![4, 6, 8],
            learning_rate: vec![0.05, 0.1],
            subsample: vec![0.8, 1.0],
            colsample: vec![0.8, 1.0],
        }
    }
}

impl GbtGrid {
    pub fn single(params: &GbtParams) -> Self {
        Self {
            n_trees: vec![params.n_trees],
            max_depth: vec![params.max_depth],
            learning_rate: vec![params.learning_rate],
            subsample: vec![params.subsample],
            colsample: vec![params.colsample],
        }
    }

    pub fn cells(&self, base: &GbtParams) -> Vec<GbtParams> {
        let mut out = Vec::new();
        for &n_trees in &self.n_trees {
            for &max_depth in &self.max_depth {
                for &learning_rate in &self.learning_rate {
                    for &subsample in &self.subsample {
                        for &colsample in &self.colsample {
                            out.push(GbtParams {
                                n_trees,
                                max_depth,
                                learning_rate,
                                subsample,
                                colsample,
                                ..*base
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

pub enum Validation<'a> {
    /// Stratified holdout carved from the training data.
    Holdout { fraction: f64, seed: u64 },
    Explicit { x: &'a Array2<f64>, y: &'a [u8] },
}

#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub params: GbtParams,
    pub val_auc: Option<f64>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GbtSearch {
    pub model: GbtModel,
    pub best: GbtParams,
    pub cells: Vec<CellResult>,
}

/// Rough peak footprint of one fit in bytes.
pub fn estimated_bytes(params: &GbtParams, n: usize, d: usize) -> usize {
    let nodes_per_tree = (1usize << (params.max_depth + 1).min(40)).min(2 * n + 1);
    params.n_trees * nodes_per_tree * std::mem::size_of::<Node>()
        + n * d * (std::mem::size_of::<usize>() + 2 * std::mem::size_of::<f64>())
}

pub const DEFAULT_MEMORY_BUDGET: usize = 4 << 30;

/// Grid search scored by validation ROC-AUC, then a refit of the winning cell
/// on all of `x`. Cells over `memory_budget` are skipped with a warning.
/// Cells differing only in `n_trees` share one fit and are scored on its
/// prefixes.
pub fn train_gbt(
    x: &Array2<f64>,
    y: &[u8],
    grid: &GbtGrid,
    base: &GbtParams,
    validation: Validation<'_>,
    memory_budget: usize,
) -> Result<GbtSearch> {
    check_binary(x.nrows(), y)?;
    let (x_fit, y_fit, x_val, y_val): (Array2<f64>, Vec<u8>, Array2<f64>, Vec<u8>) = match validation {
        Validation::Holdout { fraction, seed } => {
            let (tr, va) = stratified_holdout(y, fraction, seed);
            (
                x.select(Axis(0), &tr),
                tr.iter().map(|&i| y[i]).collect(),
                x.select(Axis(0), &va),
                va.iter().map(|&i| y[i]).collect(),
            )
        }
        Validation::Explicit { x: xv, y: yv } => (x.clone(), y.to_vec(), xv.clone(), yv.to_vec()),
    };

    let cells = grid.cells(base);
    let mut results: Vec<CellResult> = cells
        .iter()
        .map(|p| CellResult {
            params: *p,
            val_auc: None,
            skipped: None,
        })
        .collect();

    for (i, cell) in cells.iter().enumerate() {
        if results[i].val_auc.is_some() || results[i].skipped.is_some() {
            continue;
        }
        let group: Vec<usize> = (0..cells.len())
            .filter(|&j| {
                let c = &cells[j];
                c.max_depth == cell.max_depth
                    && c.learning_rate == cell.learning_rate
                    && c.subsample == cell.subsample
                    && c.colsample == cell.colsample
            })
            .collect();
        let mut runnable = Vec::new();
        for &j in &group {
            let bytes = estimated_bytes(&cells[j], x_fit.nrows(), x_fit.ncols());
            if bytes > memory_budget {
                let msg = format!("estimated {bytes} bytes exceeds budget {memory_budget}");
                log::warn!("skipping grid cell {:?}: {msg}", cells[j]);
                results[j].skipped = Some(msg);
            } else {
                runnable.push(j);
            }
        }
        let Some(max_trees) = runnable.iter().map(|&j| cells[j].n_trees).max() else {
            continue;
        };
        let full = fit_gbt(&x_fit, &y_fit, &GbtParams { n_trees: max_trees, ..*cell })?;
        for &j in &runnable {
            let model = full.truncated(cells[j].n_trees);
            results[j].val_auc = roc_auc(&model.scores(x_val.view()), &y_val);
        }
    }

    let best = results
        .iter()
        .filter_map(|r| r.val_auc.map(|a| (a, r.params)))
        .fold(None::<(f64, GbtParams)>, |acc, (a, p)| match acc {
            Some((b, _)) if b >= a => acc,
            _ => Some((a, p)),
        })
        .map(|(_, p)| p)
        .ok_or_else(|| Error::InvalidInput("no grid cell could be evaluated".into()))?;
    let model = fit_gbt(x, y, &best)?;
    Ok(GbtSearch {
        model,
        best,
        cells: results,
    })
}
