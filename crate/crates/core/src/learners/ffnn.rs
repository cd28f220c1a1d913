//! Feedforward classifier: ReLU hidden layers, inverted dropout while
//! training, single sigmoid output, Adam, early stopping on validation loss.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use serde::{Deserialize, Serialize};

use super::{check_binary, sigmoid, softplus};
use crate::error::{Error, Result};
use crate::evalkit::stratified_holdout;
use crate::rng::DetRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FfnnConfig {
    pub hidden: Vec<usize>,
    pub dropout: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    /// Stratified share held out for early stopping; 0 disables it and the
    /// last epoch's parameters are returned.
    pub validation_fraction: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub seed: u64,
}

impl Default for FfnnConfig {
    fn default() -> Self {
        Self {
            hidden: vec![256, 128],
            dropout: 0.2,
            lr: 1e-3,
            batch_size: 64,
            max_epochs: 20,
            patience: 3,
            validation_fraction: 0.1,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            seed: crate::rng::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    /// `inputs x outputs`
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FfnnModel {
    pub layers: Vec<Dense>,
    pub dropout: f64,
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub best_epoch: usize,
}

impl FfnnModel {
    /// He-uniform weights, zero biases.
    pub fn init(sizes: &[usize], dropout: f64, rng: &mut DetRng) -> Self {
        let layers = sizes
            .windows(2)
            .map(|pair| {
                let (fan_in, fan_out) = (pair[0], pair[1]);
                let bound = (6.0 / fan_in as f64).sqrt();
                let w = Array2::from_shape_simple_fn((fan_in, fan_out), || {
                    (2.0 * rng.unit_f64() - 1.0) * bound
                });
                Dense {
                    w,
                    b: Array1::zeros(fan_out),
                }
            })
            .collect();
        Self { layers, dropout }
    }

    pub fn dim(&self) -> usize {
        self.layers[0].w.nrows()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.dim()];
        s.extend(self.layers.iter().map(|l| l.w.ncols()));
        s
    }

    /// Output logits, no dropout.
    pub fn logits(&self, x: ArrayView2<f64>) -> Array1<f64> {
        let mut a = x.to_owned();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            a = a.dot(&layer.w) + &layer.b;
            if i < last {
                a.mapv_inplace(|v| if v < 0.0 { 0.0 } else { v });
            }
        }
        a.column(0).to_owned()
    }

    pub fn scores(&self, x: ArrayView2<f64>) -> Vec<f64> {
        self.logits(x).iter().map(|z| sigmoid(*z)).collect()
    }

    pub fn loss(&self, x: ArrayView2<f64>, y: &[u8]) -> f64 {
        mean_bce(&self.logits(x), y)
    }

    /// Mean binary cross-entropy and its gradient, without dropout.
    pub fn loss_and_grad(&self, x: ArrayView2<f64>, y: &[u8]) -> (f64, Vec<Dense>) {
        self.backprop(x, y, None)
    }

    fn backprop(
        &self,
        x: ArrayView2<f64>,
        y: &[u8],
        mut dropout_rng: Option<&mut DetRng>,
    ) -> (f64, Vec<Dense>) {
        let n = x.nrows() as f64;
        let last = self.layers.len() - 1;
        // activations[i] is the input to layer i
        let mut activations: Vec<Array2<f64>> = vec![x.to_owned()];
        let mut masks: Vec<Option<Array2<f64>>> = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = activations[i].dot(&layer.w) + &layer.b;
            if i < last {
                z.mapv_inplace(|v| if v < 0.0 { 0.0 } else { v });
                let mask = match dropout_rng.as_deref_mut() {
                    Some(rng) if self.dropout > 0.0 => {
                        let keep = 1.0 - self.dropout;
                        let m = Array2::from_shape_simple_fn(z.raw_dim(), || {
                            if rng.unit_f64() < keep {
                                1.0 / keep
                            } else {
                                0.0
                            }
                        });
                        z *= &m;
                        Some(m)
                    }
                    _ => None,
                };
                masks.push(mask);
            }
            activations.push(z);
        }
        let logits = activations[self.layers.len()].column(0).to_owned();
        let loss = mean_bce(&logits, y);

        let mut delta: Array2<f64> = Array2::zeros((x.nrows(), 1));
        for (r, (z, &t)) in logits.iter().zip(y).enumerate() {
            delta[[r, 0]] = (sigmoid(*z) - t as f64) / n;
        }
        let mut grads: Vec<Dense> = Vec::with_capacity(self.layers.len());
        for i in (0..self.layers.len()).rev() {
            let a_prev = &activations[i];
            grads.push(Dense {
                w: a_prev.t().dot(&delta),
                b: delta.sum_axis(Axis(0)),
            });
            if i > 0 {
                let mut back = delta.dot(&self.layers[i].w.t());
                if let Some(m) = &masks[i - 1] {
                    back *= m;
                }
                // relu derivative: the post-activation is zero where inactive
                Zip::from(&mut back)
                    .and(a_prev)
                    .for_each(|d, &a| {
                        if a <= 0.0 {
                            *d = 0.0
                        }
                    });
                delta = back;
            }
        }
        grads.reverse();
        (loss, grads)
    }
}

fn mean_bce(logits: &Array1<f64>, y: &[u8]) -> f64 {
    logits
        .iter()
        .zip(y)
        .map(|(z, &t)| softplus(*z) - t as f64 * z)
        .sum::<f64>()
        / y.len() as f64
}

struct Adam {
    m: Vec<Dense>,
    v: Vec<Dense>,
    t: i32,
}

impl Adam {
    fn new(model: &FfnnModel) -> Self {
        let zeros = || {
            model
                .layers
                .iter()
                .map(|l| Dense {
                    w: Array2::zeros(l.w.raw_dim()),
                    b: Array1::zeros(l.b.raw_dim()),
                })
                .collect::<Vec<_>>()
        };
        Self {
            m: zeros(),
            v: zeros(),
            t: 0,
        }
    }

    fn step(&mut self, model: &mut FfnnModel, grads: &[Dense], cfg: &FfnnConfig) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        let (b1, b2, lr, eps) = (cfg.beta1, cfg.beta2, cfg.lr, cfg.eps);
        let update = |p: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        };
        for (((layer, g), m), v) in model
            .layers
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            Zip::from(&mut layer.w)
                .and(&mut m.w)
                .and(&mut v.w)
                .and(&g.w)
                .for_each(|p, m, v, &g| update(p, m, v, g));
            Zip::from(&mut layer.b)
                .and(&mut m.b)
                .and(&mut v.b)
                .and(&g.b)
                .for_each(|p, m, v, &g| update(p, m, v, g));
        }
    }
}

fn select_rows(x: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    x.select(Axis(0), rows)
}

pub fn train_ffnn(x: &Array2<f64>, y: &[u8], cfg: &FfnnConfig) -> Result<(FfnnModel, FitReport)> {
    check_binary(x.nrows(), y)?;
    if cfg.batch_size == 0 {
        return Err(Error::InvalidInput("batch_size must be positive".into()));
    }
    let mut rng = DetRng::new(cfg.seed);
    let (train_idx, val_idx) = if cfg.validation_fraction > 0.0 {
        stratified_holdout(y, cfg.validation_fraction, cfg.seed)
    } else {
        ((0..y.len()).collect(), Vec::new())
    };
    let x_val = select_rows(x, &val_idx);
    let y_val: Vec<u8> = val_idx.iter().map(|&i| y[i]).collect();

    let mut sizes = vec![x.ncols()];
    sizes.extend(&cfg.hidden);
    sizes.push(1);
    let mut model = FfnnModel::init(&sizes, cfg.dropout, &mut rng);
    let mut adam = Adam::new(&model);

    let mut order = train_idx.clone();
    let mut report = FitReport {
        train_loss: Vec::new(),
        val_loss: Vec::new(),
        best_epoch: 0,
    };
    let mut best: Option<(f64, FfnnModel)> = None;
    let mut since_best = 0;
    for epoch in 0..cfg.max_epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let xb = select_rows(x, batch);
            let yb: Vec<u8> = batch.iter().map(|&i| y[i]).collect();
            let (loss, grads) = model.backprop(xb.view(), &yb, Some(&mut rng));
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss(epoch + 1));
            }
            epoch_loss += loss * batch.len() as f64;
            adam.step(&mut model, &grads, cfg);
        }
        report.train_loss.push(epoch_loss / order.len() as f64);

        if val_idx.is_empty() {
            report.best_epoch = epoch + 1;
            continue;
        }
        let val = model.loss(x_val.view(), &y_val);
        if !val.is_finite() {
            return Err(Error::NonFiniteLoss(epoch + 1));
        }
        report.val_loss.push(val);
        if best.as_ref().is_none_or(|(b, _)| val < *b) {
            best = Some((val, model.clone()));
            report.best_epoch = epoch + 1;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                break;
            }
        }
    }
    let model = best.map(|(_, m)| m).unwrap_or(model);
    Ok((model, report))
}
