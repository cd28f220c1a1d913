use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{check_binary, sigmoid, softplus};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogRegConfig {
    /// Inverse L2 strength.
    pub c: f64,
    /// Maximum gradient steps.
    pub epochs: usize,
    /// Initial step for the backtracking search.
    pub lr: f64,
    /// Stop once the gradient norm falls below this.
    pub tol: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 500,
            lr: 1.0,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    pub weights: Array1<f64>,
    pub bias: f64,
    pub c: f64,
}

impl LogRegModel {
    pub fn zeros(dim: usize, c: f64) -> Self {
        Self {
            weights: Array1::zeros(dim),
            bias: 0.0,
            c,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn scores(&self, x: ArrayView2<f64>) -> Vec<f64> {
        x.dot(&self.weights)
            .iter()
            .map(|z| sigmoid(z + self.bias))
            .collect()
    }
}

/// Mean logistic loss plus `|w|^2 / (2 C n)`; the bias is not penalized.
pub fn objective(w: ArrayView1<f64>, b: f64, x: ArrayView2<f64>, y: &[u8], c: f64) -> f64 {
    let n = y.len() as f64;
    let z = x.dot(&w);
    let data: f64 = z
        .iter()
        .zip(y)
        .map(|(z, &t)| softplus(z + b) - t as f64 * (z + b))
        .sum::<f64>()
        / n;
    data + w.dot(&w) / (2.0 * c * n)
}

/// Mean logistic loss alone.
pub fn data_loss(model: &LogRegModel, x: ArrayView2<f64>, y: &[u8]) -> f64 {
    objective(model.weights.view(), model.bias, x, y, f64::INFINITY)
}

pub fn gradient(
    w: ArrayView1<f64>,
    b: f64,
    x: ArrayView2<f64>,
    y: &[u8],
    c: f64,
) -> (Array1<f64>, f64) {
    let n = y.len() as f64;
    let z = x.dot(&w);
    let resid: Array1<f64> = z
        .iter()
        .zip(y)
        .map(|(z, &t)| (sigmoid(z + b) - t as f64) / n)
        .collect();
    let gw = x.t().dot(&resid) + &w.mapv(|v| v / (c * n));
    (gw, resid.sum())
}

/// Full-batch gradient descent with Armijo backtracking. Returns the model
/// and the objective after each accepted step (first entry: initial value).
pub fn train_logreg(
    x: &Array2<f64>,
    y: &[u8],
    cfg: &LogRegConfig,
) -> Result<(LogRegModel, Vec<f64>)> {
    check_binary(x.nrows(), y)?;
    let mut w = Array1::<f64>::zeros(x.ncols());
    let mut b = 0.0;
    let mut loss = objective(w.view(), b, x.view(), y, cfg.c);
    let mut history = vec![loss];
    let mut step = cfg.lr;
    for _ in 0..cfg.epochs {
        let (gw, gb) = gradient(w.view(), b, x.view(), y, cfg.c);
        let gnorm2 = gw.dot(&gw) + gb * gb;
        if gnorm2.sqrt() < cfg.tol {
            break;
        }
        let mut accepted = None;
        while step > 1e-16 {
            let w_try = &w - &(&gw * step);
            let b_try = b - step * gb;
            let l_try = objective(w_try.view(), b_try, x.view(), y, cfg.c);
            if l_try <= loss - 0.5 * step * gnorm2 {
                accepted = Some((w_try, b_try, l_try));
                break;
            }
            step *= 0.5;
        }
        let Some((w_new, b_new, l_new)) = accepted else {
            break;
        };
        w = w_new;
        b = b_new;
        loss = l_new;
        history.push(loss);
        // let the step grow back after easy iterations
        step = (step * 2.0).min(cfg.lr.max(step));
    }
    Ok((
        LogRegModel {
            weights: w,
            bias: b,
            c: cfg.c,
        },
        history,
    ))
}
