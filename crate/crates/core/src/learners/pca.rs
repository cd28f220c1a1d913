//! Top principal components by power iteration with deflation.

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::rng::DetRng;

pub const TOL: f64 = 1e-7;
pub const MAX_ITERS: usize = 1000;

/// Components below this fraction of the leading variance count as rank loss.
const RANK_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Pca {
    pub mean: Array1<f64>,
    /// One unit vector per row.
    pub components: Array2<f64>,
    pub explained_variance: Vec<f64>,
    /// `n x components`.
    pub coords: Array2<f64>,
}

impl Pca {
    pub fn len(&self) -> usize {
        self.components.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn orthogonalize(v: &mut Array1<f64>, basis: &[Array1<f64>]) {
    for b in basis {
        let d = v.dot(b);
        v.scaled_add(-d, b);
    }
}

/// Flip so the largest-magnitude entry is positive.
fn fix_sign(v: &mut Array1<f64>) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.mapv_inplace(|x| -x);
    }
}

pub fn pca_project(x: &Array2<f64>, k: usize, seed: u64) -> Result<Pca> {
    let (n, d) = x.dim();
    if n < 2 {
        return Err(Error::InvalidInput("PCA needs at least two rows".into()));
    }
    let mean = x.mean_axis(Axis(0)).expect("n >= 2");
    let xc = x - &mean;
    if k > d {
        log::warn!("requested {k} components from {d}-dimensional data");
    }
    let mut rng = DetRng::new(seed);
    let mut basis: Vec<Array1<f64>> = Vec::new();
    let mut variances = Vec::new();

    for j in 0..k.min(d) {
        let mut v: Array1<f64> = (0..d).map(|_| rng.normal()).collect();
        orthogonalize(&mut v, &basis);
        let norm = v.dot(&v).sqrt();
        if norm == 0.0 {
            break;
        }
        v /= norm;
        let mut lambda = 0.0;
        let mut converged = false;
        for _ in 0..MAX_ITERS {
            let mut w = xc.t().dot(&xc.dot(&v));
            orthogonalize(&mut w, &basis);
            let norm = w.dot(&w).sqrt();
            lambda = norm;
            if norm == 0.0 {
                break;
            }
            w /= norm;
            let diff = (&w - &v).mapv(|t| t * t).sum().sqrt();
            v = w;
            if diff < TOL {
                converged = true;
                break;
            }
        }
        let var = lambda / (n - 1) as f64;
        let lead = variances.first().copied().unwrap_or(var);
        if lambda == 0.0 || var <= lead * RANK_EPS {
            log::warn!("data has rank {j} < {k}; returning {j} components");
            break;
        }
        if !converged {
            log::warn!("component {} did not converge in {MAX_ITERS} iterations", j + 1);
        }
        fix_sign(&mut v);
        // re-orthogonalize against rounding drift
        orthogonalize(&mut v, &basis);
        let norm = v.dot(&v).sqrt();
        v /= norm;
        variances.push(xc.dot(&v).mapv(|t| t * t).sum() / (n - 1) as f64);
        basis.push(v);
    }

    let mut components = Array2::zeros((basis.len(), d));
    for (i, b) in basis.iter().enumerate() {
        components.row_mut(i).assign(b);
    }
    let coords = xc.dot(&components.t());
    Ok(Pca {
        mean,
        components,
        explained_variance: variances,
        coords,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_on_a_line_have_one_component() {
        let dir = [1.0, -2.0, 0.5];
        let x = Array2::from_shape_fn((12, 3), |(i, j)| 3.0 + (i as f64 - 4.0) * dir[j]);
        let pca = pca_project(&x, 2, 42).unwrap();
        assert_eq!(pca.len(), 1);
        let pc1 = pca.components.row(0);
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let cos = pc1.iter().zip(dir).map(|(a, b)| a * b).sum::<f64>() / norm;
        assert!((cos.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn components_are_orthonormal_and_ordered() {
        let mut rng = DetRng::new(9);
        let x = Array2::from_shape_fn((50, 6), |(_, j)| rng.normal() * (6 - j) as f64);
        let pca = pca_project(&x, 3, 42).unwrap();
        assert_eq!(pca.len(), 3);
        for a in 0..3 {
            for b in 0..3 {
                let dot = pca.components.row(a).dot(&pca.components.row(b));
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-8);
            }
        }
        assert!(pca.explained_variance.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn single_row_is_rejected() {
        assert!(pca_project(&Array2::zeros((1, 3)), 2, 42).is_err());
    }
}
