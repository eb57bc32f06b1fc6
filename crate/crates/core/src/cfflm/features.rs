use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest feature dimension `Π K_m` a map may produce.
pub const MAX_FEATURES: usize = 10_000_000;

/// Tensor-product Fourier features.
///
/// Variable `m` contributes `(1, √2 cos x, √2 sin x, …, √2 cos d x, √2 sin d x)`
/// with `d = degrees[m]`; the full map is the row-major tensor product with
/// variable 1 most significant. A map may be truncated to its leading `dim`
/// features.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMap {
    degrees: Vec<usize>,
    dim: usize,
}

impl FeatureMap {
    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::arg("a feature map needs at least one variable"));
        }
        let full = degrees
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(2 * d + 1))
            .filter(|&n| n <= MAX_FEATURES)
            .ok_or_else(|| Error::capacity(format!("feature dimension exceeds {MAX_FEATURES}")))?;
        Ok(Self { degrees, dim: full })
    }

    /// `m` variables sharing Fourier degree `d_f`.
    pub fn uniform(m: usize, d_f: usize) -> Result<Self> {
        Self::new(vec![d_f; m])
    }

    /// Keeps only the leading `dim` features.
    pub fn truncated(mut self, dim: usize) -> Result<Self> {
        if dim == 0 || dim > self.full_dim() {
            return Err(Error::arg(format!(
                "truncation to {dim} features outside 1..={}",
                self.full_dim()
            )));
        }
        self.dim = dim;
        Ok(self)
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn n_vars(&self) -> usize {
        self.degrees.len()
    }

    /// Number of features produced.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Untruncated dimension `Π (2 d_m + 1)`.
    pub fn full_dim(&self) -> usize {
        self.degrees.iter().map(|&d| 2 * d + 1).product()
    }

    pub fn is_truncated(&self) -> bool {
        self.dim < self.full_dim()
    }

    /// Univariate column of one variable.
    fn column<T: Real>(d: usize, x: T) -> Vec<T> {
        let s2 = T::SQRT_2();
        let mut col = Vec::with_capacity(2 * d + 1);
        col.push(T::one());
        for j in 1..=d {
            let (s, c) = (T::from_usize_lossy(j) * x).sin_cos();
            col.push(s2 * c);
            col.push(s2 * s);
        }
        col
    }

    pub fn features<T: Real>(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n_vars() {
            return Err(Error::arg(format!(
                "x has length {}, feature map has {} variables",
                x.len(),
                self.n_vars()
            )));
        }
        let mut out = vec![T::one()];
        for (&d, &xm) in self.degrees.iter().zip(x) {
            let col = Self::column(d, xm);
            out = out
                .iter()
                .flat_map(|&a| col.iter().map(move |&b| a * b))
                .collect();
        }
        out.truncate(self.dim);
        Ok(out)
    }

    /// Features of many points, in input order.
    pub fn features_batch<T: Real>(&self, xs: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        xs.par_iter().map(|x| self.features(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{seeded, uniform_angle};
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    #[test]
    fn univariate_examples() {
        let fm = FeatureMap::uniform(1, 1).unwrap();
        let phi = fm.features(&[0.0f64]).unwrap();
        assert_eq!(phi, vec![1.0, SQRT_2, 0.0]);
        let phi = fm.features(&[FRAC_PI_2]).unwrap();
        assert!((phi[0] - 1.0).abs() < 1e-15);
        assert!(phi[1].abs() < 1e-15);
        assert!((phi[2] - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn squared_norm_is_dimension() {
        let mut rng = seeded(12);
        for degrees in [vec![4], vec![2, 3], vec![1, 1, 2]] {
            let fm = FeatureMap::new(degrees).unwrap();
            for _ in 0..100 {
                let x: Vec<f64> = (0..fm.n_vars()).map(|_| uniform_angle(&mut rng)).collect();
                let phi = fm.features(&x).unwrap();
                let n2: f64 = phi.iter().map(|v| v * v).sum();
                assert!((n2 - fm.full_dim() as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn tensor_order_is_row_major() {
        let fm = FeatureMap::uniform(2, 1).unwrap();
        let (a, b) = (0.3f64, -1.2f64);
        let phi = fm.features(&[a, b]).unwrap();
        // Index 1 is (const of x1) x (cos of x2); index 3 is (cos x1) x const.
        assert!((phi[1] - SQRT_2 * b.cos()).abs() < 1e-15);
        assert!((phi[3] - SQRT_2 * a.cos()).abs() < 1e-15);
        assert!((phi[4] - 2.0 * a.cos() * b.cos()).abs() < 1e-15);
    }

    #[test]
    fn truncation_keeps_leading_features() {
        let fm = FeatureMap::uniform(1, 40).unwrap().truncated(64).unwrap();
        assert_eq!(fm.full_dim(), 81);
        let phi = fm.features(&[0.7f64]).unwrap();
        assert_eq!(phi.len(), 64);
        // Feature 63 is cos 32x.
        assert!((phi[63] - SQRT_2 * (32.0f64 * 0.7).cos()).abs() < 1e-12);
        assert!(FeatureMap::uniform(1, 1).unwrap().truncated(4).is_err());
    }
}
