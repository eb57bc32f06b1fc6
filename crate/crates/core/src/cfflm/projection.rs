use rand::Rng;

use super::eigen::symmetric_eigen;
use super::model::Projection;
use crate::error::{Error, Result};
use crate::rng::standard_normal;
use crate::scalar::Real;

/// Constant in the projected-dimension bound `d̃ ≥ C ln|X| / ε̃²`.
pub const JL_CONSTANT: f64 = 8.0;

/// `⌈8 ln n / ε̃²⌉`, the projected dimension that preserves all pairwise
/// distances of `n` points within `1 ± ε̃`.
pub fn jl_dimension(n_points: usize, eps: f64) -> usize {
    if n_points < 2 {
        return 1;
    }
    (JL_CONSTANT * (n_points as f64).ln() / (eps * eps)).ceil() as usize
}

/// A Gaussian random projection and the images of the input features.
#[derive(Clone, Debug)]
pub struct RandomProjection<T> {
    /// `d̃^{-1/2} A` with i.i.d. standard normal `A`.
    pub projection: Projection<T>,
    pub projected: Vec<Vec<T>>,
    /// [`jl_dimension`] for the input set.
    pub recommended_dim: usize,
}

/// Projects `features` to `dim` dimensions with a scaled Gaussian matrix.
/// Logs a warning when `dim` is below [`jl_dimension`].
pub fn random_projection<T: Real, R: Rng + ?Sized>(
    features: &[Vec<T>],
    dim: usize,
    eps: f64,
    rng: &mut R,
) -> Result<RandomProjection<T>> {
    if dim == 0 {
        return Err(Error::arg("projected dimension must be at least 1"));
    }
    if !(eps > 0.0) {
        return Err(Error::arg("distortion ε̃ must be positive"));
    }
    let k = features.first().map_or(0, |v| v.len());
    if k == 0 || features.iter().any(|v| v.len() != k) {
        return Err(Error::arg("features must be non-empty vectors of equal length"));
    }
    let recommended_dim = jl_dimension(features.len(), eps);
    if dim < recommended_dim {
        log::warn!(
            "projected dimension {dim} is below the distance-preserving bound {recommended_dim} \
             for {} points at ε̃ = {eps}",
            features.len()
        );
    }
    let scale = T::one() / T::from_usize_lossy(dim).sqrt();
    let data = (0..dim * k).map(|_| standard_normal::<T, _>(rng) * scale).collect();
    let projection = Projection::new(dim, k, data)?;
    let projected = features.iter().map(|v| projection.apply(v)).collect();
    Ok(RandomProjection { projection, projected, recommended_dim })
}

/// `|‖P(u - v)‖² / ‖u - v‖² - 1|` for each pair `(i, j)`; zero when `u = v`.
pub fn pairwise_distortions<T: Real>(
    original: &[Vec<T>],
    projected: &[Vec<T>],
    pairs: &[(usize, usize)],
) -> Vec<T> {
    let dist2 = |a: &[T], b: &[T]| -> T { a.iter().zip(b).map(|(x, y)| (*x - *y).powi(2)).sum() };
    pairs
        .iter()
        .map(|&(i, j)| {
            let d0 = dist2(&original[i], &original[j]);
            if d0 == T::zero() {
                return T::zero();
            }
            (dist2(&projected[i], &projected[j]) / d0 - T::one()).abs()
        })
        .collect()
}

/// Principal subspace of the second-moment matrix `Σ = mean φ φᵀ`.
#[derive(Clone, Debug)]
pub struct PcaProjection<T> {
    /// `Bᵀ`: row `k` is the `k`-th leading eigenvector of `Σ`.
    pub projection: Projection<T>,
    /// All eigenvalues of `Σ`, descending.
    pub eigenvalues: Vec<T>,
    pub projected: Vec<Vec<T>>,
    /// `tr Σ - tr(Σ B Bᵀ)`.
    pub reconstruction_error: T,
}

impl<T: Real> PcaProjection<T> {
    /// `Σ` of the eigenvalues beyond the kept subspace.
    pub fn tail_sum(&self) -> T {
        self.eigenvalues[self.projection.rows..].iter().copied().sum()
    }

    /// Largest entry of `|BᵀB - I|`.
    pub fn orthonormality_defect(&self) -> T {
        let p = &self.projection;
        let mut worst = T::zero();
        for a in 0..p.rows {
            for b in 0..p.rows {
                let dot: T = p.row(a).iter().zip(p.row(b)).map(|(x, y)| *x * *y).sum();
                let target = if a == b { T::one() } else { T::zero() };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Second-moment matrix `mean φ φᵀ`, row-major.
pub fn second_moment<T: Real>(features: &[Vec<T>]) -> Result<(Vec<T>, usize)> {
    let k = features.first().map_or(0, |v| v.len());
    if k == 0 || features.iter().any(|v| v.len() != k) {
        return Err(Error::arg("features must be non-empty vectors of equal length"));
    }
    let mut sigma = vec![T::zero(); k * k];
    for v in features {
        for i in 0..k {
            for j in i..k {
                sigma[i * k + j] += v[i] * v[j];
            }
        }
    }
    let inv = T::one() / T::from_usize_lossy(features.len());
    for i in 0..k {
        for j in i..k {
            let s = sigma[i * k + j] * inv;
            sigma[i * k + j] = s;
            sigma[j * k + i] = s;
        }
    }
    Ok((sigma, k))
}

/// Projects onto the `dim` leading eigenvectors of `Σ`.
pub fn pca_projection<T: Real>(features: &[Vec<T>], dim: usize) -> Result<PcaProjection<T>> {
    let (sigma, k) = second_moment(features)?;
    if dim == 0 || dim > k {
        return Err(Error::arg(format!("projected dimension {dim} outside 1..={k}")));
    }
    let eig = symmetric_eigen(&sigma, k)?;
    let data: Vec<T> = eig.vectors[..dim].iter().flatten().copied().collect();
    let projection = Projection::new(dim, k, data)?;
    let trace: T = (0..k).map(|i| sigma[i * k + i]).sum();
    // tr(Σ B Bᵀ) = Σ_r b_rᵀ Σ b_r.
    let kept: T = (0..dim)
        .map(|r| {
            let b = projection.row(r);
            (0..k)
                .map(|i| b[i] * (0..k).map(|j| sigma[i * k + j] * b[j]).sum::<T>())
                .sum::<T>()
        })
        .sum();
    let projected = features.iter().map(|v| projection.apply(v)).collect();
    Ok(PcaProjection {
        projection,
        eigenvalues: eig.values,
        projected,
        reconstruction_error: trace - kept,
    })
}
