use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::csv_data::{load_csv_dataset, Normalization};
use super::dataset::{step_function, Dataset};
use crate::cfflm::FeatureMap;
use crate::error::{Error, Result};
use crate::qfflm::grid_points;
use crate::rng::{seeded, standard_normal};
use crate::scalar::Real;

/// Grid used to normalize random targets.
pub const TARGET_GRID: usize = 4096;

/// Peak `|f|` of normalized random targets.
pub const TARGET_PEAK: f64 = 0.95;

/// Description of a regression target on `[-π, π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Step,
    /// Random univariate series with `kappa` real coefficients whose low
    /// block (indices `< split`) and high block have energy ratio `r`.
    RandomFourier { kappa: usize, split: usize, r: f64, seed: u64 },
    /// `f(x) = c·φ(x)` for the given degrees and coefficient vector.
    FromCoefficients { degrees: Vec<usize>, coefficients: Vec<f64> },
    /// Header-ed CSV with named input and output columns.
    Csv {
        path: PathBuf,
        inputs: Vec<String>,
        output: String,
        #[serde(default)]
        normalization: Normalization,
    },
}

/// A target realized as a fixed coefficient vector over Fourier features.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierTarget<T> {
    pub features: FeatureMap,
    pub coefficients: Vec<T>,
}

impl<T: Real> FourierTarget<T> {
    pub fn new(features: FeatureMap, coefficients: Vec<T>) -> Result<Self> {
        if coefficients.len() != features.dim() {
            return Err(Error::arg(format!(
                "{} coefficients for {} features",
                coefficients.len(),
                features.dim()
            )));
        }
        Ok(Self { features, coefficients })
    }

    pub fn evaluate(&self, x: &[T]) -> Result<T> {
        let phi = self.features.features(x)?;
        Ok(self.coefficients.iter().zip(&phi).map(|(a, b)| *a * *b).sum())
    }

    /// `‖c_low‖ / ‖c_high‖` with the low block `[0, split)`.
    pub fn ratio(&self, split: usize) -> T {
        let (lo, hi) = self.coefficients.split_at(split);
        let e = |v: &[T]| v.iter().map(|x| *x * *x).sum::<T>().sqrt();
        e(lo) / e(hi)
    }

    /// Energy `Σ c²`, equal to the mean of `f²` over a period.
    pub fn energy(&self) -> T {
        self.coefficients.iter().map(|x| *x * *x).sum()
    }

    /// Energy of coefficients with index `>= split`.
    pub fn tail_energy(&self, split: usize) -> T {
        self.coefficients[split..].iter().map(|x| *x * *x).sum()
    }

    /// Samples the target on `n` equally spaced points of `[-π, π)`.
    pub fn dataset(&self, n: usize, descriptor: &str) -> Result<Dataset<T>> {
        if self.features.n_vars() != 1 {
            return Err(Error::Unsupported("grid datasets are univariate".into()));
        }
        let xs = grid_points::<T>(n);
        let ys = xs.iter().map(|&x| self.evaluate(&[x])).collect::<Result<Vec<_>>>()?;
        Dataset::new(xs.into_iter().map(|x| vec![x]).collect(), ys, descriptor)
    }

    /// Largest `|f|` over a uniform grid of `n` points.
    pub fn grid_peak(&self, n: usize) -> Result<T> {
        let mut peak = T::zero();
        for x in grid_points::<T>(n) {
            peak = peak.max(self.evaluate(&[x])?.abs());
        }
        Ok(peak)
    }
}

/// Random Fourier-series target with energy ratio `r` between the
/// coefficients below and above `split`, scaled to peak `|f| = 0.95` on a
/// 4096-point grid. Coefficients are standard normal before rescaling.
pub fn make_random_fourier_target<T: Real>(
    kappa: usize,
    split: usize,
    r: f64,
    seed: u64,
) -> Result<FourierTarget<T>> {
    if kappa.is_multiple_of(2) {
        return Err(Error::arg(format!("κ = {kappa} must be odd")));
    }
    if split == 0 || split >= kappa {
        return Err(Error::arg(format!("split {split} outside 1..{kappa}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::arg(format!("ratio r = {r} must be positive and finite")));
    }
    let mut rng = seeded(seed);
    let mut c: Vec<f64> = draw(&mut rng, kappa);
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (lo, hi) = (norm(&c[..split]), norm(&c[split..]));
    let hi_scale = lo / (r * hi);
    for v in c[split..].iter_mut() {
        *v *= hi_scale;
    }
    let fm = FeatureMap::uniform(1, (kappa - 1) / 2)?;
    let unscaled = FourierTarget::new(fm.clone(), c.clone())?;
    let peak = unscaled.grid_peak(TARGET_GRID)?;
    let coefficients = c.iter().map(|v| T::lit(v * TARGET_PEAK / peak)).collect();
    FourierTarget::new(fm, coefficients)
}

fn draw<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| standard_normal(rng)).collect()
}

impl TargetSpec {
    /// Realizes the target as a dataset of `n` grid points. CSV targets
    /// ignore `n` and return every row.
    pub fn dataset<T: Real>(&self, n: usize) -> Result<Dataset<T>> {
        match self {
            TargetSpec::Step => Dataset::from_function(n, "step", step_function),
            TargetSpec::RandomFourier { kappa, split, r, seed } => {
                let t = make_random_fourier_target::<T>(*kappa, *split, *r, *seed)?;
                let mut d = t.dataset(n, &format!("random-fourier(κ={kappa},split={split},r={r})"))?;
                d.seed = Some(*seed);
                Ok(d)
            }
            TargetSpec::FromCoefficients { degrees, coefficients } => {
                let fm = FeatureMap::new(degrees.clone())?;
                let c = coefficients.iter().map(|&v| T::lit(v)).collect();
                FourierTarget::new(fm, c)?.dataset(n, "coefficients")
            }
            TargetSpec::Csv { path, inputs, output, normalization } => {
                Ok(load_csv_dataset(path, inputs, output, normalization)?.0)
            }
        }
    }
}
