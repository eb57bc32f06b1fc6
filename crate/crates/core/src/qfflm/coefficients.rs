use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectra::FrequencySpectrum;

/// Largest total DFT grid, `G^M`.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// Coefficients `c̃_n` of `f(x) = Σ_n c̃_n exp(-i n·x)` on the box
/// `[-d_1, d_1] × … × [-d_M, d_M]`, stored row-major with variable 1 most
/// significant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficients<T> {
    degrees: Vec<usize>,
    coeffs: Vec<Complex<T>>,
    /// True when every frequency in the box belongs to the model spectrum.
    dense: bool,
    /// Squared magnitude of DFT bins outside the model spectrum.
    residual_mass: T,
    /// Largest magnitude of a DFT bin outside the model spectrum.
    residual_max: T,
    /// Largest `|f|` over the sampling grid, when extracted from samples.
    grid_max_abs: Option<T>,
}

/// Sample points `x_j = -π + 2πj/G` of one axis.
pub fn grid_points<T: Real>(g: usize) -> Vec<T> {
    let step = T::TAU() / T::from_usize_lossy(g);
    (0..g).map(|j| -T::PI() + step * T::from_usize_lossy(j)).collect()
}

/// All points of the `G^M` grid in row-major order.
pub fn grid_inputs<T: Real>(g: usize, m: usize) -> Vec<Vec<T>> {
    let axis = grid_points::<T>(g);
    let total = g.pow(m as u32);
    (0..total)
        .map(|mut idx| {
            let mut x = vec![T::zero(); m];
            for slot in x.iter_mut().rev() {
                *slot = axis[idx % g];
                idx /= g;
            }
            x
        })
        .collect()
}

pub(crate) fn check_grid(g: usize, m: usize) -> Result<()> {
    if g.is_multiple_of(2) || g == 0 {
        return Err(Error::arg(format!("grid size {g} must be odd")));
    }
    let total = (g as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > MAX_GRID_POINTS as u128 {
        return Err(Error::capacity(format!("grid of {g}^{m} points exceeds {MAX_GRID_POINTS}")));
    }
    Ok(())
}

/// Separable DFT of samples on the `G^M` grid. Output bin `n` on each axis
/// runs over `[-(G-1)/2, (G-1)/2]` and holds `(1/G) Σ_j f(x_j) exp(i n x_j)`.
pub fn dft<T: Real>(values: &[T], g: usize, m: usize) -> Result<Vec<Complex<T>>> {
    check_grid(g, m)?;
    if values.len() != g.pow(m as u32) {
        return Err(Error::arg(format!("{} samples for a {g}^{m} grid", values.len())));
    }
    let h = (g - 1) / 2;
    let xs = grid_points::<T>(g);
    let inv_g = T::one() / T::from_usize_lossy(g);
    // twiddle[n_idx * g + j] = exp(i n x_j) / G with n = n_idx - h.
    let twiddle: Vec<Complex<T>> = (0..g)
        .flat_map(|ni| {
            let n = T::lit(ni as f64 - h as f64);
            xs.iter()
                .map(move |&x| Complex::from_polar(inv_g, n * x))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut data: Vec<Complex<T>> =
        values.iter().map(|&v| Complex::new(v, T::zero())).collect();
    let mut out = data.clone();
    for axis in 0..m {
        let inner = g.pow((m - 1 - axis) as u32);
        let outer = data.len() / (inner * g);
        for o in 0..outer {
            for i in 0..inner {
                let base = o * g * inner + i;
                for ni in 0..g {
                    let tw = &twiddle[ni * g..(ni + 1) * g];
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for (j, t) in tw.iter().enumerate() {
                        acc += data[base + j * inner] * t;
                    }
                    out[base + ni * inner] = acc;
                }
            }
        }
        std::mem::swap(&mut data, &mut out);
    }
    Ok(data)
}

impl<T: Real> FourierCoefficients<T> {
    /// Coefficients on a dense box, as given.
    pub fn new(degrees: Vec<usize>, coeffs: Vec<Complex<T>>) -> Result<Self> {
        let size = box_size(&degrees)?;
        if coeffs.len() != size {
            return Err(Error::arg(format!(
                "{} coefficients for a box of {size} frequencies",
                coeffs.len()
            )));
        }
        Ok(Self {
            degrees,
            coeffs,
            dense: true,
            residual_mass: T::zero(),
            residual_max: T::zero(),
            grid_max_abs: None,
        })
    }

    /// Extracts coefficients from samples on an odd grid of `g` points per
    /// axis. Bins inside the product of `spectra` supports are kept; every
    /// other bin counts toward the residual.
    pub fn from_samples(values: &[T], g: usize, spectra: &[FrequencySpectrum]) -> Result<Self> {
        let m = spectra.len();
        let degrees: Vec<usize> = spectra.iter().map(|s| s.d_f() as usize).collect();
        let d_max = degrees.iter().copied().max().unwrap_or(0);
        if g < 2 * d_max + 1 {
            return Err(Error::arg(format!(
                "grid of {g} points cannot resolve degree {d_max}; need at least {}",
                2 * d_max + 1
            )));
        }
        let bins = dft(values, g, m)?;
        let h = (g - 1) / 2;
        let size = box_size(&degrees)?;
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); size];
        let mut residual_mass = T::zero();
        let mut residual_max = T::zero();
        let mut freq = vec![0i64; m];
        for (idx, c) in bins.iter().enumerate() {
            let mut rem = idx;
            for a in (0..m).rev() {
                freq[a] = (rem % g) as i64 - h as i64;
                rem /= g;
            }
            let in_spectrum = freq
                .iter()
                .zip(spectra)
                .all(|(&f, s)| s.multiplicity_of(f) > 0);
            if in_spectrum {
                coeffs[box_index(&degrees, &freq)] = *c;
            } else {
                residual_mass += c.norm_sqr();
                residual_max = residual_max.max(c.norm());
            }
        }
        let grid_max_abs = values.iter().fold(T::zero(), |a, v| a.max(v.abs()));
        Ok(Self {
            dense: spectra.iter().all(|s| s.is_contiguous()),
            degrees,
            coeffs,
            residual_mass,
            residual_max,
            grid_max_abs: Some(grid_max_abs),
        })
    }

    pub fn n_vars(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn is_dense(&self) -> bool {
        self.dense
    }

    pub fn residual_mass(&self) -> T {
        self.residual_mass
    }

    pub fn residual_max(&self) -> T {
        self.residual_max
    }

    pub fn grid_max_abs(&self) -> Option<T> {
        self.grid_max_abs
    }

    /// `c̃_n`, zero outside the box.
    pub fn get(&self, freq: &[i64]) -> Complex<T> {
        if freq.len() != self.degrees.len()
            || freq.iter().zip(&self.degrees).any(|(&f, &d)| f.unsigned_abs() as usize > d)
        {
            return Complex::new(T::zero(), T::zero());
        }
        self.coeffs[box_index(&self.degrees, freq)]
    }

    /// Largest `|c̃_{-n} - conj(c̃_n)|`; zero for a real function.
    pub fn reality_defect(&self) -> T {
        let mut worst = T::zero();
        let mut neg = vec![0i64; self.n_vars()];
        for (idx, c) in self.coeffs.iter().enumerate() {
            let f = box_freq(&self.degrees, idx);
            for (n, v) in neg.iter_mut().zip(&f) {
                *n = -v;
            }
            worst = worst.max((self.get(&neg) - c.conj()).norm());
        }
        worst
    }

    /// Synthesizes `Re Σ c̃_n exp(-i n·x)`.
    pub fn evaluate(&self, x: &[T]) -> Result<T> {
        if x.len() != self.n_vars() {
            return Err(Error::arg(format!("x has length {}, expected {}", x.len(), self.n_vars())));
        }
        // Per-axis phase tables exp(-i n x_m).
        let tables: Vec<Vec<Complex<T>>> = self
            .degrees
            .iter()
            .zip(x)
            .map(|(&d, &xm)| {
                (-(d as i64)..=d as i64)
                    .map(|n| Complex::from_polar(T::one(), -T::lit(n as f64) * xm))
                    .collect()
            })
            .collect();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (idx, c) in self.coeffs.iter().enumerate() {
            let mut rem = idx;
            let mut phase = Complex::new(T::one(), T::zero());
            for (a, &d) in self.degrees.iter().enumerate().rev() {
                let k = 2 * d + 1;
                phase *= tables[a][rem % k];
                rem /= k;
            }
            acc += c * phase;
        }
        Ok(acc.re)
    }

    /// Real coefficient vector `c` with `f(x) = c·φ(x)` for the
    /// √2-normalized features `(1, √2 cos x, √2 sin x, …, √2 sin d x)` taken
    /// as a tensor product over variables.
    pub fn coefficient_vector(&self) -> Result<Vec<T>> {
        if !self.dense {
            return Err(Error::Unsupported(
                "real coefficient vectors need a dense spectrum; use the complex form".into(),
            ));
        }
        let sqrt2 = T::SQRT_2();
        let i = Complex::new(T::zero(), T::one());
        // Per axis: c_0 = c̃_0, c_cos j = (c̃_j + c̃_-j)/√2, c_sin j = (c̃_j - c̃_-j)/(√2 i).
        let mut data = self.coeffs.clone();
        let mut out = data.clone();
        for (axis, &d) in self.degrees.iter().enumerate() {
            let k = 2 * d + 1;
            let inner: usize = self.degrees[axis + 1..].iter().map(|&e| 2 * e + 1).product();
            let outer = data.len() / (inner * k);
            for o in 0..outer {
                for r in 0..inner {
                    let at = |n: i64| o * k * inner + (n + d as i64) as usize * inner + r;
                    let feat = |f: usize| o * k * inner + f * inner + r;
                    out[feat(0)] = data[at(0)];
                    for j in 1..=d as i64 {
                        let (p, q) = (data[at(j)], data[at(-j)]);
                        out[feat(2 * j as usize - 1)] = (p + q) / sqrt2;
                        out[feat(2 * j as usize)] = (p - q) / (i * sqrt2);
                    }
                }
            }
            std::mem::swap(&mut data, &mut out);
        }
        Ok(data.into_iter().map(|c| c.re).collect())
    }

    /// Inverse of [`FourierCoefficients::coefficient_vector`].
    pub fn from_coefficient_vector(degrees: Vec<usize>, c: &[T]) -> Result<Self> {
        let size = box_size(&degrees)?;
        if c.len() != size {
            return Err(Error::arg(format!("{} features for a box of {size}", c.len())));
        }
        let half_sqrt2 = T::FRAC_1_SQRT_2();
        let i = Complex::new(T::zero(), T::one());
        let mut data: Vec<Complex<T>> = c.iter().map(|&v| Complex::new(v, T::zero())).collect();
        let mut out = data.clone();
        for (axis, &d) in degrees.iter().enumerate() {
            let k = 2 * d + 1;
            let inner: usize = degrees[axis + 1..].iter().map(|&e| 2 * e + 1).product();
            let outer = data.len() / (inner * k);
            for o in 0..outer {
                for r in 0..inner {
                    let at = |n: i64| o * k * inner + (n + d as i64) as usize * inner + r;
                    let feat = |f: usize| o * k * inner + f * inner + r;
                    out[at(0)] = data[feat(0)];
                    for j in 1..=d as i64 {
                        let cc = data[feat(2 * j as usize - 1)];
                        let cs = data[feat(2 * j as usize)];
                        out[at(j)] = (cc + i * cs) * half_sqrt2;
                        out[at(-j)] = (cc - i * cs) * half_sqrt2;
                    }
                }
            }
            std::mem::swap(&mut data, &mut out);
        }
        Self::new(degrees, data)
    }
}

fn box_size(degrees: &[usize]) -> Result<usize> {
    degrees
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(2 * d + 1))
        .filter(|&n| n <= MAX_GRID_POINTS)
        .ok_or_else(|| Error::capacity("coefficient box too large"))
}

fn box_index(degrees: &[usize], freq: &[i64]) -> usize {
    degrees
        .iter()
        .zip(freq)
        .fold(0, |acc, (&d, &f)| acc * (2 * d + 1) + (f + d as i64) as usize)
}

fn box_freq(degrees: &[usize], mut idx: usize) -> Vec<i64> {
    let mut f = vec![0i64; degrees.len()];
    for (a, &d) in degrees.iter().enumerate().rev() {
        let k = 2 * d + 1;
        f[a] = (idx % k) as i64 - d as i64;
        idx /= k;
    }
    f
}
