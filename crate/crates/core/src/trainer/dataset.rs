use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfflm::grid_points;
use crate::scalar::Real;

/// Supervised data `{(x_j, y_j)}` with a description of its origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset<T> {
    pub inputs: Vec<Vec<T>>,
    pub outputs: Vec<T>,
    pub descriptor: String,
    pub seed: Option<u64>,
}

impl<T: Real> Dataset<T> {
    pub fn new(inputs: Vec<Vec<T>>, outputs: Vec<T>, descriptor: impl Into<String>) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::arg(format!(
                "{} inputs but {} outputs",
                inputs.len(),
                outputs.len()
            )));
        }
        if let Some(m) = inputs.first().map(Vec::len) {
            if inputs.iter().any(|x| x.len() != m) {
                return Err(Error::arg("inputs have different lengths"));
            }
        }
        Ok(Self { inputs, outputs, descriptor: descriptor.into(), seed: None })
    }

    /// Samples `f` on `n` equally spaced points of `[-π, π)`.
    pub fn from_function(n: usize, descriptor: &str, f: impl Fn(T) -> T) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("at least one point is required"));
        }
        let xs = grid_points::<T>(n);
        let ys = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs.into_iter().map(|x| vec![x]).collect(), ys, descriptor)
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn n_vars(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    /// Smallest number of distinct values taken by any one input variable.
    pub fn min_distinct_per_variable(&self) -> usize {
        (0..self.n_vars())
            .map(|m| {
                let mut v: Vec<T> = self.inputs.iter().map(|x| x[m]).collect();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
                v.dedup();
                v.len()
            })
            .min()
            .unwrap_or(0)
    }
}

/// `+1/2` on `[0, π]`, `-1/2` on `(-π, 0)`, extended with period `2π`.
pub fn step_function<T: Real>(x: T) -> T {
    let tau = T::TAU();
    // Reduce to (-π, π]; the point -π maps to π.
    let mut r = x - tau * ((x + T::PI()) / tau).floor();
    if r <= -T::PI() {
        r += tau;
    }
    if r >= T::zero() {
        T::lit(0.5)
    } else {
        T::lit(-0.5)
    }
}

/// Step function on `n` equally spaced points of `[-π, π)`.
pub fn make_step_dataset<T: Real>(n: usize) -> Result<Dataset<T>> {
    if n < 2 {
        return Err(Error::arg("the step dataset needs at least two points"));
    }
    Dataset::from_function(n, "step", step_function)
}
