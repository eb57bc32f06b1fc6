use serde::{Deserialize, Serialize};

use super::features::FeatureMap;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Version tag of serialized classical models.
pub const CFFLM_VERSION: &str = "cfflm-v1";

/// Row-major `rows x cols` real matrix used to project features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projection<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> Projection<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::arg(format!("{} entries for a {rows}x{cols} projection", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.cols);
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| *a * *b).sum())
            .collect()
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// Linear model `f(x) = c·φ(x)`, or `c̃·(P φ(x))` when projected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalModel<T> {
    coeffs: Vec<T>,
    projection: Option<Projection<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument<T> {
    version: String,
    ordering: String,
    degrees: Vec<usize>,
    dim: usize,
    coefficients: Vec<T>,
    #[serde(default)]
    projection: Option<Projection<T>>,
}

const ORDERING: &str = "row-major(const,cos1,sin1,...)";

impl<T: Real> ClassicalModel<T> {
    /// Fully parametrized model with coefficients `c = θ`.
    pub fn full(coeffs: Vec<T>) -> Self {
        Self { coeffs, projection: None }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::full(vec![T::zero(); dim])
    }

    /// Model over projected features `P φ`; `coeffs` has one entry per row.
    pub fn projected(projection: Projection<T>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != projection.rows {
            return Err(Error::arg(format!(
                "{} coefficients for {} projected features",
                coeffs.len(),
                projection.rows
            )));
        }
        Ok(Self { coeffs, projection: Some(projection) })
    }

    pub fn params(&self) -> &[T] {
        &self.coeffs
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn set_params(&mut self, params: &[T]) -> Result<()> {
        if params.len() != self.coeffs.len() {
            return Err(Error::arg("parameter length mismatch"));
        }
        self.coeffs.copy_from_slice(params);
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.coeffs.len()
    }

    pub fn projection(&self) -> Option<&Projection<T>> {
        self.projection.as_ref()
    }

    /// Dimension of the feature vector this model consumes.
    pub fn input_dim(&self) -> usize {
        self.projection.as_ref().map_or(self.coeffs.len(), |p| p.cols)
    }

    /// Features the coefficients multiply: `φ` or `P φ`.
    pub fn effective_features(&self, phi: &[T]) -> Result<Vec<T>> {
        if phi.len() != self.input_dim() {
            return Err(Error::arg(format!(
                "{} features given, model expects {}",
                phi.len(),
                self.input_dim()
            )));
        }
        Ok(match &self.projection {
            Some(p) => p.apply(phi),
            None => phi.to_vec(),
        })
    }

    pub fn evaluate_features(&self, phi: &[T]) -> Result<T> {
        let eff = self.effective_features(phi)?;
        Ok(self.coeffs.iter().zip(&eff).map(|(a, b)| *a * *b).sum())
    }

    pub fn evaluate(&self, x: &[T], fm: &FeatureMap) -> Result<T> {
        self.evaluate_features(&fm.features(x)?)
    }

    /// Gradient of `(f(x) - y)^2 / 2` with respect to the coefficients.
    pub fn gradient(&self, x: &[T], y: T, fm: &FeatureMap) -> Result<Vec<T>> {
        let eff = self.effective_features(&fm.features(x)?)?;
        let f: T = self.coeffs.iter().zip(&eff).map(|(a, b)| *a * *b).sum();
        let r = f - y;
        Ok(eff.into_iter().map(|v| v * r).collect())
    }

    pub fn to_json(&self, fm: &FeatureMap) -> Result<String>
    where
        T: Serialize,
    {
        let doc = ModelDocument {
            version: CFFLM_VERSION.into(),
            ordering: ORDERING.into(),
            degrees: fm.degrees().to_vec(),
            dim: fm.dim(),
            coefficients: self.coeffs.clone(),
            projection: self.projection.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<(Self, FeatureMap)>
    where
        T: for<'de> Deserialize<'de>,
    {
        let doc: ModelDocument<T> = serde_json::from_str(text)?;
        if doc.version != CFFLM_VERSION || doc.ordering != ORDERING {
            return Err(Error::Validation(format!(
                "unsupported model document {} / {}",
                doc.version, doc.ordering
            )));
        }
        let fm = FeatureMap::new(doc.degrees)?.truncated(doc.dim)?;
        let model = match doc.projection {
            Some(p) => Self::projected(p, doc.coefficients)?,
            None => Self::full(doc.coefficients),
        };
        if model.input_dim() != fm.dim() {
            return Err(Error::Validation("model and feature dimensions differ".into()));
        }
        Ok((model, fm))
    }
}
