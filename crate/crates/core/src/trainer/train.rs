use std::time::Instant;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::loss::mse_loss;
use super::optim::OptimizerConfig;
use crate::cfflm::{ClassicalModel, FeatureMap};
use crate::error::{Error, Result};
use crate::qfflm::QuantumModel;
use crate::rng::{derive_seed, seeded};
use crate::scalar::Real;

/// Loss above which a run is declared divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

fn divergence_threshold() -> f64 {
    DIVERGENCE_THRESHOLD
}

// Seed-derivation tags; one per independent random consumer.
const TAG_INIT: u64 = 0;
const TAG_BATCH: u64 = 1;
const TAG_SHOTS: u64 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub optimizer: OptimizerConfig,
    pub steps: usize,
    /// Mini-batch size; `None` is full batch.
    #[serde(default)]
    pub batch: Option<usize>,
    /// Measurement shots per expectation; `None` is exact.
    #[serde(default)]
    pub shots: Option<u64>,
    pub seed: u64,
    /// Enforces a Nyquist-sized training grid.
    #[serde(default)]
    pub recover_coefficients: bool,
    /// Overrides the Nyquist guard.
    #[serde(default)]
    pub allow_undersampled: bool,
    #[serde(default = "divergence_threshold")]
    pub divergence_threshold: f64,
}

impl TrainConfig {
    /// Full-batch exact Adam.
    pub fn adam(lr: f64, steps: usize, seed: u64) -> Self {
        Self {
            optimizer: OptimizerConfig::adam(lr),
            steps,
            batch: None,
            shots: None,
            seed,
            recover_coefficients: false,
            allow_undersampled: false,
            divergence_threshold: DIVERGENCE_THRESHOLD,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.optimizer.validate()?;
        if self.steps == 0 {
            return Err(Error::arg("steps must be at least 1"));
        }
        if self.batch == Some(0) {
            return Err(Error::arg("batch size must be at least 1"));
        }
        if self.shots == Some(0) {
            return Err(Error::arg("shots must be at least 1"));
        }
        if !(self.divergence_threshold > 0.0) {
            return Err(Error::arg("divergence threshold must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainStatus {
    Completed,
    /// Loss exceeded the threshold or became non-finite at `step`.
    Diverged { step: usize },
}

/// Work done during a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCounters {
    /// Circuit executions, including parameter-shift evaluations.
    pub circuit_evaluations: u64,
    /// Gate applications summed over circuit executions.
    pub gate_applications: u64,
    /// Measurement shots drawn (zero in exact mode).
    pub shots: u64,
    /// Classical multiply-add operations.
    pub multiply_adds: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord<T> {
    pub model: String,
    pub dataset: String,
    pub config: TrainConfig,
    pub seed: u64,
    pub status: TrainStatus,
    /// Training loss on the full dataset before each update.
    pub loss_trace: Vec<T>,
    pub test_loss_trace: Vec<T>,
    /// Training loss at `final_params`.
    pub final_loss: T,
    pub final_params: Vec<T>,
    pub resource_counters: ResourceCounters,
    /// Wall-clock time; kept out of serialized output for reproducibility.
    #[serde(skip)]
    pub wall_ms: u64,
}

impl<T: Real> ResultRecord<T> {
    pub fn diverged(&self) -> bool {
        matches!(self.status, TrainStatus::Diverged { .. })
    }

    /// `step,train_loss,test_loss` rows; floats with 17 significant digits.
    pub fn trace_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["step", "train_loss", "test_loss"])?;
        for (k, l) in self.loss_trace.iter().enumerate() {
            let test = self.test_loss_trace.get(k).map_or(String::new(), |v| fmt(*v));
            w.write_record([k.to_string(), fmt(*l), test])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Float formatting shared by every CSV writer: 17 significant digits.
pub fn fmt<T: Real>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}

/// Per-step loss and gradient provider.
trait Objective<T: Real>: Sync {
    fn name(&self) -> String;
    fn predict(&self, theta: &[T], xs: &[Vec<T>], counters: &mut ResourceCounters) -> Result<Vec<T>>;
    /// Batch predictions and per-point gradients of the model output.
    fn values_and_gradients(
        &self,
        theta: &[T],
        data: &Dataset<T>,
        idx: &[usize],
        step: usize,
        counters: &mut ResourceCounters,
    ) -> Result<(Vec<T>, Vec<Vec<T>>)>;
}

struct QuantumObjective<'a, T> {
    model: &'a QuantumModel<T>,
    shots: Option<u64>,
    seed: u64,
}

impl<T: Real> Objective<T> for QuantumObjective<'_, T> {
    fn name(&self) -> String {
        format!("qfflm({} params)", self.model.n_params())
    }

    fn predict(&self, theta: &[T], xs: &[Vec<T>], c: &mut ResourceCounters) -> Result<Vec<T>> {
        let gates = self.model.circuit().gate_count() as u64;
        c.circuit_evaluations += xs.len() as u64;
        c.gate_applications += xs.len() as u64 * gates;
        self.model.evaluate_batch(theta, xs)
    }

    fn values_and_gradients(
        &self,
        theta: &[T],
        data: &Dataset<T>,
        idx: &[usize],
        step: usize,
        c: &mut ResourceCounters,
    ) -> Result<(Vec<T>, Vec<Vec<T>>)> {
        let per_point = 1 + 2 * self.model.n_params() as u64;
        let runs = idx.len() as u64 * per_point;
        c.circuit_evaluations += runs;
        c.gate_applications += runs * self.model.circuit().gate_count() as u64;
        match self.shots {
            None => {
                let xs: Vec<Vec<T>> = idx.iter().map(|&j| data.inputs[j].clone()).collect();
                self.model.values_and_gradients(theta, &xs)
            }
            Some(shots) => {
                c.shots += runs * shots;
                let rows = idx
                    .par_iter()
                    .map(|&j| {
                        let mut rng = seeded(derive_seed(self.seed, &[TAG_SHOTS, step as u64, j as u64]));
                        let x = &data.inputs[j];
                        let f = self.model.evaluate_sampled(theta, x, shots, &mut rng)?;
                        let g = self.model.gradient_sampled(theta, x, shots, &mut rng)?;
                        Ok((f, g))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(rows.into_iter().unzip())
            }
        }
    }
}

struct ClassicalObjective<'a, T> {
    model: &'a ClassicalModel<T>,
    fm: &'a FeatureMap,
    /// Effective features of each training point.
    train_features: Vec<Vec<T>>,
}

impl<T: Real> ClassicalObjective<'_, T> {
    fn dot(theta: &[T], phi: &[T]) -> T {
        theta.iter().zip(phi).map(|(a, b)| *a * *b).sum()
    }
}

impl<T: Real> Objective<T> for ClassicalObjective<'_, T> {
    fn name(&self) -> String {
        format!("cfflm({} params)", self.model.n_params())
    }

    fn predict(&self, theta: &[T], xs: &[Vec<T>], c: &mut ResourceCounters) -> Result<Vec<T>> {
        c.multiply_adds += (xs.len() * theta.len()) as u64;
        xs.iter()
            .map(|x| {
                let phi = self.model.effective_features(&self.fm.features(x)?)?;
                Ok(Self::dot(theta, &phi))
            })
            .collect()
    }

    fn values_and_gradients(
        &self,
        theta: &[T],
        _data: &Dataset<T>,
        idx: &[usize],
        _step: usize,
        c: &mut ResourceCounters,
    ) -> Result<(Vec<T>, Vec<Vec<T>>)> {
        c.multiply_adds += (idx.len() * theta.len()) as u64;
        Ok(idx
            .iter()
            .map(|&j| {
                let phi = &self.train_features[j];
                (Self::dot(theta, phi), phi.clone())
            })
            .unzip())
    }
}

/// Trains a quantum model from uniform random angles drawn from the config seed.
pub fn train_quantum<T: Real>(
    model: &QuantumModel<T>,
    data: &Dataset<T>,
    test: Option<&Dataset<T>>,
    cfg: &TrainConfig,
) -> Result<ResultRecord<T>> {
    let init = model.init_params(&mut seeded(derive_seed(cfg.seed, &[TAG_INIT])));
    train_quantum_from(model, data, test, cfg, init)
}

/// Trains a quantum model from the given initial parameters.
pub fn train_quantum_from<T: Real>(
    model: &QuantumModel<T>,
    data: &Dataset<T>,
    test: Option<&Dataset<T>>,
    cfg: &TrainConfig,
    init: Vec<T>,
) -> Result<ResultRecord<T>> {
    if init.len() != model.n_params() {
        return Err(Error::arg(format!(
            "{} initial parameters for {} trainable angles",
            init.len(),
            model.n_params()
        )));
    }
    check_dims(model.n_vars(), data, test)?;
    nyquist_guard(&model.degrees(), data, cfg)?;
    let obj = QuantumObjective { model, shots: cfg.shots, seed: cfg.seed };
    run(&obj, data, test, cfg, init)
}

/// Trains a classical model starting from its current coefficients.
pub fn train_classical<T: Real>(
    model: &ClassicalModel<T>,
    fm: &FeatureMap,
    data: &Dataset<T>,
    test: Option<&Dataset<T>>,
    cfg: &TrainConfig,
) -> Result<ResultRecord<T>> {
    if cfg.shots.is_some() {
        return Err(Error::arg("shot sampling applies only to quantum models"));
    }
    check_dims(fm.n_vars(), data, test)?;
    nyquist_guard(fm.degrees(), data, cfg)?;
    let train_features = data
        .inputs
        .iter()
        .map(|x| model.effective_features(&fm.features(x)?))
        .collect::<Result<Vec<_>>>()?;
    let obj = ClassicalObjective { model, fm, train_features };
    run(&obj, data, test, cfg, model.params().to_vec())
}

fn check_dims<T: Real>(m: usize, data: &Dataset<T>, test: Option<&Dataset<T>>) -> Result<()> {
    if data.is_empty() {
        return Err(Error::arg("empty training set"));
    }
    for d in std::iter::once(data).chain(test) {
        if d.n_vars() != m && !d.is_empty() {
            return Err(Error::arg(format!("model takes {m} inputs, dataset has {}", d.n_vars())));
        }
    }
    Ok(())
}

fn nyquist_guard<T: Real>(degrees: &[usize], data: &Dataset<T>, cfg: &TrainConfig) -> Result<()> {
    if !cfg.recover_coefficients || cfg.allow_undersampled {
        return Ok(());
    }
    let need = 2 * degrees.iter().copied().max().unwrap_or(0) + 1;
    let have = data.min_distinct_per_variable();
    if have < need {
        return Err(Error::Validation(format!(
            "coefficient recovery needs at least {need} distinct points per variable, dataset has {have}"
        )));
    }
    Ok(())
}

/// `∂L/∂θ = (2/b) Σ_j (f_j - y_j) ∂f_j` over the batch `idx`.
fn assemble<T: Real>(values: &[T], grads: &[Vec<T>], idx: &[usize], data: &Dataset<T>, n: usize) -> Vec<T> {
    let scale = T::lit(2.0) / T::from_usize_lossy(idx.len());
    let mut grad = vec![T::zero(); n];
    for ((&j, f), g) in idx.iter().zip(values).zip(grads) {
        let r = scale * (*f - data.outputs[j]);
        for (acc, gk) in grad.iter_mut().zip(g) {
            *acc += r * *gk;
        }
    }
    grad
}

/// Full-dataset MSE and its exact gradient for a quantum model.
pub fn quantum_loss_and_gradient<T: Real>(
    model: &QuantumModel<T>,
    theta: &[T],
    data: &Dataset<T>,
) -> Result<(T, Vec<T>)> {
    check_dims(model.n_vars(), data, None)?;
    let obj = QuantumObjective { model, shots: None, seed: 0 };
    loss_and_gradient(&obj, theta, data)
}

/// Full-dataset MSE and its gradient for a classical model at `theta`.
pub fn classical_loss_and_gradient<T: Real>(
    model: &ClassicalModel<T>,
    fm: &FeatureMap,
    theta: &[T],
    data: &Dataset<T>,
) -> Result<(T, Vec<T>)> {
    check_dims(fm.n_vars(), data, None)?;
    if theta.len() != model.n_params() {
        return Err(Error::arg("parameter length mismatch"));
    }
    let train_features = data
        .inputs
        .iter()
        .map(|x| model.effective_features(&fm.features(x)?))
        .collect::<Result<Vec<_>>>()?;
    let obj = ClassicalObjective { model, fm, train_features };
    loss_and_gradient(&obj, theta, data)
}

fn loss_and_gradient<T: Real, O: Objective<T>>(obj: &O, theta: &[T], data: &Dataset<T>) -> Result<(T, Vec<T>)> {
    let idx: Vec<usize> = (0..data.len()).collect();
    let (values, grads) = obj.values_and_gradients(theta, data, &idx, 0, &mut ResourceCounters::default())?;
    Ok((mse_loss(&values, &data.outputs)?, assemble(&values, &grads, &idx, data, theta.len())))
}

fn run<T: Real, O: Objective<T>>(
    obj: &O,
    data: &Dataset<T>,
    test: Option<&Dataset<T>>,
    cfg: &TrainConfig,
    mut theta: Vec<T>,
) -> Result<ResultRecord<T>> {
    cfg.validate()?;
    let n = data.len();
    if let Some(b) = cfg.batch {
        if b > n {
            return Err(Error::arg(format!("batch of {b} from {n} points")));
        }
    }
    let start = Instant::now();
    let mut opt = cfg.optimizer.build::<T>(theta.len());
    let mut counters = ResourceCounters::default();
    let mut loss_trace = Vec::with_capacity(cfg.steps);
    let mut test_loss_trace = Vec::new();
    let mut status = TrainStatus::Completed;
    let full: Vec<usize> = (0..n).collect();
    let threshold = T::lit(cfg.divergence_threshold);

    for step in 0..cfg.steps {
        let idx = match cfg.batch {
            Some(b) if b < n => {
                let mut rng = seeded(derive_seed(cfg.seed, &[TAG_BATCH, step as u64]));
                let mut v = sample(&mut rng, n, b).into_vec();
                v.sort_unstable();
                v
            }
            _ => full.clone(),
        };
        let (values, grads) = obj.values_and_gradients(&theta, data, &idx, step, &mut counters)?;

        let loss = if idx.len() == n && cfg.shots.is_none() {
            mse_loss(&values, &data.outputs)?
        } else {
            mse_loss(&obj.predict(&theta, &data.inputs, &mut counters)?, &data.outputs)?
        };
        loss_trace.push(loss);
        if let Some(t) = test.filter(|t| !t.is_empty()) {
            test_loss_trace.push(mse_loss(&obj.predict(&theta, &t.inputs, &mut counters)?, &t.outputs)?);
        }
        if !loss.is_finite() || loss > threshold {
            status = TrainStatus::Diverged { step };
            log::warn!("{} diverged at step {step}: loss {loss}", obj.name());
            break;
        }

        let grad = assemble(&values, &grads, &idx, data, theta.len());
        opt.step(&mut theta, &grad).map_err(|e| match e {
            Error::Training { message, .. } => Error::Training { step, message },
            other => other,
        })?;
    }

    let final_loss = mse_loss(&obj.predict(&theta, &data.inputs, &mut counters)?, &data.outputs)?;
    Ok(ResultRecord {
        model: obj.name(),
        dataset: data.descriptor.clone(),
        config: cfg.clone(),
        seed: cfg.seed,
        status,
        loss_trace,
        test_loss_trace,
        final_loss,
        final_params: theta,
        resource_counters: counters,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}
