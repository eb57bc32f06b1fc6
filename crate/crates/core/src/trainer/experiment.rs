use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::loss::saturated_loss;
use super::target::make_random_fourier_target;
use super::train::{train_classical, train_quantum, ResultRecord, TrainConfig};
use crate::cfflm::{ClassicalModel, FeatureMap};
use crate::error::{Error, Result};
use crate::qfflm::{AnsatzSpec, QuantumModel};
use crate::rng::derive_seed;
use crate::scalar::Real;

/// Paired classical/quantum training on random Fourier targets of varying
/// low/high energy ratio `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareConfig {
    pub r_values: Vec<f64>,
    pub runs: usize,
    /// Target coefficient count (odd).
    pub kappa: usize,
    /// First coefficient index of the high block.
    pub split: usize,
    pub points: usize,
    pub qubits: usize,
    pub layers: usize,
    /// Leading features kept by the classical model.
    pub classical_dim: usize,
    pub lr: f64,
    pub steps: usize,
    pub seed: u64,
    /// Trailing steps averaged into the saturated loss.
    pub saturation_window: usize,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            r_values: vec![0.05, 1.6, 55.5],
            runs: 5,
            kappa: 81,
            split: 64,
            points: 200,
            qubits: 4,
            layers: 1,
            classical_dim: 64,
            lr: 0.03,
            steps: 500,
            seed: 0,
            saturation_window: 25,
        }
    }
}

impl CompareConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::arg("runs must be at least 1"));
        }
        if self.r_values.is_empty() {
            return Err(Error::arg("at least one r value is required"));
        }
        if self.saturation_window == 0 {
            return Err(Error::arg("saturation window must be at least 1"));
        }
        if self.classical_dim == 0 || self.classical_dim > self.kappa {
            return Err(Error::arg(format!(
                "classical dimension {} outside 1..={}",
                self.classical_dim, self.kappa
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRun<T> {
    pub r: f64,
    pub run: usize,
    pub target_seed: u64,
    pub classical: ResultRecord<T>,
    pub quantum: ResultRecord<T>,
    pub classical_saturated: T,
    pub quantum_saturated: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub r: f64,
    pub classical_saturated_mean: f64,
    pub quantum_saturated_mean: f64,
    pub classical_saturated: Vec<f64>,
    pub quantum_saturated: Vec<f64>,
    /// Runs where the quantum loss is at least three times lower.
    pub quantum_wins_3x: usize,
    /// Energy of the target outside the classical feature set, per run.
    pub classical_floor: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub runs: usize,
    pub saturation_window: usize,
    pub classical_params: usize,
    pub quantum_params: usize,
    pub rows: Vec<CompareRow>,
}

impl CompareSummary {
    pub fn row(&self, r: f64) -> Option<&CompareRow> {
        self.rows.iter().find(|row| row.r == r)
    }
}

/// Runs every `(r, run)` pair. Run `k` draws its target from the same seed
/// for every `r`, so targets differ across `r` only by the block rescaling.
pub fn run_compare<T: Real>(cfg: &CompareConfig) -> Result<(Vec<CompareRun<T>>, CompareSummary)> {
    cfg.validate()?;
    let spec = AnsatzSpec::parallel_exponential(1, cfg.qubits, cfg.layers)?;
    let qmodel = QuantumModel::<T>::from_spec(&spec)?;
    let fm = FeatureMap::uniform(1, (cfg.kappa - 1) / 2)?.truncated(cfg.classical_dim)?;
    let cmodel = ClassicalModel::<T>::zeros(cfg.classical_dim);

    let jobs: Vec<(usize, usize)> =
        (0..cfg.r_values.len()).flat_map(|i| (0..cfg.runs).map(move |k| (i, k))).collect();
    let runs = jobs
        .par_iter()
        .map(|&(i, k)| {
            let r = cfg.r_values[i];
            let target_seed = derive_seed(cfg.seed, &[k as u64]);
            let target = make_random_fourier_target::<T>(cfg.kappa, cfg.split, r, target_seed)?;
            let mut data = target.dataset(cfg.points, &format!("random-fourier(r={r},run={k})"))?;
            data.seed = Some(target_seed);
            let train_seed = derive_seed(cfg.seed, &[k as u64, i as u64, 1]);
            let tc = TrainConfig::adam(cfg.lr, cfg.steps, train_seed);
            let classical = train_classical(&cmodel, &fm, &data, None, &tc)?;
            let quantum = train_quantum(&qmodel, &data, None, &tc)?;
            let w = cfg.saturation_window;
            Ok(CompareRun {
                r,
                run: k,
                target_seed,
                classical_saturated: saturated_loss(&classical.loss_trace, w).unwrap_or(T::nan()),
                quantum_saturated: saturated_loss(&quantum.loss_trace, w).unwrap_or(T::nan()),
                classical,
                quantum,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = cfg
        .r_values
        .iter()
        .map(|&r| {
            let sel: Vec<&CompareRun<T>> = runs.iter().filter(|x| x.r == r).collect();
            let c: Vec<f64> = sel.iter().map(|x| x.classical_saturated.as_f64()).collect();
            let q: Vec<f64> = sel.iter().map(|x| x.quantum_saturated.as_f64()).collect();
            let floor = sel
                .iter()
                .map(|x| {
                    make_random_fourier_target::<f64>(cfg.kappa, cfg.split, r, x.target_seed)
                        .map(|t| t.tail_energy(cfg.classical_dim))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CompareRow {
                r,
                classical_saturated_mean: c.iter().sum::<f64>() / c.len() as f64,
                quantum_saturated_mean: q.iter().sum::<f64>() / q.len() as f64,
                quantum_wins_3x: c.iter().zip(&q).filter(|(c, q)| 3.0 * **q <= **c).count(),
                classical_saturated: c,
                quantum_saturated: q,
                classical_floor: floor,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let summary = CompareSummary {
        runs: cfg.runs,
        saturation_window: cfg.saturation_window,
        classical_params: cmodel.n_params(),
        quantum_params: qmodel.n_params(),
        rows,
    };
    Ok((runs, summary))
}
