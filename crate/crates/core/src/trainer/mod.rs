//! Datasets, targets, losses, optimizers and training loops.
//!
//! Both model families train on the mean squared error with the gradient
//! `∂L/∂θ = (2/n) Σ_j (f(x_j) - y_j) ∂f(x_j)/∂θ`. Quantum gradients come from
//! the parameter-shift rule, exactly or from sampled expectations. Every
//! random choice (initial angles, mini-batches, shots) is derived from the
//! config seed, so a run is a pure function of its inputs.

mod coulomb;
mod csv_data;
mod dataset;
mod experiment;
mod loss;
mod optim;
mod target;
mod train;

pub use coulomb::coulomb_features;
pub use csv_data::{load_csv_dataset, read_csv_dataset, Affine, Normalization, NormalizationRecord};
pub use dataset::{make_step_dataset, step_function, Dataset};
pub use experiment::{run_compare, CompareConfig, CompareRow, CompareRun, CompareSummary};
pub use loss::{mse_loss, saturated_loss};
pub use optim::{
    Adam, GradientDescent, Optimizer, OptimizerConfig, ADAM_BETA1, ADAM_BETA2, ADAM_EPS,
};
pub use target::{make_random_fourier_target, FourierTarget, TargetSpec, TARGET_GRID, TARGET_PEAK};
pub use train::{
    classical_loss_and_gradient, fmt, quantum_loss_and_gradient, train_classical, train_quantum, train_quantum_from, ResourceCounters, ResultRecord,
    TrainConfig, TrainStatus, DIVERGENCE_THRESHOLD,
};
