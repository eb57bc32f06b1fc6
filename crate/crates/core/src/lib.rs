//! Simulation, training and analysis of Fourier-featured linear models.
//!
//! Two model families share one feature space. The quantum model is a
//! variational circuit whose data enters through weighted Pauli-Z rotations,
//! so its output is a finite Fourier series whose frequencies are fixed by the
//! encoding weights. The classical model is a plain dot product between a
//! coefficient vector and trigonometric features.
//!
//! The numerical core is generic over the scalar type through [`Real`]
//! (implemented for `f32` and `f64`). Integer spectra and resource counts are
//! exact. Concrete `f64` aliases are exported at the crate root.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cfflm;
pub mod error;
pub mod qfflm;
pub mod rng;
pub mod scalar;
pub mod spectra;
pub mod statevector;
pub mod trainer;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

/// Double-precision complex amplitude.
pub type C64 = Complex<f64>;

pub type StateVector64 = statevector::StateVector<f64>;
pub type StateVector32 = statevector::StateVector<f32>;
pub type Gate64 = statevector::Gate<f64>;
pub type ComplexMatrix64 = statevector::ComplexMatrix<f64>;
pub type Circuit64 = qfflm::Circuit<f64>;
pub type FourierCoefficients64 = qfflm::FourierCoefficients<f64>;
pub type QuantumModel64 = qfflm::QuantumModel<f64>;
pub type ClassicalModel64 = cfflm::ClassicalModel<f64>;
pub type Dataset64 = trainer::Dataset<f64>;
pub type Adam64 = trainer::Adam<f64>;
