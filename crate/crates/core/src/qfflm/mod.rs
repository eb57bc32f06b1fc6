//! Quantum Fourier-featured linear models.
//!
//! An [`AnsatzSpec`] compiles to a [`Circuit`] of `RZ`, `RY` and `CNOT`
//! operations. The model output `⟨Z⟩` is a finite Fourier series in the
//! inputs whose frequencies are the encoding spectra; [`QuantumModel`]
//! recovers its coefficients by an exact DFT on a Nyquist grid.

mod ansatz;
mod circuit;
mod coefficients;

pub use ansatz::{AnsatzSpec, EncodingGate, Entangler, Rotation, Topology, ANSATZ_VERSION};
pub use circuit::{Angle, Circuit, Op};
pub use coefficients::{dft, grid_inputs, grid_points, FourierCoefficients, MAX_GRID_POINTS};

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::uniform_angle;
use crate::scalar::Real;
use crate::spectra::{spectrum, FrequencySpectrum};

/// A compiled circuit together with the frequency spectrum of each input.
#[derive(Clone, Debug)]
pub struct QuantumModel<T> {
    spec: Option<AnsatzSpec>,
    circuit: Circuit<T>,
    spectra: Vec<FrequencySpectrum>,
}

impl<T: Real> QuantumModel<T> {
    pub fn from_spec(spec: &AnsatzSpec) -> Result<Self> {
        let mut model = Self::from_circuit(spec.compile()?)?;
        model.spec = Some(spec.clone());
        Ok(model)
    }

    /// Wraps a hand-built circuit; spectra are read off its data gates.
    pub fn from_circuit(circuit: Circuit<T>) -> Result<Self> {
        let spectra = circuit
            .encoding_specs()
            .iter()
            .map(|e| match e {
                Some(e) => spectrum(e),
                None => Ok(FrequencySpectrum::constant()),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { spec: None, circuit, spectra })
    }

    pub fn spec(&self) -> Option<&AnsatzSpec> {
        self.spec.as_ref()
    }

    pub fn circuit(&self) -> &Circuit<T> {
        &self.circuit
    }

    pub fn spectra(&self) -> &[FrequencySpectrum] {
        &self.spectra
    }

    pub fn n_params(&self) -> usize {
        self.circuit.n_params()
    }

    pub fn n_vars(&self) -> usize {
        self.circuit.n_vars()
    }

    /// Fourier degree of each variable.
    pub fn degrees(&self) -> Vec<usize> {
        self.spectra.iter().map(|s| s.d_f() as usize).collect()
    }

    /// Independent uniform angles on `[-π, π)`.
    pub fn init_params<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        (0..self.n_params()).map(|_| uniform_angle(rng)).collect()
    }

    pub fn evaluate(&self, theta: &[T], x: &[T]) -> Result<T> {
        self.circuit.evaluate(theta, x)
    }

    pub fn evaluate_batch(&self, theta: &[T], xs: &[Vec<T>]) -> Result<Vec<T>> {
        self.circuit.evaluate_batch(theta, xs)
    }

    pub fn evaluate_sampled<R: Rng + ?Sized>(
        &self,
        theta: &[T],
        x: &[T],
        shots: u64,
        rng: &mut R,
    ) -> Result<T> {
        self.circuit.evaluate_sampled(theta, x, shots, rng)
    }

    pub fn gradient(&self, theta: &[T], x: &[T]) -> Result<Vec<T>> {
        self.circuit.gradient(theta, x)
    }

    pub fn values_and_gradients(
        &self,
        theta: &[T],
        xs: &[Vec<T>],
    ) -> Result<(Vec<T>, Vec<Vec<T>>)> {
        self.circuit.values_and_gradients(theta, xs)
    }

    pub fn gradient_sampled<R: Rng + ?Sized>(
        &self,
        theta: &[T],
        x: &[T],
        shots: u64,
        rng: &mut R,
    ) -> Result<Vec<T>> {
        self.circuit.gradient_sampled(theta, x, shots, rng)
    }

    /// Smallest odd grid that resolves every variable's spectrum.
    pub fn nyquist_grid(&self) -> usize {
        2 * self.degrees().into_iter().max().unwrap_or(0) + 1
    }

    /// Coefficients from a DFT of the model on a `g^M` grid (`g` odd,
    /// defaults to the Nyquist size). Bins outside the spectra are reported
    /// as residual.
    pub fn fourier_coefficients(
        &self,
        theta: &[T],
        grid: Option<usize>,
    ) -> Result<FourierCoefficients<T>> {
        let g = grid.unwrap_or_else(|| self.nyquist_grid());
        if g < self.nyquist_grid() {
            return Err(Error::arg(format!(
                "grid of {g} points is below the Nyquist size {}",
                self.nyquist_grid()
            )));
        }
        coefficients::check_grid(g, self.n_vars())?;
        let xs = grid_inputs::<T>(g, self.n_vars());
        let values = self.evaluate_batch(theta, &xs)?;
        FourierCoefficients::from_samples(&values, g, &self.spectra)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn zero_parameters_give_one_everywhere() {
        let spec = AnsatzSpec::parallel_exponential(2, 2, 2).unwrap();
        let model = QuantumModel::<f64>::from_spec(&spec).unwrap();
        let theta = vec![0.0; model.n_params()];
        for x in [[0.0, 0.0], [1.3, -2.2], [PI, 0.5]] {
            assert!((model.evaluate(&theta, &x).unwrap() - 1.0).abs() < 1e-14);
        }
        let fc = model.fourier_coefficients(&theta, None).unwrap();
        assert!((fc.get(&[0, 0]).re - 1.0).abs() < 1e-13);
        assert!(fc.coefficients().iter().map(|c| c.norm()).sum::<f64>() - 1.0 < 1e-12);
    }

    #[test]
    fn minus_cos_construction_coefficients() {
        let circuit = Circuit::new(
            1,
            1,
            0,
            1,
            vec![
                Op::Ry { qubit: 1, angle: Angle::Fixed(FRAC_PI_2) },
                Op::Rz { qubit: 1, angle: Angle::Data { var: 0, weight: 1 } },
                Op::Ry { qubit: 1, angle: Angle::Fixed(FRAC_PI_2) },
            ],
        )
        .unwrap();
        let model = QuantumModel::<f64>::from_circuit(circuit).unwrap();
        let fc = model.fourier_coefficients(&[], None).unwrap();
        assert!((fc.get(&[1]).re + 0.5).abs() < 1e-15);
        assert!((fc.get(&[-1]).re + 0.5).abs() < 1e-15);
        assert!(fc.get(&[0]).norm() < 1e-15);
        let c = fc.coefficient_vector().unwrap();
        assert!(c[0].abs() < 1e-15);
        assert!((c[1] + 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(c[2].abs() < 1e-15);
    }

    #[test]
    fn integer_spectrum_is_two_pi_periodic() {
        let spec = AnsatzSpec::parallel_exponential(1, 4, 1).unwrap();
        let model = QuantumModel::<f64>::from_spec(&spec).unwrap();
        let theta = model.init_params(&mut seeded(7));
        let a = model.evaluate(&theta, &[0.0]).unwrap();
        let b = model.evaluate(&theta, &[2.0 * PI]).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn sampled_evaluation_is_reproducible() {
        let spec = AnsatzSpec::parallel_exponential(1, 2, 1).unwrap();
        let model = QuantumModel::<f64>::from_spec(&spec).unwrap();
        let zeros = vec![0.0; model.n_params()];
        assert_eq!(model.evaluate_sampled(&zeros, &[0.3], 11, &mut seeded(1)).unwrap(), 1.0);
        let theta = model.init_params(&mut seeded(2));
        let a = model.evaluate_sampled(&theta, &[0.3], 1000, &mut seeded(5)).unwrap();
        let b = model.evaluate_sampled(&theta, &[0.3], 1000, &mut seeded(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_below_nyquist_is_rejected() {
        let spec = AnsatzSpec::parallel_exponential(1, 3, 1).unwrap();
        let model = QuantumModel::<f64>::from_spec(&spec).unwrap();
        let theta = vec![0.0; model.n_params()];
        assert_eq!(model.nyquist_grid(), 27);
        assert!(model.fourier_coefficients(&theta, Some(25)).is_err());
    }
}
