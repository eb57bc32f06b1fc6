//! Exact statevector simulation.
//!
//! Qubits are numbered from 1, and qubit 1 is the most significant bit of the
//! basis index. Rotations follow `R_G(θ) = exp(-iθG/2)`. Single-qubit and
//! CNOT gates are applied in place by stride arithmetic; dense unitaries take
//! a slower gather/scatter path.

mod gate;
mod haar;
mod matrix;

pub use gate::Gate;
pub use haar::{haar_state, haar_unitary, LazyHaar};
pub use matrix::ComplexMatrix;

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest register [`StateVector::new`] accepts.
pub const MAX_QUBITS: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// The all-zeros basis state on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::capacity(format!(
                "{n_qubits} qubits requested, supported range is 1..={MAX_QUBITS}"
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits, amps })
    }

    /// Wraps an amplitude vector whose length is a power of two. The caller
    /// is responsible for normalization.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::arg(format!("amplitude length {len} is not 2^n with n >= 1")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::capacity(format!("{n_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Resets to the all-zeros basis state without reallocating.
    pub fn reset(&mut self) {
        for a in self.amps.iter_mut() {
            *a = Complex::new(T::zero(), T::zero());
        }
        self.amps[0] = Complex::new(T::one(), T::zero());
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.n_qubits {
            return Err(Error::Index(format!(
                "qubit {q} outside 1..={}",
                self.n_qubits
            )));
        }
        Ok(())
    }

    #[inline]
    fn stride(&self, q: usize) -> usize {
        1 << (self.n_qubits - q)
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate<T>) -> Result<()> {
        match gate {
            Gate::Rz { target, angle } => self.rz(*target, *angle),
            Gate::Ry { target, angle } => self.ry(*target, *angle),
            Gate::Rot { target, angles } => {
                self.check_qubit(*target)?;
                self.rz(*target, angles[2])?;
                self.ry(*target, angles[1])?;
                self.rz(*target, angles[0])
            }
            Gate::Cnot { control, target } => self.cnot(*control, *target),
            Gate::Dense { matrix, targets } => self.dense(matrix, targets),
        }
    }

    /// Consuming form of [`StateVector::apply`].
    pub fn apply_gate(mut self, gate: &Gate<T>) -> Result<Self> {
        self.apply(gate)?;
        Ok(self)
    }

    pub fn rz(&mut self, q: usize, angle: T) -> Result<()> {
        self.check_qubit(q)?;
        let half = angle / T::lit(2.0);
        let (s, c) = half.sin_cos();
        let lo = Complex::new(c, -s);
        let hi = Complex::new(c, s);
        let stride = self.stride(q);
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (a, b) = block.split_at_mut(stride);
            for x in a.iter_mut() {
                *x *= lo;
            }
            for x in b.iter_mut() {
                *x *= hi;
            }
        }
        Ok(())
    }

    pub fn ry(&mut self, q: usize, angle: T) -> Result<()> {
        self.check_qubit(q)?;
        let half = angle / T::lit(2.0);
        let (s, c) = half.sin_cos();
        let stride = self.stride(q);
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (a, b) = block.split_at_mut(stride);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u * c - v * s;
                *y = u * s + v * c;
            }
        }
        Ok(())
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::Index(format!("CNOT control and target both {control}")));
        }
        let cmask = self.stride(control);
        let tmask = self.stride(target);
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
        Ok(())
    }

    /// Applies an arbitrary unitary on `targets` (`targets[0]` is the most
    /// significant bit of the local index).
    pub fn dense(&mut self, matrix: &ComplexMatrix<T>, targets: &[usize]) -> Result<()> {
        let k = targets.len();
        if k == 0 || k > self.n_qubits {
            return Err(Error::Index(format!("{k} targets on {} qubits", self.n_qubits)));
        }
        for (i, &q) in targets.iter().enumerate() {
            self.check_qubit(q)?;
            if targets[..i].contains(&q) {
                return Err(Error::Index(format!("repeated target qubit {q}")));
            }
        }
        let local = 1usize << k;
        if matrix.rows() != local || matrix.cols() != local {
            return Err(Error::Validation(format!(
                "{}x{} matrix on {k} qubits",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.unitarity_defect();
        if !(defect <= unitarity_tolerance::<T>(local)) {
            return Err(Error::Validation(format!(
                "matrix is not unitary (max |U†U - I| = {defect})"
            )));
        }
        let masks: Vec<usize> = targets.iter().map(|&q| self.stride(q)).collect();
        let all: usize = masks.iter().sum();
        let offsets: Vec<usize> = (0..local)
            .map(|l| {
                masks
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| l & (1 << (k - 1 - j)) != 0)
                    .map(|(_, m)| m)
                    .sum()
            })
            .collect();
        let mut input = vec![Complex::new(T::zero(), T::zero()); local];
        let mut output = input.clone();
        for base in 0..self.amps.len() {
            if base & all != 0 {
                continue;
            }
            for (slot, off) in input.iter_mut().zip(&offsets) {
                *slot = self.amps[base + off];
            }
            matrix.apply_to(&input, &mut output);
            for (val, off) in output.iter().zip(&offsets) {
                self.amps[base + off] = *val;
            }
        }
        Ok(())
    }

    /// `⟨Z_q⟩`, with `+1` for basis states whose bit `q` is 0.
    pub fn expectation_z(&self, q: usize) -> Result<T> {
        self.check_qubit(q)?;
        Ok(self.expectation_z_unchecked(q))
    }

    pub(crate) fn expectation_z_unchecked(&self, q: usize) -> T {
        let stride = self.stride(q);
        let mut acc = T::zero();
        for block in self.amps.chunks_exact(2 * stride) {
            let (a, b) = block.split_at(stride);
            for (x, y) in a.iter().zip(b) {
                acc += x.norm_sqr() - y.norm_sqr();
            }
        }
        acc
    }

    /// Shot estimate of `⟨Z_q⟩`: the mean of `shots` Bernoulli `±1` outcomes.
    pub fn sample_expectation_z<R: Rng + ?Sized>(
        &self,
        q: usize,
        shots: u64,
        rng: &mut R,
    ) -> Result<T> {
        let exact = self.expectation_z(q)?;
        sample_pauli(exact, shots, rng)
    }
}

/// Draws `shots` outcomes of a `±1` observable with the given mean and
/// returns their average.
pub fn sample_pauli<T: Real, R: Rng + ?Sized>(mean: T, shots: u64, rng: &mut R) -> Result<T> {
    if shots == 0 {
        return Err(Error::arg("shots must be at least 1"));
    }
    let p = ((1.0 + mean.as_f64()) / 2.0).clamp(0.0, 1.0);
    let plus = Binomial::new(shots, p)
        .map_err(|e| Error::arg(format!("binomial parameters: {e}")))?
        .sample(rng);
    let shots_f = shots as f64;
    Ok(T::lit((2.0 * plus as f64 - shots_f) / shots_f))
}

/// Tolerance for `|U†U - I|` on a `dim`-dimensional unitary: 1e-10 for
/// `f64`, widened by the machine epsilon for lower precisions.
pub(crate) fn unitarity_tolerance<T: Real>(dim: usize) -> T {
    let eps_based = T::epsilon() * T::lit(100.0) * T::from_usize_lossy(dim);
    eps_based.max(T::lit(1e-10))
}
