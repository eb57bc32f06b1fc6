use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::scalar::Real;

/// Circuit gates. Qubits are 1-based; rotations are `R_G(θ) = exp(-iθG/2)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate<T> {
    Rz { target: usize, angle: T },
    Ry { target: usize, angle: T },
    /// `Rot(θ1, θ2, θ3) = RZ(θ1)·RY(θ2)·RZ(θ3)`; `RZ(θ3)` acts first.
    Rot { target: usize, angles: [T; 3] },
    Cnot { control: usize, target: usize },
    /// Arbitrary unitary on `targets`; `targets[0]` is the most significant
    /// bit of the local index.
    Dense { matrix: ComplexMatrix<T>, targets: Vec<usize> },
}

impl<T: Real> Gate<T> {
    pub fn rz(target: usize, angle: T) -> Self {
        Gate::Rz { target, angle }
    }

    pub fn ry(target: usize, angle: T) -> Self {
        Gate::Ry { target, angle }
    }

    pub fn rot(target: usize, a: T, b: T, c: T) -> Self {
        Gate::Rot { target, angles: [a, b, c] }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Rz { target, .. } | Gate::Ry { target, .. } | Gate::Rot { target, .. } => {
                vec![*target]
            }
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Dense { targets, .. } => targets.clone(),
        }
    }

    /// The gate's matrix on its own qubits, in the order of [`Gate::qubits`].
    pub fn local_matrix(&self) -> ComplexMatrix<T> {
        match self {
            Gate::Rz { angle, .. } => rz_matrix(*angle),
            Gate::Ry { angle, .. } => ry_matrix(*angle),
            Gate::Rot { angles, .. } => {
                let [a, b, c] = *angles;
                rz_matrix(a)
                    .matmul(&ry_matrix(b))
                    .and_then(|m| m.matmul(&rz_matrix(c)))
                    .expect("2x2 products")
            }
            Gate::Cnot { .. } => {
                let o = Complex::new(T::one(), T::zero());
                let z = Complex::new(T::zero(), T::zero());
                ComplexMatrix::from_rows(
                    4,
                    4,
                    vec![o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z],
                )
                .expect("4x4")
            }
            Gate::Dense { matrix, .. } => matrix.clone(),
        }
    }
}

pub(crate) fn rz_matrix<T: Real>(angle: T) -> ComplexMatrix<T> {
    let half = angle / T::lit(2.0);
    let z = Complex::new(T::zero(), T::zero());
    ComplexMatrix::from_rows(
        2,
        2,
        vec![
            Complex::new(half.cos(), -half.sin()),
            z,
            z,
            Complex::new(half.cos(), half.sin()),
        ],
    )
    .expect("2x2")
}

pub(crate) fn ry_matrix<T: Real>(angle: T) -> ComplexMatrix<T> {
    let half = angle / T::lit(2.0);
    let (s, c) = half.sin_cos();
    ComplexMatrix::from_rows(
        2,
        2,
        vec![
            Complex::new(c, T::zero()),
            Complex::new(-s, T::zero()),
            Complex::new(s, T::zero()),
            Complex::new(c, T::zero()),
        ],
    )
    .expect("2x2")
}
