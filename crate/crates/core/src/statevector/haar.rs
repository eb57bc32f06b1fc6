use num_complex::Complex;
use rand::Rng;

use super::matrix::ComplexMatrix;
use crate::rng::standard_normal;
use crate::scalar::Real;

fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let s = T::FRAC_1_SQRT_2();
    Complex::new(standard_normal::<T, _>(rng) * s, standard_normal::<T, _>(rng) * s)
}

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

fn norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt()
}

/// Removes the components of `v` along the orthonormal `basis`, twice.
fn project_out<T: Real>(v: &mut [Complex<T>], basis: &[Vec<Complex<T>>]) {
    for _ in 0..2 {
        for b in basis {
            let p = dot(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
    }
}

/// Haar-distributed `dim x dim` unitary.
///
/// Columns of a complex Ginibre matrix are orthonormalized by modified
/// Gram-Schmidt with reorthogonalization. Gram-Schmidt yields the QR factor
/// with a positive real diagonal in `R`, which is exactly the phase fix that
/// makes `Q` Haar distributed.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex<T>> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        project_out(&mut v, &cols);
        let n = norm(&v);
        // A Gaussian draw lands in the span of earlier columns with
        // probability zero; redraw if rounding says otherwise.
        if n <= T::epsilon() * T::lit(1e3) {
            continue;
        }
        for x in v.iter_mut() {
            *x /= n;
        }
        cols.push(v);
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            m[(i, j)] = *x;
        }
    }
    m
}

/// Uniformly random unit vector in `C^dim`, the image of a fixed unit vector
/// under a Haar unitary.
pub fn haar_state<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex<T>> {
    loop {
        let mut v: Vec<Complex<T>> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        let n = norm(&v);
        if n > T::zero() {
            for x in v.iter_mut() {
                *x /= n;
            }
            return v;
        }
    }
}

/// A Haar unitary sampled on demand.
///
/// Only the action on the span of the vectors seen so far is materialized.
/// Each new input direction `e` (orthogonal to earlier ones) is sent to a
/// uniformly random unit vector orthogonal to the earlier images, which is
/// the conditional law of `U e` under the Haar measure. Applying it to `k`
/// linearly independent vectors costs `O(k^2 dim)` instead of the `O(dim^3)`
/// of a dense draw.
#[derive(Clone, Debug)]
pub struct LazyHaar<T> {
    dim: usize,
    inputs: Vec<Vec<Complex<T>>>,
    outputs: Vec<Vec<Complex<T>>>,
}

impl<T: Real> LazyHaar<T> {
    pub fn new(dim: usize) -> Self {
        Self { dim, inputs: Vec::new(), outputs: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of input directions fixed so far.
    pub fn rank(&self) -> usize {
        self.inputs.len()
    }

    pub fn apply<R: Rng + ?Sized>(&mut self, v: &[Complex<T>], rng: &mut R) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.dim, "vector length must match the unitary dimension");
        let coeffs: Vec<Complex<T>> = self.inputs.iter().map(|e| dot(e, v)).collect();
        let mut residual = v.to_vec();
        project_out(&mut residual, &self.inputs);
        let r = norm(&residual);
        let scale = norm(v).max(T::min_positive_value());
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.dim];
        if r > scale * T::epsilon() * T::lit(64.0) && self.inputs.len() < self.dim {
            for x in residual.iter_mut() {
                *x /= r;
            }
            let image = loop {
                let mut w: Vec<Complex<T>> =
                    (0..self.dim).map(|_| complex_gaussian(rng)).collect();
                project_out(&mut w, &self.outputs);
                let n = norm(&w);
                if n > T::epsilon() * T::lit(1e3) {
                    for x in w.iter_mut() {
                        *x /= n;
                    }
                    break w;
                }
            };
            // The projection coefficients are recomputed against the
            // enlarged basis so that `v` is reproduced exactly.
            let c_new = dot(&residual, v);
            for (o, y) in out.iter_mut().zip(&image) {
                *o += c_new * y;
            }
            self.inputs.push(residual);
            self.outputs.push(image);
        }
        for (c, img) in coeffs.iter().zip(&self.outputs) {
            for (o, y) in out.iter_mut().zip(img) {
                *o += *c * y;
            }
        }
        out
    }
}
