use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectra::EncodingSpec;
use crate::statevector::{sample_pauli, StateVector, MAX_QUBITS};

/// Rotation angle source.
#[derive(Clone, Debug, PartialEq)]
pub enum Angle<T> {
    Fixed(T),
    /// Trainable parameter `θ_k`.
    Param(usize),
    /// Encoding angle `weight · x_var` (variables are 0-based).
    Data { var: usize, weight: u64 },
}

/// Compiled circuit operation. Qubits are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Op<T> {
    Rz { qubit: usize, angle: Angle<T> },
    Ry { qubit: usize, angle: Angle<T> },
    Cnot { control: usize, target: usize },
}

impl<T> Op<T> {
    fn angle(&self) -> Option<&Angle<T>> {
        match self {
            Op::Rz { angle, .. } | Op::Ry { angle, .. } => Some(angle),
            Op::Cnot { .. } => None,
        }
    }
}

/// A flat gate list measured in `Z` on one qubit.
///
/// Ops before the first data-dependent op form the prefix, whose output
/// state depends on `θ` only and is shared across inputs in batch calls.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    n_qubits: usize,
    n_vars: usize,
    n_params: usize,
    measured: usize,
    ops: Vec<Op<T>>,
    prefix: usize,
    /// Op index of each parameter when every parameter occurs exactly once.
    sites: Option<Vec<usize>>,
}

/// Shifted copies of `θ` for the parameter-shift rule.
struct Shifts<T> {
    plus: Vec<Vec<T>>,
    minus: Vec<Vec<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(
        n_qubits: usize,
        n_vars: usize,
        n_params: usize,
        measured: usize,
        ops: Vec<Op<T>>,
    ) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::capacity(format!(
                "{n_qubits} qubits outside 1..={MAX_QUBITS}"
            )));
        }
        let check = |q: usize| -> Result<()> {
            if q == 0 || q > n_qubits {
                return Err(Error::Index(format!("qubit {q} outside 1..={n_qubits}")));
            }
            Ok(())
        };
        check(measured)?;
        let mut uses = vec![0usize; n_params];
        let mut first_site = vec![usize::MAX; n_params];
        for (i, op) in ops.iter().enumerate() {
            match op {
                Op::Rz { qubit, .. } | Op::Ry { qubit, .. } => check(*qubit)?,
                Op::Cnot { control, target } => {
                    check(*control)?;
                    check(*target)?;
                    if control == target {
                        return Err(Error::Index(format!("CNOT on a single qubit {control}")));
                    }
                }
            }
            match op.angle() {
                Some(Angle::Param(k)) => {
                    if *k >= n_params {
                        return Err(Error::Index(format!("parameter {k} of {n_params}")));
                    }
                    uses[*k] += 1;
                    first_site[*k] = first_site[*k].min(i);
                }
                Some(Angle::Data { var, .. }) if *var >= n_vars => {
                    return Err(Error::Index(format!("variable {var} of {n_vars}")));
                }
                _ => {}
            }
        }
        let sites = uses.iter().all(|&u| u == 1).then_some(first_site);
        let prefix = ops
            .iter()
            .position(|op| matches!(op.angle(), Some(Angle::Data { .. })))
            .unwrap_or(ops.len());
        Ok(Self { n_qubits, n_vars, n_params, measured, ops, prefix, sites })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn measured_qubit(&self) -> usize {
        self.measured
    }

    pub fn ops(&self) -> &[Op<T>] {
        &self.ops
    }

    /// Gate count: every rotation and CNOT counts once.
    pub fn gate_count(&self) -> usize {
        self.ops.len()
    }

    pub fn cnot_count(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Op::Cnot { .. })).count()
    }

    pub fn encoding_gate_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op.angle(), Some(Angle::Data { .. })))
            .count()
    }

    /// Encoding weights of variable `var`, in circuit order.
    pub fn encoding_weights(&self, var: usize) -> Vec<u64> {
        self.ops
            .iter()
            .filter_map(|op| match op.angle() {
                Some(Angle::Data { var: v, weight }) if *v == var => Some(*weight),
                _ => None,
            })
            .collect()
    }

    /// Per-variable encoding specs; `None` for a variable that is never encoded.
    pub fn encoding_specs(&self) -> Vec<Option<EncodingSpec>> {
        (0..self.n_vars)
            .map(|m| EncodingSpec::new(self.encoding_weights(m)).ok())
            .collect()
    }

    /// True when the parameter-shift rule is exact for every parameter.
    pub fn supports_parameter_shift(&self) -> bool {
        self.sites.is_some()
    }

    fn check_inputs(&self, theta: &[T], x: &[T]) -> Result<()> {
        if theta.len() != self.n_params {
            return Err(Error::arg(format!(
                "θ has length {}, circuit has {} parameters",
                theta.len(),
                self.n_params
            )));
        }
        if x.len() != self.n_vars {
            return Err(Error::arg(format!(
                "x has length {}, circuit has {} variables",
                x.len(),
                self.n_vars
            )));
        }
        Ok(())
    }

    fn run(&self, state: &mut StateVector<T>, from: usize, to: usize, theta: &[T], x: &[T]) {
        let value = |a: &Angle<T>| match a {
            Angle::Fixed(v) => *v,
            Angle::Param(k) => theta[*k],
            Angle::Data { var, weight } => T::lit(*weight as f64) * x[*var],
        };
        // Indices were validated at construction, so the kernels cannot fail.
        for op in &self.ops[from..to] {
            let r = match op {
                Op::Rz { qubit, angle } => state.rz(*qubit, value(angle)),
                Op::Ry { qubit, angle } => state.ry(*qubit, value(angle)),
                Op::Cnot { control, target } => state.cnot(*control, *target),
            };
            debug_assert!(r.is_ok());
        }
    }

    fn prefix_state(&self, theta: &[T]) -> StateVector<T> {
        let mut s = StateVector::new(self.n_qubits).expect("validated qubit count");
        self.run(&mut s, 0, self.prefix, theta, &[]);
        s
    }

    fn suffix_value(&self, prefix: &StateVector<T>, theta: &[T], x: &[T]) -> T {
        let mut s = prefix.clone();
        self.run(&mut s, self.prefix, self.ops.len(), theta, x);
        s.expectation_z_unchecked(self.measured)
    }

    /// Final state `U(x; θ)|0⟩`.
    pub fn state(&self, theta: &[T], x: &[T]) -> Result<StateVector<T>> {
        self.check_inputs(theta, x)?;
        let mut s = StateVector::new(self.n_qubits)?;
        self.run(&mut s, 0, self.ops.len(), theta, x);
        Ok(s)
    }

    /// Exact `⟨Z_measured⟩`.
    pub fn evaluate(&self, theta: &[T], x: &[T]) -> Result<T> {
        let s = self.state(theta, x)?;
        Ok(s.expectation_z_unchecked(self.measured))
    }

    /// Exact outputs for many inputs, sharing the prefix state.
    pub fn evaluate_batch(&self, theta: &[T], xs: &[Vec<T>]) -> Result<Vec<T>> {
        for x in xs {
            self.check_inputs(theta, x)?;
        }
        if xs.is_empty() {
            self.check_inputs(theta, &vec![T::zero(); self.n_vars])?;
        }
        let prefix = self.prefix_state(theta);
        Ok(xs.par_iter().map(|x| self.suffix_value(&prefix, theta, x)).collect())
    }

    /// Shot estimate of the output.
    pub fn evaluate_sampled<R: Rng + ?Sized>(
        &self,
        theta: &[T],
        x: &[T],
        shots: u64,
        rng: &mut R,
    ) -> Result<T> {
        let exact = self.evaluate(theta, x)?;
        sample_pauli(exact, shots, rng)
    }

    fn shifts(&self, theta: &[T]) -> Result<Shifts<T>> {
        if self.sites.is_none() {
            return Err(Error::Unsupported(
                "parameter-shift needs every parameter to drive exactly one Pauli rotation".into(),
            ));
        }
        let h = T::FRAC_PI_2();
        let shifted = |sign: T| -> Vec<Vec<T>> {
            (0..self.n_params)
                .map(|k| {
                    let mut t = theta.to_vec();
                    t[k] += sign * h;
                    t
                })
                .collect()
        };
        Ok(Shifts { plus: shifted(T::one()), minus: shifted(-T::one()) })
    }

    /// Parameter-shift gradient `[f(θ + π/2 e_k) - f(θ - π/2 e_k)] / 2`.
    pub fn gradient(&self, theta: &[T], x: &[T]) -> Result<Vec<T>> {
        let (_, grads) = self.values_and_gradients(theta, std::slice::from_ref(&x.to_vec()))?;
        Ok(grads.into_iter().next().expect("one input"))
    }

    /// Outputs and parameter-shift gradients for a batch of inputs.
    ///
    /// Shifted prefix states are computed once per parameter and reused for
    /// every input.
    pub fn values_and_gradients(
        &self,
        theta: &[T],
        xs: &[Vec<T>],
    ) -> Result<(Vec<T>, Vec<Vec<T>>)> {
        for x in xs {
            self.check_inputs(theta, x)?;
        }
        let shifts = self.shifts(theta)?;
        let sites = self.sites.as_ref().expect("checked by shifts");
        let base = self.prefix_state(theta);
        let prefixes: Vec<Option<(StateVector<T>, StateVector<T>)>> = (0..self.n_params)
            .map(|k| {
                (sites[k] < self.prefix).then(|| {
                    (self.prefix_state(&shifts.plus[k]), self.prefix_state(&shifts.minus[k]))
                })
            })
            .collect();
        let half = T::lit(0.5);
        let rows: Vec<(T, Vec<T>)> = xs
            .par_iter()
            .map(|x| {
                let f = self.suffix_value(&base, theta, x);
                let g = (0..self.n_params)
                    .map(|k| {
                        let (fp, fm) = match &prefixes[k] {
                            Some((p, m)) => (
                                self.suffix_value(p, &shifts.plus[k], x),
                                self.suffix_value(m, &shifts.minus[k], x),
                            ),
                            None => (
                                self.suffix_value(&base, &shifts.plus[k], x),
                                self.suffix_value(&base, &shifts.minus[k], x),
                            ),
                        };
                        (fp - fm) * half
                    })
                    .collect();
                (f, g)
            })
            .collect();
        Ok(rows.into_iter().unzip())
    }

    /// Parameter-shift gradient with each shifted circuit estimated from
    /// `shots` measurements.
    pub fn gradient_sampled<R: Rng + ?Sized>(
        &self,
        theta: &[T],
        x: &[T],
        shots: u64,
        rng: &mut R,
    ) -> Result<Vec<T>> {
        self.check_inputs(theta, x)?;
        let shifts = self.shifts(theta)?;
        let half = T::lit(0.5);
        (0..self.n_params)
            .map(|k| {
                let fp = self.evaluate_sampled(&shifts.plus[k], x, shots, rng)?;
                let fm = self.evaluate_sampled(&shifts.minus[k], x, shots, rng)?;
                Ok((fp - fm) * half)
            })
            .collect()
    }

    /// Amplitudes of the final state, for diagnostics.
    pub fn amplitudes(&self, theta: &[T], x: &[T]) -> Result<Vec<Complex<T>>> {
        Ok(self.state(theta, x)?.into_amplitudes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// `RY(θ) RZ(x) RY(π/2)` on one qubit: `f(θ; x) = -sin θ cos x`.
    fn sandwich() -> Circuit<f64> {
        Circuit::new(
            1,
            1,
            1,
            1,
            vec![
                Op::Ry { qubit: 1, angle: Angle::Fixed(FRAC_PI_2) },
                Op::Rz { qubit: 1, angle: Angle::Data { var: 0, weight: 1 } },
                Op::Ry { qubit: 1, angle: Angle::Param(0) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn sandwich_is_minus_cos_at_quarter_turn() {
        let c = sandwich();
        for x in [-3.0, -1.0, 0.0, 0.4, 2.5] {
            let f = c.evaluate(&[FRAC_PI_2], &[x]).unwrap();
            assert!((f + f64::cos(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn sandwich_gradient_matches_analytic_form() {
        let c = sandwich();
        // f(θ; 0) = -sin θ, so the derivative at θ = π/2 vanishes.
        let g = c.gradient(&[FRAC_PI_2], &[0.0]).unwrap();
        assert!(g[0].abs() < 1e-14);
        for (theta, x) in [(0.3, 0.0), (1.1, 0.7), (-2.0, 2.9)] {
            let g = c.gradient(&[theta], &[x]).unwrap();
            assert!((g[0] + f64::cos(theta) * f64::cos(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn reused_parameter_is_unsupported() {
        let c = Circuit::<f64>::new(
            1,
            0,
            1,
            1,
            vec![
                Op::Ry { qubit: 1, angle: Angle::Param(0) },
                Op::Ry { qubit: 1, angle: Angle::Param(0) },
            ],
        )
        .unwrap();
        assert!(!c.supports_parameter_shift());
        assert!(matches!(c.gradient(&[0.1], &[]), Err(Error::Unsupported(_))));
        assert!((c.evaluate(&[0.1], &[]).unwrap() - 0.2f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn construction_validates_indices() {
        let bad_qubit = Circuit::<f64>::new(2, 0, 0, 2, vec![Op::Cnot { control: 1, target: 3 }]);
        assert!(matches!(bad_qubit, Err(Error::Index(_))));
        let bad_param =
            Circuit::<f64>::new(1, 0, 1, 1, vec![Op::Ry { qubit: 1, angle: Angle::Param(1) }]);
        assert!(matches!(bad_param, Err(Error::Index(_))));
        let c = sandwich();
        assert!(matches!(c.evaluate(&[0.0, 1.0], &[0.0]), Err(Error::Argument(_))));
        assert!(matches!(c.evaluate(&[0.0], &[]), Err(Error::Argument(_))));
    }

    #[test]
    fn batch_and_single_evaluation_agree() {
        let c = sandwich();
        let xs: Vec<Vec<f64>> = (0..7).map(|i| vec![-PI + i as f64]).collect();
        let batch = c.evaluate_batch(&[0.8], &xs).unwrap();
        for (x, b) in xs.iter().zip(&batch) {
            assert_eq!(c.evaluate(&[0.8], x).unwrap(), *b);
        }
    }
}
