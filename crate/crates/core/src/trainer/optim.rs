use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

fn beta1() -> f64 {
    ADAM_BETA1
}
fn beta2() -> f64 {
    ADAM_BETA2
}
fn eps() -> f64 {
    ADAM_EPS
}

/// Optimizer choice and hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OptimizerConfig {
    Adam {
        lr: f64,
        #[serde(default = "beta1")]
        beta1: f64,
        #[serde(default = "beta2")]
        beta2: f64,
        #[serde(default = "eps")]
        eps: f64,
    },
    GradientDescent { lr: f64 },
}

impl OptimizerConfig {
    pub fn adam(lr: f64) -> Self {
        OptimizerConfig::Adam { lr, beta1: ADAM_BETA1, beta2: ADAM_BETA2, eps: ADAM_EPS }
    }

    pub fn lr(&self) -> f64 {
        match self {
            OptimizerConfig::Adam { lr, .. } | OptimizerConfig::GradientDescent { lr } => *lr,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lr = self.lr();
        if !(lr > 0.0) || !lr.is_finite() {
            return Err(Error::arg(format!("learning rate {lr} must be positive")));
        }
        if let OptimizerConfig::Adam { beta1, beta2, eps, .. } = self {
            if !(0.0..1.0).contains(beta1) || !(0.0..1.0).contains(beta2) {
                return Err(Error::arg("Adam betas must lie in [0, 1)"));
            }
            if !(*eps > 0.0) {
                return Err(Error::arg("Adam eps must be positive"));
            }
        }
        Ok(())
    }

    pub fn build<T: Real>(&self, n: usize) -> Optimizer<T> {
        match *self {
            OptimizerConfig::Adam { lr, beta1, beta2, eps } => Optimizer::Adam(Adam::with_hyper(
                n,
                T::lit(lr),
                T::lit(beta1),
                T::lit(beta2),
                T::lit(eps),
            )),
            OptimizerConfig::GradientDescent { lr } => Optimizer::Gd(GradientDescent { lr: T::lit(lr), t: 0 }),
        }
    }
}

/// Bias-corrected Adam.
#[derive(Clone, Debug, PartialEq)]
pub struct Adam<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    m: Vec<T>,
    v: Vec<T>,
    t: usize,
}

impl<T: Real> Adam<T> {
    pub fn new(n: usize, lr: T) -> Self {
        Self::with_hyper(n, lr, T::lit(ADAM_BETA1), T::lit(ADAM_BETA2), T::lit(ADAM_EPS))
    }

    pub fn with_hyper(n: usize, lr: T, beta1: T, beta2: T, eps: T) -> Self {
        Self { lr, beta1, beta2, eps, m: vec![T::zero(); n], v: vec![T::zero(); n], t: 0 }
    }

    /// Number of updates taken so far.
    pub fn steps(&self) -> usize {
        self.t
    }

    pub fn step(&mut self, params: &mut [T], grads: &[T]) -> Result<()> {
        check(params, grads, self.m.len(), self.t + 1)?;
        self.t += 1;
        let t = i32::try_from(self.t).unwrap_or(i32::MAX);
        let c1 = T::one() - self.beta1.powi(t);
        let c2 = T::one() - self.beta2.powi(t);
        for k in 0..params.len() {
            let g = grads[k];
            self.m[k] = self.beta1 * self.m[k] + (T::one() - self.beta1) * g;
            self.v[k] = self.beta2 * self.v[k] + (T::one() - self.beta2) * g * g;
            let m_hat = self.m[k] / c1;
            let v_hat = self.v[k] / c2;
            params[k] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

/// Plain gradient descent `θ ← θ - lr·g`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientDescent<T> {
    pub lr: T,
    t: usize,
}

impl<T: Real> GradientDescent<T> {
    pub fn new(lr: T) -> Self {
        Self { lr, t: 0 }
    }

    pub fn step(&mut self, params: &mut [T], grads: &[T]) -> Result<()> {
        check(params, grads, params.len(), self.t + 1)?;
        self.t += 1;
        for (p, g) in params.iter_mut().zip(grads) {
            *p -= self.lr * *g;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Optimizer<T> {
    Adam(Adam<T>),
    Gd(GradientDescent<T>),
}

impl<T: Real> Optimizer<T> {
    pub fn step(&mut self, params: &mut [T], grads: &[T]) -> Result<()> {
        match self {
            Optimizer::Adam(a) => a.step(params, grads),
            Optimizer::Gd(g) => g.step(params, grads),
        }
    }
}

fn check<T: Real>(params: &[T], grads: &[T], n: usize, step: usize) -> Result<()> {
    if params.len() != n || grads.len() != n {
        return Err(Error::arg(format!(
            "optimizer holds {n} parameters, got {} parameters and {} gradients",
            params.len(),
            grads.len()
        )));
    }
    if let Some(k) = grads.iter().position(|g| !g.is_finite()) {
        return Err(Error::Training {
            step,
            message: format!("gradient component {k} is {}", grads[k]),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params() {
        let mut a = Adam::new(3, 0.1);
        let mut p = vec![1.0, -2.0, 0.5];
        a.step(&mut p, &[0.0; 3]).unwrap();
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn first_step_magnitude_is_lr() {
        for g in [1e-3f64, 0.7, 42.0] {
            let mut a = Adam::new(1, 0.03);
            let mut p = vec![0.0];
            a.step(&mut p, &[g]).unwrap();
            let oracle = 0.03 * g / (g + 1e-8);
            assert!((p[0] + oracle).abs() < 1e-15);
        }
    }

    #[test]
    fn nan_gradient_is_a_training_error() {
        let mut a = Adam::new(2, 0.1);
        let mut p = vec![0.0, 0.0];
        match a.step(&mut p, &[0.0, f64::NAN]) {
            Err(Error::Training { step: 1, message }) => assert!(message.contains("component 1")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(a.step(&mut p, &[0.0]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::adam(0.0).validate().is_err());
        assert!(OptimizerConfig::adam(0.03).validate().is_ok());
        let c: OptimizerConfig = serde_json::from_str(r#"{"kind":"adam","lr":0.05}"#).unwrap();
        assert_eq!(c, OptimizerConfig::adam(0.05));
    }
}
