use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfflm::{AnsatzSpec, QuantumModel};
use crate::rng::{stream, uniform_angle};
use crate::scalar::{pairwise_sum, Real};
use crate::statevector::{haar_unitary, ComplexMatrix, LazyHaar, StateVector};

/// Largest Hilbert dimension for which Haar blocks are drawn as dense matrices.
pub const DENSE_HAAR_MAX_DIM: usize = 64;

/// Largest `MN` accepted in Haar mode.
pub const MAX_HAAR_QUBITS: usize = 12;

/// Fewest Monte-Carlo trials accepted.
pub const MIN_TRIALS: usize = 100;

/// Where the differentiated rotation `RY_μ(θ)` sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlateauCase {
    /// Inside the middle of three trainable modules, Haar on both sides.
    I,
    /// First gate of the first module, acting on `|0…0⟩`.
    II,
    /// Last gate of the last module, right before measurement.
    III,
}

impl PlateauCase {
    pub const ALL: [PlateauCase; 3] = [PlateauCase::I, PlateauCase::II, PlateauCase::III];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlateauMode {
    /// Trainable blocks are exact Haar unitaries.
    Haar,
    /// The layered parallel ansatz with uniform random angles.
    Circuit {
        layers: usize,
        /// Differentiated parameter; defaults to the first (case II),
        /// last (case III) or middle (case I) angle.
        #[serde(default)]
        param: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateauConfig {
    pub variables: usize,
    pub qubits: usize,
    pub trials: usize,
    pub mode: PlateauMode,
    /// Gradient placement; `None` estimates only the output moments.
    #[serde(default)]
    pub case: Option<PlateauCase>,
    /// Qubit (1-based) carrying the differentiated rotation.
    #[serde(default = "one")]
    pub mu: usize,
    /// Fixed input; defaults to zeros.
    #[serde(default)]
    pub x: Option<Vec<f64>>,
    /// Label in the loss `(f - y)²`.
    #[serde(default)]
    pub y: f64,
    pub seed: u64,
}

fn one() -> usize {
    1
}

impl PlateauConfig {
    pub fn haar(variables: usize, qubits: usize, trials: usize, seed: u64) -> Self {
        Self {
            variables,
            qubits,
            trials,
            mode: PlateauMode::Haar,
            case: None,
            mu: 1,
            x: None,
            y: 0.0,
            seed,
        }
    }

    pub fn with_case(mut self, case: PlateauCase, mu: usize) -> Self {
        self.case = Some(case);
        self.mu = mu;
        self
    }

    pub fn total_qubits(&self) -> usize {
        self.variables * self.qubits
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.total_qubits();
        if n == 0 {
            return Err(Error::arg("variables and qubits must be at least 1"));
        }
        if self.trials < MIN_TRIALS {
            return Err(Error::arg(format!("at least {MIN_TRIALS} trials are required")));
        }
        if matches!(self.mode, PlateauMode::Haar) && n > MAX_HAAR_QUBITS {
            return Err(Error::capacity(format!(
                "Haar mode supports at most {MAX_HAAR_QUBITS} qubits, got {n}"
            )));
        }
        if self.mu == 0 || self.mu > n {
            return Err(Error::Index(format!("rotated qubit {} outside 1..={n}", self.mu)));
        }
        if let Some(x) = &self.x {
            if x.len() != self.variables {
                return Err(Error::arg(format!("{} inputs for {} variables", x.len(), self.variables)));
            }
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    /// Unbiased sample variance.
    pub var: f64,
}

impl Estimate {
    pub fn from_samples(v: &[f64]) -> Self {
        let n = v.len() as f64;
        let mean = pairwise_sum(v) / n;
        let dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = if v.len() > 1 { pairwise_sum(&dev) / (n - 1.0) } else { 0.0 };
        Self { mean, se: (var / n).sqrt(), var }
    }

    /// `(mean - expected) / se`; zero when both coincide exactly.
    pub fn zscore(&self, expected: f64) -> f64 {
        let d = self.mean - expected;
        if d == 0.0 {
            0.0
        } else {
            d / self.se
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientStats {
    pub case: PlateauCase,
    pub mu: usize,
    /// `∂f/∂θ`.
    pub grad_f: Estimate,
    /// `(∂f/∂θ)²`.
    pub grad_f_sq: Estimate,
    /// Two-design prediction of `⟨(∂f/∂θ)²⟩` (Haar mode only).
    pub predicted_grad_f_sq: Option<f64>,
    /// `∂L/∂θ` with `L = (f - y)²`.
    pub grad_loss: Estimate,
    pub bound: VarianceBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlateauReport {
    pub variables: usize,
    pub qubits: usize,
    pub d: u64,
    pub trials: usize,
    pub mode: PlateauMode,
    pub f: Estimate,
    pub f_sq: Estimate,
    /// `1/(d+1)`.
    pub predicted_f_sq: f64,
    pub zscore_mean_f: f64,
    pub zscore_f_sq: f64,
    pub gradient: Option<GradientStats>,
}

/// Case bound on `Var[∂L/∂θ]` with the two-design constants it uses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceBound {
    pub d: u64,
    pub case: PlateauCase,
    pub bound: f64,
    /// `1/(d+1)`.
    pub gamma_ii: f64,
    /// `-d/(d²-1)`.
    pub gamma_iii_mean: f64,
}

/// Case I `8d²/((d+1)(d²-1))`, case II `8d/(d²-1)`, case III `16/(d+1)`.
pub fn variance_bounds(d: u64, case: PlateauCase) -> Result<VarianceBound> {
    if d < 2 {
        return Err(Error::arg(format!("dimension {d} must be at least 2")));
    }
    let x = d as f64;
    let bound = match case {
        PlateauCase::I => 8.0 * x * x / ((x + 1.0) * (x * x - 1.0)),
        PlateauCase::II => 8.0 * x / (x * x - 1.0),
        PlateauCase::III => 16.0 / (x + 1.0),
    };
    Ok(VarianceBound {
        d,
        case,
        bound,
        gamma_ii: 1.0 / (x + 1.0),
        gamma_iii_mean: -x / (x * x - 1.0),
    })
}

/// Haar average of `(∂f/∂θ)²` for `f = ⟨Z⟩` and `RY_μ(θ) = exp(-iθY_μ/2)`.
///
/// Both placements reduce to `⟨ψ|C|ψ⟩²` with `C = (i/2)[Y_μ, O]`.
/// Case I: `ψ` is Haar random, so the average is `tr C²/(d(d+1))` and the
/// second-moment Weingarten term gives `tr C² = d³/(2(d²-1))`, hence
/// `d²/(2(d+1)(d²-1))`. Case II: `ψ` is real, so `Y_μψ ⟂ ψ` and
/// `∂f = -Im⟨Y_μψ|O|ψ⟩` with a circularly symmetric off-diagonal element of
/// mean square `d/(d²-1)`, hence `d/(2(d²-1))`. In case III the rotation
/// meets `Z` directly: `1/(d+1)` when `μ` is the measured qubit and zero
/// otherwise, since `RY_μ` then commutes with the observable.
pub fn predicted_grad_f_sq(d: u64, case: PlateauCase, mu_is_measured: bool) -> f64 {
    let x = d as f64;
    match case {
        PlateauCase::I => x * x / (2.0 * (x + 1.0) * (x * x - 1.0)),
        PlateauCase::II => x / (2.0 * (x * x - 1.0)),
        PlateauCase::III => {
            if mu_is_measured {
                1.0 / (x + 1.0)
            } else {
                0.0
            }
        }
    }
}

enum HaarBlock<T> {
    Dense(ComplexMatrix<T>),
    Lazy(LazyHaar<T>),
}

impl<T: Real> HaarBlock<T> {
    fn draw<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        if dim <= DENSE_HAAR_MAX_DIM {
            HaarBlock::Dense(haar_unitary(dim, rng))
        } else {
            HaarBlock::Lazy(LazyHaar::new(dim))
        }
    }

    fn apply<R: Rng + ?Sized>(&mut self, v: &[Complex<T>], rng: &mut R) -> Vec<Complex<T>> {
        match self {
            HaarBlock::Dense(u) => {
                let mut out = vec![Complex::new(T::zero(), T::zero()); v.len()];
                u.apply_to(v, &mut out);
                out
            }
            HaarBlock::Lazy(u) => u.apply(v, rng),
        }
    }
}

/// Applies the exponential encoding `V(x)` of every variable.
fn encode<T: Real>(amps: Vec<Complex<T>>, x: &[T], qubits: usize) -> StateVector<T> {
    let mut sv = StateVector::from_amplitudes(amps).expect("normalized state");
    for (m, &xm) in x.iter().enumerate() {
        let mut w = T::one();
        for n in 0..qubits {
            sv.rz(m * qubits + n + 1, w * xm).expect("qubit in range");
            w *= T::lit(3.0);
        }
    }
    sv
}

fn basis<T: Real>(dim: usize) -> Vec<Complex<T>> {
    let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
    v[0] = Complex::new(T::one(), T::zero());
    v
}

fn ry<T: Real>(amps: Vec<Complex<T>>, q: usize, angle: T) -> Vec<Complex<T>> {
    let mut sv = StateVector::from_amplitudes(amps).expect("normalized state");
    sv.ry(q, angle).expect("qubit in range");
    sv.into_amplitudes()
}

fn z<T: Real>(sv: &StateVector<T>, q: usize) -> T {
    sv.expectation_z(q).expect("qubit in range")
}

/// One Haar-mode trial: `(f, ∂f)` at `θ` uniform, `∂f` zero without a case.
fn haar_trial<T: Real, R: Rng + ?Sized>(
    cfg: &PlateauConfig,
    x: &[T],
    rng: &mut R,
) -> (T, T) {
    let n = cfg.total_qubits();
    let dim = 1usize << n;
    let meas = n;
    let half_pi = T::FRAC_PI_2();
    let measure = |amps: Vec<Complex<T>>, x: &[T], rng: &mut R, w: &mut HaarBlock<T>| {
        let after_v = encode(amps, x, cfg.qubits).into_amplitudes();
        let out = StateVector::from_amplitudes(w.apply(&after_v, rng)).expect("unitary output");
        z(&out, meas)
    };
    let Some(case) = cfg.case else {
        let mut w1 = HaarBlock::draw(dim, rng);
        let mut w2 = HaarBlock::draw(dim, rng);
        let psi = w1.apply(&basis(dim), rng);
        return (measure(psi, x, rng, &mut w2), T::zero());
    };
    let theta: T = uniform_angle(rng);
    let shifts = [T::zero(), half_pi, -half_pi];
    let values: Vec<T> = match case {
        PlateauCase::I => {
            let mut w1 = HaarBlock::draw(dim, rng);
            let mut inner = HaarBlock::draw(dim, rng);
            let mut outer = HaarBlock::draw(dim, rng);
            let mut w3 = HaarBlock::draw(dim, rng);
            let psi = w1.apply(&basis(dim), rng);
            let psi = encode(psi, x, cfg.qubits).into_amplitudes();
            let psi = inner.apply(&psi, rng);
            shifts
                .iter()
                .map(|&s| {
                    let v = outer.apply(&ry(psi.clone(), cfg.mu, theta + s), rng);
                    measure(v, x, rng, &mut w3)
                })
                .collect()
        }
        PlateauCase::II => {
            let mut outer = HaarBlock::draw(dim, rng);
            let mut w2 = HaarBlock::draw(dim, rng);
            shifts
                .iter()
                .map(|&s| {
                    let v = outer.apply(&ry(basis(dim), cfg.mu, theta + s), rng);
                    measure(v, x, rng, &mut w2)
                })
                .collect()
        }
        PlateauCase::III => {
            let mut w1 = HaarBlock::draw(dim, rng);
            let mut inner = HaarBlock::draw(dim, rng);
            let psi = w1.apply(&basis(dim), rng);
            let psi = encode(psi, x, cfg.qubits).into_amplitudes();
            let psi = inner.apply(&psi, rng);
            shifts
                .iter()
                .map(|&s| {
                    let sv = StateVector::from_amplitudes(ry(psi.clone(), cfg.mu, theta + s))
                        .expect("normalized state");
                    z(&sv, meas)
                })
                .collect()
        }
    };
    (values[0], (values[1] - values[2]) * T::lit(0.5))
}

/// Monte-Carlo moments of the model output and, with a case set, of one
/// gradient component. Trial `t` draws from stream `t` of the seed.
pub fn plateau_stats<T: Real>(cfg: &PlateauConfig) -> Result<PlateauReport> {
    cfg.validate()?;
    let n = cfg.total_qubits();
    let d = 1u64 << n;
    let x: Vec<T> = cfg
        .x
        .clone()
        .unwrap_or_else(|| vec![0.0; cfg.variables])
        .into_iter()
        .map(T::lit)
        .collect();

    let samples: Vec<(T, T)> = match &cfg.mode {
        PlateauMode::Haar => (0..cfg.trials)
            .into_par_iter()
            .map(|t| haar_trial(cfg, &x, &mut stream(cfg.seed, t as u64)))
            .collect(),
        PlateauMode::Circuit { layers, param } => {
            let spec = AnsatzSpec::parallel_exponential(cfg.variables, cfg.qubits, *layers)?;
            let model = QuantumModel::<T>::from_spec(&spec)?;
            let p = model.n_params();
            let k = match (*param, cfg.case) {
                (Some(k), _) => k,
                (None, Some(PlateauCase::III)) => p.saturating_sub(1),
                (None, Some(PlateauCase::I)) => p / 2,
                (None, _) => 0,
            };
            if cfg.case.is_some() && k >= p {
                return Err(Error::Index(format!("parameter {k} outside 0..{p}")));
            }
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let theta = model.init_params(&mut stream(cfg.seed, t as u64));
                    let f = model.evaluate(&theta, &x)?;
                    let g = if cfg.case.is_some() { model.gradient(&theta, &x)?[k] } else { T::zero() };
                    Ok((f, g))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };

    let fs: Vec<f64> = samples.iter().map(|s| s.0.as_f64()).collect();
    let f = Estimate::from_samples(&fs);
    let f_sq = Estimate::from_samples(&fs.iter().map(|v| v * v).collect::<Vec<_>>());
    let predicted_f_sq = 1.0 / (d as f64 + 1.0);

    let gradient = match cfg.case {
        None => None,
        Some(case) => {
            let gs: Vec<f64> = samples.iter().map(|s| s.1.as_f64()).collect();
            let gl: Vec<f64> = fs.iter().zip(&gs).map(|(f, g)| 2.0 * (f - cfg.y) * g).collect();
            let predicted = matches!(cfg.mode, PlateauMode::Haar)
                .then(|| predicted_grad_f_sq(d, case, cfg.mu == n));
            Some(GradientStats {
                case,
                mu: cfg.mu,
                grad_f: Estimate::from_samples(&gs),
                grad_f_sq: Estimate::from_samples(&gs.iter().map(|v| v * v).collect::<Vec<_>>()),
                predicted_grad_f_sq: predicted,
                grad_loss: Estimate::from_samples(&gl),
                bound: variance_bounds(d.max(2), case)?,
            })
        }
    };

    Ok(PlateauReport {
        variables: cfg.variables,
        qubits: cfg.qubits,
        d,
        trials: cfg.trials,
        mode: cfg.mode.clone(),
        zscore_mean_f: f.zscore(0.0),
        zscore_f_sq: f_sq.zscore(predicted_f_sq),
        f,
        f_sq,
        predicted_f_sq,
        gradient,
    })
}

/// Least-squares line through `(MN, ln⟨f²⟩)`; `⟨f²⟩ ∝ α^{-MN}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub alpha: f64,
}

pub fn fit_decay(points: &[(usize, f64)]) -> Result<DecayFit> {
    if points.len() < 2 {
        return Err(Error::arg("a decay fit needs at least two points"));
    }
    if points.iter().any(|p| !(p.1 > 0.0)) {
        return Err(Error::Domain("second moments must be positive".into()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::arg("decay fit needs distinct qubit counts"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(DecayFit { slope, intercept: my - slope * mx, alpha: (-slope).exp() })
}
