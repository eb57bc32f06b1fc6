use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qfflm::{Angle, AnsatzSpec, Op};

// All O(1) prefactors in the operation counts below are set to 1.

/// Single-qubit rotations (a `Rot` counts as three) plus CNOTs plus
/// encoding gates. Works beyond the simulator's qubit cap.
pub fn count_gates(spec: &AnsatzSpec) -> Result<usize> {
    Ok(spec.lower::<f64>()?.len())
}

/// `2K^M + R_I + 1 + N_tp (R_II + 1)`: feature construction, one dot
/// product and the gradient of a linear model.
pub fn resrc_classical(k: u64, m: u32, n_tp: &BigUint, r_i: u64, r_ii: u64) -> BigUint {
    resrc_classical_lattice(&BigUint::from(k).pow(m), n_tp, r_i, r_ii)
}

/// [`resrc_classical`] with the feature count `K^M` given directly.
pub fn resrc_classical_lattice(features: &BigUint, n_tp: &BigUint, r_i: u64, r_ii: u64) -> BigUint {
    BigUint::from(2u32) * features + BigUint::from(r_i) + BigUint::one() + n_tp * BigUint::from(r_ii + 1)
}

/// Fully parametrized classical model (`N_tp = K^M`, no extra work): `3K^M + 1`.
pub fn resrc_classical_full(k: u64, m: u32) -> BigUint {
    let f = BigUint::from(k).pow(m);
    resrc_classical_lattice(&f, &f, 0, 0)
}

fn check_eps(eps: f64, name: &str) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::arg(format!("{name} = {eps} outside (0, 1]")))
    }
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite checked")
}

/// `⌈N_gt/ε_f² + 1 + N_tp (2 N_gt/ε_∂f² + 3)⌉` evaluated exactly on the
/// binary values of the two precisions.
pub fn resrc_quantum(n_gt: u64, n_tp: u64, eps_f: f64, eps_df: f64) -> Result<BigUint> {
    check_eps(eps_f, "ε_f")?;
    check_eps(eps_df, "ε_∂f")?;
    let gt = BigRational::from_integer(n_gt.into());
    let ef = exact(eps_f);
    let ed = exact(eps_df);
    let two = BigRational::from_integer(2.into());
    let three = BigRational::from_integer(3.into());
    let total = &gt / (&ef * &ef)
        + BigRational::one()
        + BigRational::from_integer(n_tp.into()) * (two * &gt / (&ed * &ed) + three);
    let c = total.ceil().to_integer();
    Ok(c.to_biguint().expect("count is positive"))
}

/// Floating-point [`resrc_quantum`] before rounding.
pub fn resrc_quantum_f64(n_gt: f64, n_tp: f64, eps_f: f64, eps_df: f64) -> Result<f64> {
    check_eps(eps_f, "ε_f")?;
    check_eps(eps_df, "ε_∂f")?;
    Ok(n_gt / (eps_f * eps_f) + 1.0 + n_tp * (2.0 * n_gt / (eps_df * eps_df) + 3.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Advantage {
    /// `N_gt < ε K^{M/2}`, decided exactly as `N_gt² < ε² K^M`.
    pub holds: bool,
    /// `ln(ε K^{M/2}) - ln N_gt`.
    pub log_margin: f64,
    /// `ln(ε K^{M/2})`.
    pub log_threshold: f64,
}

/// Quantum-advantage feasibility `N_gt < ε K^{M/2}`.
pub fn advantage_criterion(n_gt: u64, eps: f64, k: u64, m: u32) -> Result<Advantage> {
    advantage_lattice(n_gt, eps, &BigUint::from(k).pow(m))
}

/// [`advantage_criterion`] with the feature count `K^M` given directly.
pub fn advantage_lattice(n_gt: u64, eps: f64, features: &BigUint) -> Result<Advantage> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::arg(format!("ε = {eps} must be positive")));
    }
    let e = exact(eps);
    let lhs = BigRational::from_integer(BigUint::from(n_gt).pow(2).into());
    let rhs = &e * &e * BigRational::from_integer(features.clone().into());
    let log_threshold = eps.ln() + 0.5 * log_big(features);
    let log_margin = if n_gt == 0 { f64::INFINITY } else { log_threshold - (n_gt as f64).ln() };
    Ok(Advantage { holds: lhs < rhs, log_margin, log_threshold })
}

/// Precision at which `N_gt = ε K^{M/2}`.
pub fn crossing_epsilon(n_gt: u64, features: &BigUint) -> f64 {
    ((n_gt as f64).ln() - 0.5 * log_big(features)).exp()
}

/// Natural log of a big integer without overflow.
pub fn log_big(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    (v >> shift).to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

/// Resource comparison for one ansatz at precision `ε = ε_f = ε_∂f`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceReport {
    pub n_gt: u64,
    pub n_tp: u64,
    pub epsilon: f64,
    /// Largest per-variable feature count `K`.
    pub k: u64,
    pub m: u32,
    /// `K^M` (product of per-variable feature counts).
    #[serde(serialize_with = "as_decimal")]
    pub features: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub resrc_q: BigUint,
    /// Fully parametrized classical model, `3K^M + 1`.
    #[serde(serialize_with = "as_decimal")]
    pub resrc_c: BigUint,
    /// `resrc_Q < resrc_C`.
    pub advantage: bool,
    pub criterion: Advantage,
    pub crossing_epsilon: f64,
}

/// Gate counts, spectra and both resource totals of `spec`.
pub fn resource_report(spec: &AnsatzSpec, epsilon: f64) -> Result<ResourceReport> {
    let ops = spec.lower::<f64>()?;
    let n_gt = ops.len() as u64;
    let n_tp = spec.param_count() as u64;
    let mut weights = vec![Vec::new(); spec.variables];
    for op in &ops {
        if let Op::Rz { angle: Angle::Data { var, weight }, .. }
        | Op::Ry { angle: Angle::Data { var, weight }, .. } = op
        {
            weights[*var].push(*weight);
        }
    }
    let mut k = 0u64;
    let mut features = BigUint::one();
    for w in &weights {
        // K = 2 d_F + 1 with d_F the summed weights of the variable.
        let kv = 2 * w.iter().sum::<u64>() + 1;
        k = k.max(kv);
        features *= BigUint::from(kv);
    }
    let resrc_q = resrc_quantum(n_gt, n_tp, epsilon, epsilon)?;
    let resrc_c = resrc_classical_lattice(&features, &features, 0, 0);
    let criterion = advantage_lattice(n_gt, epsilon, &features)?;
    Ok(ResourceReport {
        n_gt,
        n_tp,
        epsilon,
        k,
        m: spec.variables as u32,
        crossing_epsilon: crossing_epsilon(n_gt, &features),
        advantage: resrc_q < resrc_c,
        features,
        resrc_q,
        resrc_c,
        criterion,
    })
}
