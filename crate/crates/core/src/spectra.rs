//! Encoding weights and the integer frequency spectra they induce.
//!
//! A variable encoded by gates `exp(-i β_n x Z / 2)` contributes the
//! frequencies `Σ s_n β_n` with `s ∈ {-1, 0, 1}^N`. Multiplicities are kept
//! because degenerate frequencies carry more coefficient weight.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest weight count accepted by [`EncodingSpec::exponential`]; the
/// summed weights `(3^40 - 1)/2` still fit the 63-bit frequency range.
pub const MAX_EXPONENTIAL_QUBITS: usize = 40;

/// Spectra with more distinct frequencies than this are not materialized.
pub const MAX_MATERIALIZED_FREQUENCIES: u64 = 1 << 25;

/// Product lattices larger than this are reported by size only.
pub const LATTICE_MATERIALIZATION_LIMIT: u128 = 1_000_000;

/// Positive integer encoding weights of one variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct EncodingSpec {
    weights: Vec<u64>,
}

impl TryFrom<Vec<u64>> for EncodingSpec {
    type Error = Error;

    fn try_from(weights: Vec<u64>) -> Result<Self> {
        Self::new(weights)
    }
}

impl From<EncodingSpec> for Vec<u64> {
    fn from(spec: EncodingSpec) -> Self {
        spec.weights
    }
}

impl EncodingSpec {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::arg("at least one encoding weight is required"));
        }
        if let Some(pos) = weights.iter().position(|&w| w == 0) {
            return Err(Error::arg(format!("weight {} is zero; weights must be >= 1", pos + 1)));
        }
        let total: u128 = weights.iter().map(|&w| w as u128).sum();
        if total > i64::MAX as u128 {
            return Err(Error::capacity("sum of weights exceeds the 63-bit frequency range"));
        }
        Ok(Self { weights })
    }

    /// `β_n = 3^(n-1)` for `n = 1..=n_weights`.
    pub fn exponential(n_weights: usize) -> Result<Self> {
        if n_weights == 0 || n_weights > MAX_EXPONENTIAL_QUBITS {
            return Err(Error::arg(format!(
                "exponential encoding needs 1..={MAX_EXPONENTIAL_QUBITS} weights, got {n_weights}"
            )));
        }
        Self::new((0..n_weights as u32).map(|k| 3u64.pow(k)).collect())
    }

    /// `β_n = 1` for every gate.
    pub fn naive(n_weights: usize) -> Result<Self> {
        Self::new(vec![1; n_weights])
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Largest frequency, `Σ β_n`.
    pub fn max_frequency(&self) -> u64 {
        self.weights.iter().sum()
    }
}

/// Distinct frequencies in ascending order with their multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencySpectrum {
    support: Vec<i64>,
    multiplicity: Vec<u64>,
}

impl FrequencySpectrum {
    /// The spectrum `{0}` of a variable that is never encoded.
    pub fn constant() -> Self {
        Self { support: vec![0], multiplicity: vec![1] }
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn multiplicity(&self) -> &[u64] {
        &self.multiplicity
    }

    pub fn distinct(&self) -> usize {
        self.support.len()
    }

    /// Total count of sign patterns, `3^N`.
    pub fn total_multiplicity(&self) -> u64 {
        self.multiplicity.iter().sum()
    }

    /// Fourier degree: the largest frequency.
    pub fn d_f(&self) -> u64 {
        *self.support.last().expect("spectrum contains zero") as u64
    }

    /// True when the support is every integer in `[-d_F, d_F]`.
    pub fn is_contiguous(&self) -> bool {
        self.support.len() as u64 == 2 * self.d_f() + 1
    }

    /// Per-variable feature dimension `2 d_F + 1` of a dense spectrum.
    pub fn k(&self) -> Option<u64> {
        self.is_contiguous().then(|| 2 * self.d_f() + 1)
    }

    pub fn multiplicity_of(&self, freq: i64) -> u64 {
        self.support
            .binary_search(&freq)
            .map(|i| self.multiplicity[i])
            .unwrap_or(0)
    }
}

/// Frequency multiset of `enc`, built by the recurrence
/// `Ω(k) = (Ω(k-1) - β_k) ∪ Ω(k-1) ∪ (Ω(k-1) + β_k)` from `Ω(0) = {0}`.
pub fn spectrum(enc: &EncodingSpec) -> Result<FrequencySpectrum> {
    let s = enc.max_frequency();
    let span = 2 * s as u128 + 1;
    if span <= MAX_MATERIALIZED_FREQUENCIES as u128 {
        return Ok(dense_recurrence(enc, s as usize));
    }
    let bound = 3u128.checked_pow(enc.len() as u32).unwrap_or(u128::MAX);
    if bound <= MAX_MATERIALIZED_FREQUENCIES as u128 {
        return Ok(sparse_recurrence(enc));
    }
    Err(Error::capacity(format!(
        "spectrum of {} weights spanning {span} frequencies is too large to materialize",
        enc.len()
    )))
}

fn dense_recurrence(enc: &EncodingSpec, s: usize) -> FrequencySpectrum {
    // counts[i] is the multiplicity of frequency i - s.
    let mut counts = vec![0u64; 2 * s + 1];
    counts[s] = 1;
    let mut reach = 0usize;
    let mut next = counts.clone();
    for &b in enc.weights() {
        let b = b as usize;
        let lo = s - reach;
        let hi = s + reach;
        for v in next[lo - b..=hi + b].iter_mut() {
            *v = 0;
        }
        for i in lo..=hi {
            let c = counts[i];
            if c != 0 {
                next[i - b] += c;
                next[i] += c;
                next[i + b] += c;
            }
        }
        reach += b;
        std::mem::swap(&mut counts, &mut next);
    }
    let (support, multiplicity) = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i as i64 - s as i64, c))
        .unzip();
    FrequencySpectrum { support, multiplicity }
}

fn sparse_recurrence(enc: &EncodingSpec) -> FrequencySpectrum {
    let mut counts: BTreeMap<i64, u64> = BTreeMap::from([(0, 1)]);
    for &b in enc.weights() {
        let b = b as i64;
        let mut next = BTreeMap::new();
        for (&f, &c) in &counts {
            for g in [f - b, f, f + b] {
                *next.entry(g).or_insert(0) += c;
            }
        }
        counts = next;
    }
    let (support, multiplicity) = counts.into_iter().unzip();
    FrequencySpectrum { support, multiplicity }
}

/// Sorted weights satisfy `2 Σ_{j<k} β_j < β_k` for every `k`. This growth
/// condition is sufficient for maximal non-degeneracy but not necessary:
/// `(23, 24)` violates it and still yields nine distinct frequencies.
pub fn satisfies_growth_condition(enc: &EncodingSpec) -> bool {
    let mut w = enc.weights().to_vec();
    w.sort_unstable();
    let mut prefix: u128 = 0;
    for &b in &w {
        if 2 * prefix >= b as u128 {
            return false;
        }
        prefix += b as u128;
    }
    true
}

/// True iff all `3^N` sign patterns give distinct frequencies.
///
/// Decided by [`satisfies_growth_condition`] when it holds, otherwise by
/// counting the materialized spectrum. Spectra too large to materialize
/// are reported as degenerate.
pub fn is_maximally_nondegenerate(enc: &EncodingSpec) -> bool {
    if satisfies_growth_condition(enc) {
        return true;
    }
    match spectrum(enc) {
        Ok(s) => 3u128.checked_pow(enc.len() as u32) == Some(s.distinct() as u128),
        Err(_) => {
            log::warn!("degeneracy of a {}-weight spectrum not decided; reporting false", enc.len());
            false
        }
    }
}

/// True iff the distinct support is every integer in `[-Σβ, Σβ]`.
///
/// Sorted weights with `β_k <= 2 Σ_{j<k} β_j + 1` at every step are dense by
/// induction. Otherwise the spectrum is materialized; spectra too large for
/// that are reported as not dense.
pub fn is_dense(enc: &EncodingSpec) -> bool {
    let mut w = enc.weights().to_vec();
    w.sort_unstable();
    let mut prefix: u128 = 0;
    let mut greedy = true;
    for &b in &w {
        if b as u128 > 2 * prefix + 1 {
            greedy = false;
            break;
        }
        prefix += b as u128;
    }
    if greedy {
        return true;
    }
    match spectrum(enc) {
        Ok(s) => s.is_contiguous(),
        Err(_) => {
            log::warn!("density of a {}-weight spectrum not decided; reporting false", enc.len());
            false
        }
    }
}

/// Cartesian product of per-variable spectra.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductSpectrum {
    pub per_variable: Vec<FrequencySpectrum>,
    /// `Π |Ω_m|`, or `None` when it overflows `u128`.
    pub lattice_size: Option<u128>,
    /// Natural log of the lattice size, always available.
    pub log_lattice_size: f64,
    /// Lattice points in row-major order (variable 1 most significant), only
    /// when the lattice has at most [`LATTICE_MATERIALIZATION_LIMIT`] points.
    pub points: Option<Vec<Vec<i64>>>,
}

/// Product spectrum of `m` variables. `specs` holds either one spec shared by
/// all variables or one per variable.
pub fn product_spectrum(specs: &[EncodingSpec], m: usize) -> Result<ProductSpectrum> {
    if m == 0 {
        return Err(Error::arg("at least one variable is required"));
    }
    if specs.len() != 1 && specs.len() != m {
        return Err(Error::arg(format!(
            "{} encoding specs given for {m} variables",
            specs.len()
        )));
    }
    let mut cache: Vec<FrequencySpectrum> = Vec::with_capacity(specs.len());
    for s in specs {
        cache.push(spectrum(s)?);
    }
    let per_variable: Vec<FrequencySpectrum> = (0..m)
        .map(|i| cache[if specs.len() == 1 { 0 } else { i }].clone())
        .collect();
    let mut size: Option<u128> = Some(1);
    let mut log_size = 0.0;
    for s in &per_variable {
        size = size.and_then(|v| v.checked_mul(s.distinct() as u128));
        log_size += (s.distinct() as f64).ln();
    }
    let points = match size {
        Some(n) if n <= LATTICE_MATERIALIZATION_LIMIT => Some(lattice_points(&per_variable)),
        _ => None,
    };
    Ok(ProductSpectrum { per_variable, lattice_size: size, log_lattice_size: log_size, points })
}

fn lattice_points(per_variable: &[FrequencySpectrum]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for s in per_variable {
        out = out
            .into_iter()
            .flat_map(|p| {
                s.support().iter().map(move |&f| {
                    let mut q = p.clone();
                    q.push(f);
                    q
                })
            })
            .collect();
    }
    out
}

/// `arccos(x)`, mapping `[-1, 1]` onto `[0, π]` so that Fourier features of
/// the result are Chebyshev polynomials of `x`.
pub fn chebyshev_reencode<T: Real>(x: T) -> Result<T> {
    if !(x.abs() <= T::one()) {
        return Err(Error::Domain(format!("chebyshev re-encoding needs |x| <= 1, got {x}")));
    }
    Ok(x.acos())
}
