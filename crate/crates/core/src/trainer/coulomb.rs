use crate::error::{Error, Result};
use crate::scalar::Real;

/// Pairwise Coulomb terms `Z_i Z_j / |r_i - r_j|` for `i < j`, in
/// lexicographic `(i, j)` order. Nine atoms give 36 features.
pub fn coulomb_features<T: Real>(positions: &[[T; 3]], charges: &[i64]) -> Result<Vec<T>> {
    if positions.len() != charges.len() {
        return Err(Error::arg(format!(
            "{} positions but {} charges",
            positions.len(),
            charges.len()
        )));
    }
    let n = positions.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = (0..3)
                .map(|k| {
                    let t = positions[i][k] - positions[j][k];
                    t * t
                })
                .sum::<T>()
                .sqrt();
            if !(d > T::zero()) {
                return Err(Error::Singularity(format!("atoms {i} and {j} coincide")));
            }
            let zz = T::lit((charges[i] * charges[j]) as f64);
            out.push(zz / d);
        }
    }
    Ok(out)
}
