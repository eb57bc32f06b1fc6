use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cfflm::FeatureMap;
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::scalar::Real;
use rand::Rng;

/// Absolute slack of the analytic membership test.
pub const BICONE_TOLERANCE: f64 = 1e-12;

/// Base tolerance of grid membership, before the discretization slack.
pub const GRID_TOLERANCE: f64 = 1e-6;

/// Largest number of grid points a [`MembershipGrid`] will tabulate.
pub const MAX_MEMBERSHIP_POINTS: usize = 10_000_000;

/// `sup_x |c·φ(x)|` for `φ = (1, √2 cos x, √2 sin x)`.
pub fn bicone_height(c: [f64; 3]) -> f64 {
    c[0].abs() + (2.0 * (c[1] * c[1] + c[2] * c[2])).sqrt()
}

/// Membership of `(c_0, c_cos, c_sin)` in the set of coefficient vectors
/// whose degree-one series is bounded by one: the solid bicone with apexes
/// `(±1, 0, 0)` and equatorial radius `1/√2`.
pub fn bicone_contains(c: [f64; 3]) -> bool {
    bicone_height(c) <= 1.0 + BICONE_TOLERANCE
}

/// Feature vectors tabulated on a uniform grid of `[0, 2π)^M`.
#[derive(Clone, Debug)]
pub struct MembershipGrid<T> {
    points_per_var: usize,
    dim: usize,
    table: Vec<T>,
    slack: f64,
}

impl<T: Real> MembershipGrid<T> {
    /// Requires at least `8·d_F` points per variable.
    pub fn new(fm: &FeatureMap, points_per_var: usize) -> Result<Self> {
        let d_max = fm.degrees().iter().copied().max().unwrap_or(0);
        if points_per_var < (8 * d_max).max(1) {
            return Err(Error::arg(format!(
                "{points_per_var} grid points per variable, at least {} needed",
                8 * d_max
            )));
        }
        let total = u32::try_from(fm.n_vars())
            .ok()
            .and_then(|m| points_per_var.checked_pow(m))
            .filter(|&t| t <= MAX_MEMBERSHIP_POINTS)
            .ok_or_else(|| Error::capacity(format!("{points_per_var}^{} grid points", fm.n_vars())))?;
        let h = T::TAU() / T::from_usize_lossy(points_per_var);
        let mut table = Vec::with_capacity(total * fm.dim());
        let mut x = vec![T::zero(); fm.n_vars()];
        for idx in 0..total {
            let mut r = idx;
            for xm in x.iter_mut().rev() {
                *xm = h * T::from_usize_lossy(r % points_per_var);
                r /= points_per_var;
            }
            table.extend(fm.features(&x)?);
        }
        // A degree-n trigonometric polynomial sampled at G equispaced points
        // satisfies ‖p‖∞ ≤ max_grid |p| / cos(nπ/G), one factor per variable.
        let shrink: f64 = fm
            .degrees()
            .iter()
            .map(|&n| (std::f64::consts::PI * n as f64 / points_per_var as f64).cos())
            .product();
        Ok(Self { points_per_var, dim: fm.dim(), table, slack: 1.0 / shrink - 1.0 })
    }

    pub fn points_per_var(&self) -> usize {
        self.points_per_var
    }

    /// Relative gap between the grid maximum and the supremum.
    pub fn slack(&self) -> f64 {
        self.slack
    }

    pub fn max_abs(&self, c: &[T]) -> Result<T> {
        if c.len() != self.dim {
            return Err(Error::arg(format!("{} coefficients for {} features", c.len(), self.dim)));
        }
        Ok(self
            .table
            .chunks_exact(self.dim)
            .map(|phi| phi.iter().zip(c).map(|(a, b)| *a * *b).sum::<T>().abs())
            .fold(T::zero(), T::max))
    }

    pub fn membership(&self, c: &[T]) -> Result<Membership> {
        let max_abs = self.max_abs(c)?.as_f64();
        let tolerance = GRID_TOLERANCE + self.slack;
        Ok(Membership { member: max_abs <= 1.0 + tolerance, max_abs, tolerance })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    /// Largest `|c·φ(x)|` over the grid.
    pub max_abs: f64,
    pub tolerance: f64,
}

/// Grid test of `|c·φ(x)| ≤ 1` for all `x`.
pub fn numerical_membership<T: Real>(c: &[T], fm: &FeatureMap, points_per_var: usize) -> Result<Membership> {
    MembershipGrid::<T>::new(fm, points_per_var)?.membership(c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiconeAgreement {
    pub samples: usize,
    pub grid: usize,
    pub band: f64,
    pub agreements: usize,
    pub agreement_rate: f64,
    /// Disagreements with `|height - 1| ≥ band`.
    pub disagreements_outside_band: usize,
    /// Largest `|height - 1|` among disagreements.
    pub max_disagreement_distance: f64,
}

/// Compares the analytic and grid tests on `samples` uniform draws from
/// `[-1.5, 1.5]^3`; draw `i` uses stream `i` of `seed`.
pub fn bicone_agreement(samples: usize, grid: usize, band: f64, seed: u64) -> Result<BiconeAgreement> {
    if samples == 0 {
        return Err(Error::arg("at least one sample is required"));
    }
    let fm = FeatureMap::uniform(1, 1)?;
    let g = MembershipGrid::<f64>::new(&fm, grid)?;
    let rows = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let c: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
            let grid_member = g.membership(&c)?.member;
            Ok((bicone_contains(c) == grid_member, (bicone_height(c) - 1.0).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let agreements = rows.iter().filter(|r| r.0).count();
    let dis: Vec<f64> = rows.iter().filter(|r| !r.0).map(|r| r.1).collect();
    Ok(BiconeAgreement {
        samples,
        grid,
        band,
        agreements,
        agreement_rate: agreements as f64 / samples as f64,
        disagreements_outside_band: dis.iter().filter(|&&d| d >= band).count(),
        max_disagreement_distance: dis.iter().copied().fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_examples() {
        assert!(bicone_contains([1.0, 0.0, 0.0]));
        assert!(bicone_contains([-1.0, 0.0, 0.0]));
        assert!(bicone_contains([0.0, std::f64::consts::FRAC_1_SQRT_2, 0.0]));
        assert!(bicone_contains([0.0, 0.0, -std::f64::consts::FRAC_1_SQRT_2]));
        assert!(!bicone_contains([0.6, 0.5, 0.0]));
        assert!(!bicone_contains([1.0 + 1e-9, 0.0, 0.0]));
    }

    #[test]
    fn grid_examples() {
        let fm = FeatureMap::uniform(1, 1).unwrap();
        let m = numerical_membership(&[1.0, 0.0, 0.0], &fm, 1000).unwrap();
        assert!(m.member);
        assert_eq!(m.max_abs, 1.0);
        let m = numerical_membership(&[2.0, 0.0, 0.0], &fm, 1000).unwrap();
        assert!(!m.member);
        assert_eq!(m.max_abs, 2.0);
        assert!(numerical_membership(&[1.0, 0.0, 0.0], &fm, 7).is_err());
    }

    #[test]
    fn grid_max_matches_height() {
        let fm = FeatureMap::uniform(1, 1).unwrap();
        let g = MembershipGrid::<f64>::new(&fm, 10_000).unwrap();
        for c in [[0.6, 0.5, 0.0], [0.1, -0.3, 0.4], [-0.2, 0.05, -0.6]] {
            let m = g.max_abs(&c).unwrap();
            let h = bicone_height(c);
            assert!(m <= h + 1e-12 && h <= m * (1.0 + g.slack()) + 1e-12, "{c:?}: {m} vs {h}");
        }
    }
}
