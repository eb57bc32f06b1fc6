use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    /// Eigenvalues in descending order.
    pub values: Vec<T>,
    /// `vectors[k]` is the unit eigenvector of `values[k]`, with its first
    /// nonzero component positive.
    pub vectors: Vec<Vec<T>>,
}

/// Cyclic Jacobi eigensolver for a symmetric `n x n` row-major matrix.
///
/// Sweeps visit pairs in a fixed order, so results are reproducible. Ties
/// keep the order of the diagonal after convergence.
pub fn symmetric_eigen<T: Real>(a: &[T], n: usize) -> Result<SymmetricEigen<T>> {
    if a.len() != n * n {
        return Err(Error::arg(format!("{} entries for a {n}x{n} matrix", a.len())));
    }
    let mut m = a.to_vec();
    for i in 0..n {
        for j in 0..i {
            let (x, y) = (m[i * n + j], m[j * n + i]);
            let scale = x.abs().max(y.abs()).max(T::one());
            if (x - y).abs() > scale * T::epsilon().sqrt() {
                return Err(Error::Validation("matrix is not symmetric".into()));
            }
            let avg = (x + y) / T::lit(2.0);
            m[i * n + j] = avg;
            m[j * n + i] = avg;
        }
    }
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let frob: T = m.iter().map(|x| *x * *x).sum::<T>().sqrt();
    let tol = T::epsilon() * frob.max(T::min_positive_value());
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<T>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let (app, aqq) = (m[p * n + p], m[q * n + q]);
                let tau = (aqq - app) / (T::lit(2.0) * apq);
                let t = tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps ties in diagonal order.
    order.sort_by(|&i, &j| {
        m[j * n + j]
            .partial_cmp(&m[i * n + i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut col: Vec<T> = (0..n).map(|k| v[k * n + i]).collect();
            let lead = col.iter().copied().find(|x| x.abs() > T::epsilon().sqrt());
            if lead.is_some_and(|x| x < T::zero()) {
                for x in col.iter_mut() {
                    *x = -*x;
                }
            }
            col
        })
        .collect();
    Ok(SymmetricEigen { values, vectors })
}
