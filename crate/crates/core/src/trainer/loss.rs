use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, Real};

/// Mean squared error `(1/n) Σ (p_j - y_j)²`.
pub fn mse_loss<T: Real>(preds: &[T], targets: &[T]) -> Result<T> {
    if preds.len() != targets.len() {
        return Err(Error::arg(format!(
            "{} predictions for {} targets",
            preds.len(),
            targets.len()
        )));
    }
    if preds.is_empty() {
        return Err(Error::arg("loss of an empty batch"));
    }
    let sq: Vec<T> = preds.iter().zip(targets).map(|(p, y)| (*p - *y) * (*p - *y)).collect();
    Ok(pairwise_sum(&sq) / T::from_usize_lossy(sq.len()))
}

/// Mean of the last `window` entries of a loss trace.
pub fn saturated_loss<T: Real>(trace: &[T], window: usize) -> Option<T> {
    if trace.is_empty() || window == 0 {
        return None;
    }
    let tail = &trace[trace.len().saturating_sub(window)..];
    Some(pairwise_sum(tail) / T::from_usize_lossy(tail.len()))
}
