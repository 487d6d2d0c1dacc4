//! Target series for the forecasting and memory benchmarks.

mod ising;
mod mackey_glass;
mod narma;

pub use ising::{ising_magnetization, ising_series, IsingChain, IsingParams};
pub use mackey_glass::{mackey_glass, mackey_glass_raw, mackey_glass_series, MgParams, MgSeries};
pub use narma::{narma, NarmaParams};

use rand::Rng;

use crate::{Error, Real, Result};

/// Uniform i.i.d. samples on `[low, high)`.
pub fn iid_drive<T: Real, R: Rng + ?Sized>(len: usize, low: T, high: T, rng: &mut R) -> Result<Vec<T>> {
    if len == 0 {
        return Err(Error::InvalidParameter("drive length must be at least 1".into()));
    }
    let (lo, hi) = (low.to_f64_lossy(), high.to_f64_lossy());
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!("invalid drive range [{low}, {high})")));
    }
    Ok((0..len).map(|_| T::lit(rng.random_range(lo..hi))).collect())
}

/// Affine map of `series` onto `[0, 1]` using its own extremes.
pub fn min_max_normalize<T: Real>(series: &[T]) -> Result<Vec<T>> {
    let lo = series.iter().copied().fold(T::infinity(), T::min);
    let hi = series.iter().copied().fold(T::neg_infinity(), T::max);
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(
            "cannot normalize a constant or non-finite series".into(),
        ));
    }
    let span = hi - lo;
    Ok(series.iter().map(|&v| ((v - lo) / span).max(T::zero()).min(T::one())).collect())
}

/// CSV with header `k,x,y_target`; `k` counts from 1.
pub fn series_csv<T: Real>(inputs: &[T], targets: &[T]) -> Result<String> {
    if inputs.len() != targets.len() {
        return Err(Error::Shape(format!(
            "{} inputs vs {} targets",
            inputs.len(),
            targets.len()
        )));
    }
    let mut out = String::from("k,x,y_target\n");
    for (k, (x, y)) in inputs.iter().zip(targets).enumerate() {
        out.push_str(&format!("{},{x},{y}\n", k + 1));
    }
    Ok(out)
}
