//! NARMA-n: `y_{k+1} = a y_k + b y_k sum_{j<n} y_{k-j} + g x_k x_{k-n+1} + d`.

use crate::{Error, Real, Result};

/// Magnitude beyond which a NARMA series counts as diverged.
pub const NARMA_DIVERGENCE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NarmaParams<T> {
    pub order: usize,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta: T,
}

impl<T: Real> NarmaParams<T> {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            alpha: T::lit(0.3),
            beta: T::lit(0.05),
            gamma: T::lit(1.5),
            delta: T::lit(0.1),
        }
    }
}

/// Targets aligned with the drive: `out[k] = y_{k+1}`, the value produced
/// after seeing `x_k`. History before the start is zero.
pub fn narma<T: Real>(params: &NarmaParams<T>, drive: &[T]) -> Result<Vec<T>> {
    let n = params.order;
    if n == 0 {
        return Err(Error::InvalidParameter("NARMA order must be at least 1".into()));
    }
    let limit = T::lit(NARMA_DIVERGENCE);
    // y[k] with y[0] = 0.
    let mut y = vec![T::zero(); drive.len() + 1];
    for k in 0..drive.len() {
        let window: T = y[(k + 1).saturating_sub(n)..=k].iter().copied().sum();
        let lagged_x = if k + 1 >= n { drive[k + 1 - n] } else { T::zero() };
        let next = params.alpha * y[k] + params.beta * y[k] * window + params.gamma * drive[k] * lagged_x + params.delta;
        if !(next.abs() <= limit) {
            return Err(Error::Instability {
                step: k + 1,
                value: next.to_f64_lossy(),
            });
        }
        y[k + 1] = next;
    }
    y.remove(0);
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::iid_drive;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_drive_first_value() {
        let y = narma(&NarmaParams::<f64>::new(7), &[0.0; 3]).unwrap();
        assert_eq!(y[0], 0.1);
    }

    #[test]
    fn zero_drive_steady_state() {
        // y = 0.3 y + 0.05 * 7 y^2 + 0.1  =>  0.35 y^2 - 0.7 y + 0.1 = 0.
        let root = (0.7 - (0.49f64 - 4.0 * 0.35 * 0.1).sqrt()) / 0.7;
        let y = narma(&NarmaParams::<f64>::new(7), &[0.0; 500]).unwrap();
        assert!((y[499] - root).abs() < 1e-12, "{} vs {root}", y[499]);
    }

    #[test]
    fn hand_recurrence_order_two() {
        let x = [0.2, 0.4, 0.1];
        let y = narma(&NarmaParams::<f64>::new(2), &x).unwrap();
        let y1 = 0.1;
        let y2 = 0.3 * y1 + 0.05 * y1 * y1 + 1.5 * 0.4 * 0.2 + 0.1;
        let y3 = 0.3 * y2 + 0.05 * y2 * (y2 + y1) + 1.5 * 0.1 * 0.4 + 0.1;
        assert_eq!(y, vec![y1, y2, y3]);
    }

    #[test]
    fn narma10_stays_bounded_and_replays() {
        let x: Vec<f64> = iid_drive(2200, 0.0, 0.5, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let y = narma(&NarmaParams::new(10), &x).unwrap();
        assert!(y.iter().all(|&v| v > 0.0 && v < 1.0));
        assert_eq!(y, narma(&NarmaParams::new(10), &x).unwrap());
    }

    #[test]
    fn divergence_is_reported() {
        let x = vec![5.0; 50];
        assert!(matches!(
            narma(&NarmaParams::<f64>::new(3), &x),
            Err(Error::Instability { .. })
        ));
        assert!(narma(&NarmaParams::<f64>::new(0), &x).is_err());
    }
}
