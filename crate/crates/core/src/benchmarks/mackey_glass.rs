//! Mackey-Glass delay differential equation
//! `dQ/dt = alpha Q(t - tau) / (1 + Q(t - tau)^beta) - gamma Q(t)`.

use super::min_max_normalize;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgParams<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub tau_delay: T,
    /// Time between recorded samples.
    pub dt_sample: T,
    /// RK4 step; must divide both `tau_delay` and `dt_sample`.
    pub substep: T,
    /// `Q(t)` for `t <= 0`.
    pub initial_history: T,
    /// Samples discarded before recording.
    pub transient: usize,
}

impl<T: Real> Default for MgParams<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(0.2),
            beta: T::lit(10.0),
            gamma: T::lit(0.1),
            tau_delay: T::lit(17.0),
            dt_sample: T::one(),
            substep: T::lit(0.1),
            initial_history: T::lit(1.2),
            transient: 1000,
        }
    }
}

fn steps_per(span: f64, h: f64, what: &str) -> Result<usize> {
    let ratio = span / h;
    let n = ratio.round();
    if !(n >= 1.0) || (ratio - n).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "{what} ({span}) must be a positive integer multiple of the substep ({h})"
        )));
    }
    Ok(n as usize)
}

/// Raw (unnormalized) samples `Q(k dt)` after the transient, `len` of them.
///
/// Fixed-step RK4; the delayed value at half steps comes from four-point
/// Lagrange interpolation on the stored grid so the scheme keeps fourth
/// order accuracy.
pub fn mackey_glass_raw<T: Real>(params: &MgParams<T>, len: usize) -> Result<Vec<T>> {
    let h64 = params.substep.to_f64_lossy();
    let delay = steps_per(params.tau_delay.to_f64_lossy(), h64, "delay")?;
    let stride = steps_per(params.dt_sample.to_f64_lossy(), h64, "sample interval")?;
    if delay < 2 {
        return Err(Error::InvalidParameter(
            "delay must span at least two substeps".into(),
        ));
    }
    let total_samples = params.transient + len;
    let total_steps = total_samples * stride;

    let h = params.substep;
    let half = T::lit(0.5);
    let rhs = |q: T, lagged: T| params.alpha * lagged / (T::one() + lagged.powf(params.beta)) - params.gamma * q;

    // hist[i] = Q((i - delay) h); the first `delay + 1` entries are the
    // constant initial history up to t = 0.
    let mut hist = vec![params.initial_history; delay + 1];
    hist.reserve(total_steps);
    let mut out = Vec::with_capacity(len);
    for step in 0..total_steps {
        if step % stride == 0 && step / stride >= params.transient {
            out.push(hist[hist.len() - 1]);
        }
        let now = hist.len() - 1;
        let q = hist[now];
        // Grid index of t - tau.
        let i = now - delay;
        let lag0 = hist[i];
        let lag1 = hist[i + 1];
        let before = if i == 0 { hist[0] } else { hist[i - 1] };
        let after = hist[i + 2];
        let lag_mid = (T::lit(9.0) * (lag0 + lag1) - before - after) / T::lit(16.0);

        let k1 = rhs(q, lag0);
        let k2 = rhs(q + half * h * k1, lag_mid);
        let k3 = rhs(q + half * h * k2, lag_mid);
        let k4 = rhs(q + h * k3, lag1);
        let next = q + h / T::lit(6.0) * (k1 + T::lit(2.0) * (k2 + k3) + k4);
        if !next.is_finite() {
            return Err(Error::Numeric(format!("Mackey-Glass integration diverged at step {step}")));
        }
        hist.push(next);
    }
    debug_assert_eq!(out.len(), len);
    Ok(out)
}

/// `len` samples normalized to `[0, 1]` over the generated window.
pub fn mackey_glass_series<T: Real>(params: &MgParams<T>, len: usize) -> Result<Vec<T>> {
    min_max_normalize(&mackey_glass_raw(params, len)?)
}

/// Inputs and `horizon`-step-ahead targets.
#[derive(Debug, Clone, PartialEq)]
pub struct MgSeries<T> {
    pub inputs: Vec<T>,
    /// `targets[k] = inputs_ext[k + horizon]`.
    pub targets: Vec<T>,
}

/// `total_steps` normalized inputs paired with `x_{k + horizon}`.
pub fn mackey_glass<T: Real>(params: &MgParams<T>, total_steps: usize, horizon: usize) -> Result<MgSeries<T>> {
    if horizon > total_steps {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} exceeds the series length {total_steps}"
        )));
    }
    let series = mackey_glass_series(params, total_steps + horizon)?;
    Ok(MgSeries {
        inputs: series[..total_steps].to_vec(),
        targets: series[horizon..].to_vec(),
    })
}
