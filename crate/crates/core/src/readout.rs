//! Linear readout: feature standardization, ridge regression, NMSE and
//! linear memory capacity.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};

use crate::linalg::{symmetric_eigen, SymmetricEigen};
use crate::{Error, Real, Result, RunTrace};

pub const DEFAULT_RIDGE: f64 = 1e-11;
pub const DEFAULT_MAX_DELAY: usize = 25;

/// Row ranges of a run: `[0, washout)` discarded, then training, then test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Windows {
    pub washout: usize,
    pub train: usize,
    pub test: usize,
}

impl Windows {
    pub fn new(washout: usize, train: usize, test: usize) -> Self {
        Self {
            washout,
            train,
            test,
        }
    }

    pub fn train_range(&self) -> std::ops::Range<usize> {
        self.washout..self.washout + self.train
    }

    pub fn test_range(&self) -> std::ops::Range<usize> {
        self.washout + self.train..self.total()
    }

    pub fn total(&self) -> usize {
        self.washout + self.train + self.test
    }
}

impl Default for Windows {
    fn default() -> Self {
        Self::new(200, 1000, 1000)
    }
}

/// Per-feature z-score statistics from a training window.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer<T> {
    pub mean: Vec<T>,
    /// Population standard deviation; 1 for constant columns.
    pub std: Vec<T>,
}

pub fn standardize_fit<T: Real>(features: ArrayView2<T>) -> Result<Standardizer<T>> {
    let (rows, cols) = features.dim();
    if rows == 0 {
        return Err(Error::InvalidParameter(
            "cannot standardize an empty training window".into(),
        ));
    }
    let n = T::from_usize_lossy(rows);
    let mut mean = Vec::with_capacity(cols);
    let mut std = Vec::with_capacity(cols);
    for col in features.axis_iter(Axis(1)) {
        let m = col.iter().copied().sum::<T>() / n;
        let var = col.iter().map(|&x| (x - m) * (x - m)).sum::<T>() / n;
        let scale = col.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
        let sd = var.sqrt();
        // Spread at rounding level is treated as a constant column.
        let floor = T::epsilon() * T::lit(64.0) * scale;
        std.push(if sd > floor && sd > T::zero() { sd } else { T::one() });
        mean.push(m);
    }
    Ok(Standardizer { mean, std })
}

impl<T: Real> Standardizer<T> {
    pub fn apply(&self, features: ArrayView2<T>) -> Result<Array2<T>> {
        if features.ncols() != self.mean.len() {
            return Err(Error::Shape(format!(
                "{} feature columns, standardizer was fit on {}",
                features.ncols(),
                self.mean.len()
            )));
        }
        let mut out = features.to_owned();
        for (mut col, (&m, &s)) in out
            .axis_iter_mut(Axis(1))
            .zip(self.mean.iter().zip(&self.std))
        {
            col.mapv_inplace(|x| (x - m) / s);
        }
        Ok(out)
    }
}

/// Ridge weights for one target.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeWeights<T> {
    pub weights: Array1<T>,
    pub bias: T,
}

impl<T: Real> RidgeWeights<T> {
    pub fn predict(&self, x: ArrayView2<T>) -> Array1<T> {
        x.dot(&self.weights).mapv(|v| v + self.bias)
    }
}

/// Ridge solver over a fixed standardized design matrix, reusable across
/// targets. Solves `(X^T X + beta I) W = X^T (y - mean(y))`, `b = mean(y)`,
/// through the eigendecomposition of the Gram matrix.
#[derive(Debug, Clone)]
pub struct RidgeSolver<T> {
    x: Array2<T>,
    gram: SymmetricEigen<T>,
    beta: T,
}

impl<T: Real> RidgeSolver<T> {
    pub fn new(x: Array2<T>, beta: T) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::InvalidParameter("ridge needs at least one sample".into()));
        }
        if !(beta >= T::zero()) {
            return Err(Error::InvalidParameter(format!("ridge parameter {beta} must be >= 0")));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite entry in design matrix".into()));
        }
        let gram = symmetric_eigen(&x.t().dot(&x))?;
        Ok(Self { x, gram, beta })
    }

    pub fn fit(&self, y: &[T]) -> Result<RidgeWeights<T>> {
        if y.len() != self.x.nrows() {
            return Err(Error::Shape(format!(
                "{} targets for {} samples",
                y.len(),
                self.x.nrows()
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite target".into()));
        }
        let bias = y.iter().copied().sum::<T>() / T::from_usize_lossy(y.len());
        let centered = Array1::from_iter(y.iter().map(|&v| v - bias));
        let rhs = self.x.t().dot(&centered);
        let proj = self.gram.vectors.t().dot(&rhs);
        let scaled = Array1::from_iter(proj.iter().zip(&self.gram.values).map(|(&p, &l)| {
            let denom = l.max(T::zero()) + self.beta;
            if denom > T::zero() {
                p / denom
            } else {
                T::zero()
            }
        }));
        let weights = self.gram.vectors.dot(&scaled);
        Ok(RidgeWeights { weights, bias })
    }
}

/// One-shot ridge fit on standardized features.
pub fn ridge_fit<T: Real>(x: ArrayView2<T>, y: &[T], beta: T) -> Result<RidgeWeights<T>> {
    RidgeSolver::new(x.to_owned(), beta)?.fit(y)
}

/// Standardization plus ridge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel<T> {
    pub standardizer: Standardizer<T>,
    pub weights: Array1<T>,
    pub bias: T,
    pub beta: T,
}

impl<T: Real> ReadoutModel<T> {
    pub fn fit(train_features: ArrayView2<T>, targets: &[T], beta: T) -> Result<Self> {
        let standardizer = standardize_fit(train_features)?;
        let x = standardizer.apply(train_features)?;
        let RidgeWeights { weights, bias } = ridge_fit(x.view(), targets, beta)?;
        Ok(Self {
            standardizer,
            weights,
            bias,
            beta,
        })
    }

    pub fn predict(&self, features: ArrayView2<T>) -> Result<Vec<T>> {
        let x = self.standardizer.apply(features)?;
        Ok(x.dot(&self.weights).mapv(|v| v + self.bias).to_vec())
    }
}

/// `mean((pred - y)^2) / var(y)` with the population variance of `y`.
pub fn nmse<T: Real>(predictions: &[T], targets: &[T]) -> Result<T> {
    if predictions.len() != targets.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    if targets.len() < 2 {
        return Err(Error::InvalidParameter(
            "NMSE needs at least two samples".into(),
        ));
    }
    let n = T::from_usize_lossy(targets.len());
    let mean = targets.iter().copied().sum::<T>() / n;
    let var = targets.iter().map(|&y| (y - mean) * (y - mean)).sum::<T>() / n;
    if !(var > T::zero()) {
        return Err(Error::DegenerateTarget);
    }
    let mse = predictions
        .iter()
        .zip(targets)
        .map(|(&p, &y)| (p - y) * (p - y))
        .sum::<T>()
        / n;
    Ok(mse / var)
}

/// A feature matrix split into standardized training and test blocks, with
/// the ridge factorization shared by every target fitted on it.
#[derive(Debug, Clone)]
pub struct WindowedReadout<T> {
    windows: Windows,
    solver: RidgeSolver<T>,
    test: Array2<T>,
    pub standardizer: Standardizer<T>,
}

impl<T: Real> WindowedReadout<T> {
    pub fn new(features: ArrayView2<T>, windows: Windows, beta: T) -> Result<Self> {
        if features.nrows() < windows.total() {
            return Err(Error::Shape(format!(
                "{} feature rows, windows need {}",
                features.nrows(),
                windows.total()
            )));
        }
        let train = features.slice(s![windows.train_range(), ..]);
        let standardizer = standardize_fit(train)?;
        let x_train = standardizer.apply(train)?;
        let test = standardizer.apply(features.slice(s![windows.test_range(), ..]))?;
        Ok(Self {
            windows,
            solver: RidgeSolver::new(x_train, beta)?,
            test,
            standardizer,
        })
    }

    pub fn windows(&self) -> Windows {
        self.windows
    }

    /// Fit on training-window targets, then score the test window.
    /// `target(k)` is the target for feature row `k`.
    pub fn test_nmse(&self, target: impl Fn(usize) -> T) -> Result<T> {
        let y_train: Vec<T> = self.windows.train_range().map(&target).collect();
        let y_test: Vec<T> = self.windows.test_range().map(&target).collect();
        let w = self.solver.fit(&y_train)?;
        let pred = w.predict(self.test.view());
        nmse(pred.as_slice().unwrap(), &y_test)
    }
}

/// `MC(tau)` for `tau = 1..=max_delay`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityProfile<T> {
    /// `1 - NMSE`, unclipped.
    pub raw: Vec<T>,
    /// Clipped to `[0, 1]`.
    pub clipped: Vec<T>,
    /// Sum of the clipped capacities.
    pub total: T,
}

impl<T: Real> CapacityProfile<T> {
    pub fn from_raw(raw: Vec<T>) -> Self {
        let clipped: Vec<T> = raw.iter().map(|&m| m.max(T::zero()).min(T::one())).collect();
        let total = clipped.iter().copied().sum();
        Self {
            raw,
            clipped,
            total,
        }
    }

    /// Clipped capacity at delay `tau` (1-based).
    pub fn at(&self, tau: usize) -> T {
        self.clipped[tau - 1]
    }

    pub fn max_delay(&self) -> usize {
        self.raw.len()
    }
}

/// Linear memory capacity of a run driven by its own `inputs`: for each
/// delay the readout is trained to reproduce `x_{k - tau}`.
pub fn memory_capacity<T: Real>(
    trace: &RunTrace<T>,
    windows: Windows,
    max_delay: usize,
    beta: T,
) -> Result<CapacityProfile<T>> {
    if windows.washout < max_delay {
        return Err(Error::InvalidParameter(format!(
            "washout ({}) must cover the largest delay ({max_delay})",
            windows.washout
        )));
    }
    let readout = WindowedReadout::new(trace.features.view(), windows, beta)?;
    let drive = &trace.inputs;
    let raw = (1..=max_delay)
        .map(|tau| readout.test_nmse(|k| drive[k - tau]).map(|e| T::one() - e))
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityProfile::from_raw(raw))
}
