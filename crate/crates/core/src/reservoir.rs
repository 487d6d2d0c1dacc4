//! Closed-loop reservoir dynamics.
//!
//! At step `k` the input sample `x_k` sets the two input MZIs, the previous
//! coincidence vector `C_{k-1}` programs the wedge through the random
//! feedback map, the static block stays fixed, and the resulting output
//! distribution yields `C_k`.

use std::fmt::Write as _;
use std::sync::Arc;

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::detection::{
    coincidence_vector, pair_count, sample_coincidences_with, CoincidenceVector, LossModel,
    DEFAULT_GAUSSIAN_THRESHOLD,
};
use crate::fock::{distribution_from_columns, FockBasis, PnrDistribution};
use crate::mesh::{propagate_columns, sample_static_params, MeshLayout, MeshParams, MziParams, MziRole};
use crate::seeding::{rng_from_seed, RunSeeds};
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShotMode {
    /// Expectation values (`N_m -> infinity`).
    Exact,
    /// Coincidences estimated from this many measurements per step.
    Finite(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirConfig<T> {
    pub modes: usize,
    pub photons: usize,
    pub alpha_in: T,
    pub alpha_fb: T,
    pub eta_eff: T,
    pub shots: ShotMode,
    /// Shot budgets above this use the Gaussian approximation.
    pub gaussian_threshold: u64,
    pub washout: usize,
    pub train_len: usize,
    pub test_len: usize,
    pub seeds: RunSeeds,
}

impl<T: Real> Default for ReservoirConfig<T> {
    fn default() -> Self {
        Self {
            modes: 16,
            photons: 4,
            alpha_in: T::lit(0.001),
            alpha_fb: T::lit(2.2),
            eta_eff: T::one(),
            shots: ShotMode::Exact,
            gaussian_threshold: DEFAULT_GAUSSIAN_THRESHOLD,
            washout: 200,
            train_len: 1000,
            test_len: 1000,
            seeds: RunSeeds::default(),
        }
    }
}

impl<T: Real> ReservoirConfig<T> {
    pub fn total_steps(&self) -> usize {
        self.washout + self.train_len + self.test_len
    }

    pub fn feature_dim(&self) -> usize {
        pair_count(self.modes)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.photons) {
            return Err(Error::InvalidParameter(format!(
                "the central input block holds 1 to 4 photons, got {}",
                self.photons
            )));
        }
        for (name, v) in [("alpha_in", self.alpha_in), ("alpha_fb", self.alpha_fb)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if let ShotMode::Finite(0) = self.shots {
            return Err(Error::InvalidParameter("shot count must be at least 1".into()));
        }
        if self.train_len == 0 || self.test_len == 0 {
            return Err(Error::InvalidParameter(
                "training and test windows must be non-empty".into(),
            ));
        }
        LossModel::new(self.eta_eff).map(|_| ())
    }
}

/// `C_{k-1} -> (theta, phi)` for every wedge MZI.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackMap<T> {
    /// `2 R_fb x d`, entries i.i.d. `N(0, 1/d)`.
    matrix: Array2<T>,
    alpha_fb: T,
}

impl<T: Real> FeedbackMap<T> {
    pub fn sample<R: Rng + ?Sized>(wedge_size: usize, features: usize, alpha_fb: T, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, 1.0 / (features.max(1) as f64).sqrt()).unwrap();
        let matrix = Array2::from_shape_fn((2 * wedge_size, features), |_| T::lit(normal.sample(rng)));
        Self { matrix, alpha_fb }
    }

    pub fn from_matrix(matrix: Array2<T>, alpha_fb: T) -> Result<Self> {
        if matrix.nrows() % 2 != 0 {
            return Err(Error::Shape(format!(
                "feedback matrix needs an even row count, got {}",
                matrix.nrows()
            )));
        }
        Ok(Self { matrix, alpha_fb })
    }

    pub fn matrix(&self) -> &Array2<T> {
        &self.matrix
    }

    pub fn alpha_fb(&self) -> T {
        self.alpha_fb
    }

    pub fn wedge_size(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `a = pi/4 + alpha_fb V_fb C`; the first half of `a` gives the
    /// `theta`s, four times the second half the `phi`s, in wedge layout order.
    pub fn wedge_params(&self, c_prev: &[T]) -> Result<Vec<MziParams<T>>> {
        if c_prev.len() != self.matrix.ncols() {
            return Err(Error::Shape(format!(
                "coincidence vector has {} entries, feedback map expects {}",
                c_prev.len(),
                self.matrix.ncols()
            )));
        }
        let r = self.wedge_size();
        let base = T::FRAC_PI_4();
        let four = T::lit(4.0);
        let amp = |row: usize| {
            let h: T = self
                .matrix
                .row(row)
                .iter()
                .zip(c_prev)
                .map(|(&v, &c)| v * c)
                .sum();
            base + self.alpha_fb * h
        };
        Ok((0..r)
            .map(|k| MziParams::new(amp(k), four * amp(r + k)))
            .collect())
    }
}

/// Push-pull encoding: `theta_1 = pi/4 + alpha_in x`, `theta_2 = pi/4 - alpha_in x`,
/// external phases 0.
pub fn encode_input<T: Real>(x: T, alpha_in: T) -> [MziParams<T>; 2] {
    let base = T::FRAC_PI_4();
    [
        MziParams::new(base + alpha_in * x, T::zero()),
        MziParams::new(base - alpha_in * x, T::zero()),
    ]
}

/// Feature matrix of a closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<T> {
    modes: usize,
    /// One row per step, `C(M, 2)` columns.
    pub features: Array2<T>,
    pub inputs: Vec<T>,
}

impl<T: Real> RunTrace<T> {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Header `k,x,C_1_2,...,C_{M-1}_M`, one row per step with `k` from 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,x");
        for label in CoincidenceVector::<T>::labels(self.modes) {
            out.push(',');
            out.push_str(&label);
        }
        out.push('\n');
        for (k, (x, row)) in self.inputs.iter().zip(self.features.rows()).enumerate() {
            let _ = write!(out, "{},{x}", k + 1);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// A configured photonic reservoir: layout, static mesh settings, feedback
/// map and input state, all fixed by the config's seeds.
#[derive(Debug, Clone)]
pub struct Reservoir<T> {
    config: ReservoirConfig<T>,
    layout: MeshLayout,
    basis: Arc<FockBasis>,
    /// 0-based modes holding one input photon each.
    input_modes: Vec<usize>,
    static_params: MeshParams<T>,
    feedback: FeedbackMap<T>,
    loss: LossModel<T>,
    input_mzis: [usize; 2],
    wedge_mzis: Vec<usize>,
}

impl<T: Real> Reservoir<T> {
    pub fn new(config: ReservoirConfig<T>) -> Result<Self> {
        config.validate()?;
        let layout = MeshLayout::build_default(config.modes, config.photons)?;
        let static_params = sample_static_params(&layout, &mut rng_from_seed(config.seeds.mesh));
        let feedback = FeedbackMap::sample(
            layout.wedge_size(),
            config.feature_dim(),
            config.alpha_fb,
            &mut rng_from_seed(config.seeds.feedback),
        );
        Self::with_parts(config, layout, static_params, feedback)
    }

    /// Assemble from explicit parts, bypassing the seeded sampling.
    pub fn with_parts(
        config: ReservoirConfig<T>,
        layout: MeshLayout,
        static_params: MeshParams<T>,
        feedback: FeedbackMap<T>,
    ) -> Result<Self> {
        config.validate()?;
        let inputs = layout.indices_with_role(MziRole::Input);
        let input_mzis: [usize; 2] = inputs.as_slice().try_into().map_err(|_| {
            Error::UnsupportedGeometry(format!("expected 2 input MZIs, found {}", inputs.len()))
        })?;
        let wedge_mzis = layout.indices_with_role(MziRole::Wedge);
        if feedback.wedge_size() != wedge_mzis.len() || feedback.matrix.ncols() != config.feature_dim() {
            return Err(Error::Shape(format!(
                "feedback map is {:?}, layout needs {} x {}",
                feedback.matrix.dim(),
                2 * wedge_mzis.len(),
                config.feature_dim()
            )));
        }
        let start = *layout.central_block().start() - 1;
        let input_modes: Vec<usize> = (start..start + config.photons).collect();
        let basis = Arc::new(FockBasis::enumerate(config.modes, config.photons)?);
        let loss = LossModel::new(config.eta_eff)?;
        Ok(Self {
            config,
            layout,
            basis,
            input_modes,
            static_params,
            feedback,
            loss,
            input_mzis,
            wedge_mzis,
        })
    }

    pub fn config(&self) -> &ReservoirConfig<T> {
        &self.config
    }

    pub fn layout(&self) -> &MeshLayout {
        &self.layout
    }

    pub fn static_params(&self) -> &MeshParams<T> {
        &self.static_params
    }

    pub fn feedback(&self) -> &FeedbackMap<T> {
        &self.feedback
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    /// 0-based modes of the input photons.
    pub fn input_modes(&self) -> &[usize] {
        &self.input_modes
    }

    /// Full mesh settings for input `x` and previous coincidences `c_prev`.
    pub fn mesh_params(&self, c_prev: &CoincidenceVector<T>, x: T) -> Result<MeshParams<T>> {
        let mut params = self.static_params.clone();
        let [first, second] = encode_input(x, self.config.alpha_in);
        params.set(self.input_mzis[0], first)?;
        params.set(self.input_mzis[1], second)?;
        let wedge = self.feedback.wedge_params(c_prev.values())?;
        for (&idx, p) in self.wedge_mzis.iter().zip(wedge) {
            params.set(idx, p)?;
        }
        Ok(params)
    }

    /// Output PNR distribution for one step.
    pub fn distribution(&self, c_prev: &CoincidenceVector<T>, x: T) -> Result<PnrDistribution<T>> {
        let params = self.mesh_params(c_prev, x)?;
        let columns = propagate_columns(&self.layout, &params, &self.input_modes)?;
        distribution_from_columns(columns.view(), T::one(), &self.basis)
    }

    /// One closed-loop update `C_{k-1}, x_k -> C_k`. The generator is only
    /// consulted in finite-shot mode.
    pub fn step<R: Rng + ?Sized>(
        &self,
        c_prev: &CoincidenceVector<T>,
        x: T,
        rng: &mut R,
    ) -> Result<CoincidenceVector<T>> {
        let dist = self.distribution(c_prev, x)?;
        match self.config.shots {
            ShotMode::Exact => Ok(coincidence_vector(&dist, &self.loss)),
            ShotMode::Finite(n) => {
                sample_coincidences_with(&dist, &self.loss, n, self.config.gaussian_threshold, rng)
            }
        }
    }

    /// Drive the loop over a full `washout + train + test` series.
    pub fn run(&self, drive: &[T]) -> Result<RunTrace<T>> {
        if drive.len() != self.config.total_steps() {
            return Err(Error::Shape(format!(
                "drive has {} samples, config expects {}",
                drive.len(),
                self.config.total_steps()
            )));
        }
        self.run_steps(drive)
    }

    /// Drive the loop over any number of steps. The first step sees the
    /// zero-feedback wedge (`C_0 = 0`).
    pub fn run_steps(&self, drive: &[T]) -> Result<RunTrace<T>> {
        let d = self.config.feature_dim();
        let mut features = Array2::zeros((drive.len(), d));
        let mut rng = rng_from_seed(self.config.seeds.shots);
        let mut c = CoincidenceVector::zeros(self.config.modes);
        for (k, &x) in drive.iter().enumerate() {
            c = self.step(&c, x, &mut rng)?;
            features.row_mut(k).assign(&ndarray::ArrayView1::from(c.values()));
        }
        Ok(RunTrace {
            modes: self.config.modes,
            features,
            inputs: drive.to_vec(),
        })
    }
}
