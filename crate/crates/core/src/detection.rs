//! Threshold (click / no-click) detection of a PNR distribution: click
//! patterns, pairwise coincidence features, uniform loss and finite-shot
//! estimation.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

use crate::fock::PnrDistribution;
use crate::{Error, FockState, Real, Result};

/// Largest mode count for which click patterns are enumerated.
pub const MAX_PATTERN_MODES: usize = 20;

/// Shot budgets above this use the Gaussian approximation.
pub const DEFAULT_GAUSSIAN_THRESHOLD: u64 = 1_000_000;

/// Uniform per-mode detection efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel<T> {
    eta: T,
}

impl<T: Real> LossModel<T> {
    pub fn new(eta: T) -> Result<Self> {
        if !(eta >= T::zero() && eta <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "efficiency must lie in [0, 1], got {eta}"
            )));
        }
        Ok(Self { eta })
    }

    pub fn lossless() -> Self {
        Self { eta: T::one() }
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    /// `1 - (1 - eta)^q`
    pub fn click_probability(&self, photons: u32) -> T {
        if photons == 0 {
            T::zero()
        } else if self.eta == T::one() {
            T::one()
        } else {
            T::one() - (T::one() - self.eta).powi(photons as i32)
        }
    }
}

/// Per-mode click probabilities for one output Fock state.
pub fn click_probabilities<T: Real>(q: &FockState, loss: &LossModel<T>) -> Vec<T> {
    q.occupations()
        .iter()
        .map(|&n| loss.click_probability(n))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThresholdPattern {
    clicks: Vec<bool>,
}

impl ThresholdPattern {
    pub fn new(clicks: Vec<bool>) -> Self {
        Self { clicks }
    }

    /// Parse a `0`/`1` string such as `1100`.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidParameter(format!("bad click pattern {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    fn from_mask(mask: u32, modes: usize) -> Self {
        Self::new((0..modes).map(|m| mask >> m & 1 == 1).collect())
    }

    pub fn clicks(&self) -> &[bool] {
        &self.clicks
    }

    pub fn weight(&self) -> usize {
        self.clicks.iter().filter(|&&c| c).count()
    }

    pub fn label(&self) -> String {
        self.clicks.iter().map(|&c| if c { '1' } else { '0' }).collect()
    }
}

/// Threshold-pattern distribution, coarse-grained from the PNR
/// distribution. Patterns of zero probability are omitted.
pub fn threshold_distribution<T: Real>(
    dist: &PnrDistribution<T>,
    loss: &LossModel<T>,
) -> Result<BTreeMap<ThresholdPattern, T>> {
    let modes = dist.basis().modes();
    if modes > MAX_PATTERN_MODES {
        return Err(Error::Capacity(format!(
            "{modes} modes is too many to enumerate click patterns; use coincidence_vector"
        )));
    }
    let mut acc: HashMap<u32, T> = HashMap::new();
    for (q, p) in dist.iter() {
        if p == T::zero() {
            continue;
        }
        let occupied: Vec<(usize, T)> = q
            .occupations()
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(m, &n)| (m, loss.click_probability(n)))
            .collect();
        // Modes without photons never click, so only subsets of the occupied
        // modes carry weight.
        for subset in 0u32..(1 << occupied.len()) {
            let mut mask = 0u32;
            let mut w = p;
            for (bit, &(mode, c)) in occupied.iter().enumerate() {
                if subset >> bit & 1 == 1 {
                    mask |= 1 << mode;
                    w *= c;
                } else {
                    w *= T::one() - c;
                }
            }
            if w != T::zero() {
                *acc.entry(mask).or_insert_with(T::zero) += w;
            }
        }
    }
    Ok(acc
        .into_iter()
        .map(|(mask, p)| (ThresholdPattern::from_mask(mask, modes), p))
        .collect())
}

/// Pairwise coincidence probabilities `C_ij`, `i < j`, in lexicographic pair
/// order `(1,2), (1,3), ..., (M-1,M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceVector<T> {
    modes: usize,
    values: Vec<T>,
}

/// Number of mode pairs, `C(M, 2)`.
pub fn pair_count(modes: usize) -> usize {
    modes * modes.saturating_sub(1) / 2
}

/// Position of the 0-based pair `(i, j)`, `i < j`, in lexicographic order.
pub fn pair_index(modes: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < modes);
    i * (2 * modes - i - 1) / 2 + (j - i - 1)
}

/// 0-based pairs in lexicographic order.
pub fn pairs(modes: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..modes).flat_map(move |i| (i + 1..modes).map(move |j| (i, j)))
}

impl<T: Real> CoincidenceVector<T> {
    pub fn zeros(modes: usize) -> Self {
        Self {
            modes,
            values: vec![T::zero(); pair_count(modes)],
        }
    }

    pub fn from_values(modes: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != pair_count(modes) {
            return Err(Error::Shape(format!(
                "{} coincidence values for {modes} modes (expected {})",
                values.len(),
                pair_count(modes)
            )));
        }
        Ok(Self { modes, values })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value for the 1-based pair `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[pair_index(self.modes, i - 1, j - 1)]
    }

    pub fn total(&self) -> T {
        self.values.iter().copied().sum()
    }

    /// Column labels `C_1_2, C_1_3, ...`.
    pub fn labels(modes: usize) -> Vec<String> {
        pairs(modes)
            .map(|(i, j)| format!("C_{}_{}", i + 1, j + 1))
            .collect()
    }

    /// `pair,value` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pair,value\n");
        for (label, v) in Self::labels(self.modes).iter().zip(&self.values) {
            let _ = writeln!(out, "{label},{v}");
        }
        out
    }
}

/// `C_ij = sum_l p(Q_l) Pr(click_i | Q_l) Pr(click_j | Q_l)`: the pattern sum
/// with every other mode marginalized out, linear in the basis size.
pub fn coincidence_vector<T: Real>(
    dist: &PnrDistribution<T>,
    loss: &LossModel<T>,
) -> CoincidenceVector<T> {
    let modes = dist.basis().modes();
    let mut out = CoincidenceVector::zeros(modes);
    let mut occupied: Vec<(usize, T)> = Vec::with_capacity(dist.basis().photon_number());
    for (q, p) in dist.iter() {
        if p == T::zero() {
            continue;
        }
        occupied.clear();
        occupied.extend(
            q.occupations()
                .iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(m, &n)| (m, loss.click_probability(n))),
        );
        for (a, &(i, ci)) in occupied.iter().enumerate() {
            let pi = p * ci;
            for &(j, cj) in &occupied[a + 1..] {
                out.values[pair_index(modes, i, j)] += pi * cj;
            }
        }
    }
    out
}

/// Coincidences as the explicit sum `sum_r r_i r_j p(r)` over click patterns.
pub fn coincidences_from_patterns<T: Real>(
    patterns: &BTreeMap<ThresholdPattern, T>,
    modes: usize,
) -> CoincidenceVector<T> {
    let mut out = CoincidenceVector::zeros(modes);
    for (pattern, &p) in patterns {
        for (idx, (i, j)) in pairs(modes).enumerate() {
            if pattern.clicks[i] && pattern.clicks[j] {
                out.values[idx] += p;
            }
        }
    }
    out
}

/// Finite-ensemble estimate of the coincidence vector from `shots`
/// measurements, with the default Gaussian threshold.
pub fn sample_coincidences<T: Real, R: Rng + ?Sized>(
    dist: &PnrDistribution<T>,
    loss: &LossModel<T>,
    shots: u64,
    rng: &mut R,
) -> Result<CoincidenceVector<T>> {
    sample_coincidences_with(dist, loss, shots, DEFAULT_GAUSSIAN_THRESHOLD, rng)
}

/// Up to `gaussian_threshold` shots the estimate is an exact draw: Fock
/// outcomes are multinomial in the PNR probabilities, each outcome's photons
/// are thinned with efficiency `eta`, and every clicked pair is counted.
/// Multinomial counts are drawn by sequential binomials, which has the same
/// law as drawing the shots one at a time.
///
/// Above the threshold each feature is `C_ij + z sqrt(C_ij (1 - C_ij) / shots)`
/// with independent standard normal `z`, clipped to `[0, 1]`. Correlations
/// between features are ignored in that regime.
pub fn sample_coincidences_with<T: Real, R: Rng + ?Sized>(
    dist: &PnrDistribution<T>,
    loss: &LossModel<T>,
    shots: u64,
    gaussian_threshold: u64,
    rng: &mut R,
) -> Result<CoincidenceVector<T>> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shot count must be at least 1".into()));
    }
    let modes = dist.basis().modes();
    if shots > gaussian_threshold {
        let exact = coincidence_vector(dist, loss);
        let n = shots as f64;
        let values = exact
            .values
            .iter()
            .map(|&c| {
                let c = c.to_f64_lossy().clamp(0.0, 1.0);
                let z: f64 = StandardNormal.sample(rng);
                T::lit((c + z * (c * (1.0 - c) / n).sqrt()).clamp(0.0, 1.0))
            })
            .collect();
        return Ok(CoincidenceVector { modes, values });
    }

    let mut counts = vec![0u64; pair_count(modes)];
    let mut remaining = shots;
    let mut mass = 1.0f64;
    let mut last_nonzero = None;
    let probs: Vec<f64> = dist.probs().iter().map(|p| p.to_f64_lossy()).collect();
    let states = dist.basis().states();
    let mut per_state: Vec<(usize, u64)> = Vec::new();
    for (idx, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if p <= 0.0 {
            continue;
        }
        last_nonzero = Some(idx);
        let k = draw_binomial(remaining, p / mass, rng)?;
        mass -= p;
        if k > 0 {
            per_state.push((idx, k));
            remaining -= k;
        }
    }
    // Rounding in the running mass can leave a few shots unassigned.
    if remaining > 0 {
        let idx = last_nonzero
            .ok_or_else(|| Error::Numeric("distribution has no positive entry".into()))?;
        per_state.push((idx, remaining));
    }

    let mut occupied: Vec<(usize, f64)> = Vec::new();
    for (idx, k) in per_state {
        occupied.clear();
        occupied.extend(
            states[idx]
                .occupations()
                .iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(m, &n)| (m, loss.click_probability(n).to_f64_lossy())),
        );
        if occupied.iter().all(|&(_, c)| c >= 1.0) {
            add_pairs(&mut counts, modes, &occupied, u32::MAX, k);
            continue;
        }
        // Thinned outcomes: multinomial over the click subsets of the
        // occupied modes.
        let mut left = k;
        let mut left_mass = 1.0f64;
        let subsets = 1u32 << occupied.len();
        for subset in 0..subsets {
            if left == 0 {
                break;
            }
            let w: f64 = occupied
                .iter()
                .enumerate()
                .map(|(b, &(_, c))| if subset >> b & 1 == 1 { c } else { 1.0 - c })
                .product();
            let draw = if subset + 1 == subsets {
                left
            } else if w <= 0.0 {
                0
            } else {
                draw_binomial(left, w / left_mass, rng)?
            };
            left_mass -= w;
            left -= draw;
            if draw > 0 {
                add_pairs(&mut counts, modes, &occupied, subset, draw);
            }
        }
    }
    let n = T::from_u64(shots).unwrap();
    let values = counts
        .into_iter()
        .map(|c| T::from_u64(c).unwrap() / n)
        .collect();
    Ok(CoincidenceVector { modes, values })
}

fn add_pairs(counts: &mut [u64], modes: usize, occupied: &[(usize, f64)], subset: u32, k: u64) {
    for (a, &(i, _)) in occupied.iter().enumerate() {
        if subset >> a & 1 == 0 {
            continue;
        }
        for (b, &(j, _)) in occupied.iter().enumerate().skip(a + 1) {
            if subset >> b & 1 == 1 {
                counts[pair_index(modes, i, j)] += k;
            }
        }
    }
}

fn draw_binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> Result<u64> {
    let p = p.clamp(0.0, 1.0);
    if p == 0.0 {
        return Ok(0);
    }
    if p == 1.0 {
        return Ok(n);
    }
    Binomial::new(n, p)
        .map(|b| b.sample(rng))
        .map_err(|e| Error::Numeric(format!("binomial({n}, {p}): {e}")))
}
