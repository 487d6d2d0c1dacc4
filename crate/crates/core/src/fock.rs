//! Fock-space bookkeeping and exact multiphoton transition probabilities.
//!
//! The probability of scattering the input state `S` into the output state
//! `Q` through the unitary `V` is `|per(V_{Q,S})|^2 / (prod s_i! prod q_j!)`,
//! where `V_{Q,S}` repeats column `i` of `V` `s_i` times and row `j` `q_j`
//! times.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use num_complex::Complex;
use num_traits::Zero;

use crate::{Error, Real, Result};

/// Largest basis we are willing to index.
pub const MAX_BASIS_SIZE: u64 = u32::MAX as u64;

/// Occupation numbers over the M modes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    occupations: Vec<u32>,
}

impl FockState {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self { occupations }
    }

    /// One photon in each listed mode (0-based).
    pub fn single_photons(modes: usize, occupied: &[usize]) -> Result<Self> {
        let mut occupations = vec![0; modes];
        for &m in occupied {
            let slot = occupations.get_mut(m).ok_or_else(|| {
                Error::InvalidParameter(format!("mode {m} outside {modes} modes"))
            })?;
            *slot += 1;
        }
        Ok(Self { occupations })
    }

    pub fn occupations(&self) -> &[u32] {
        &self.occupations
    }

    pub fn modes(&self) -> usize {
        self.occupations.len()
    }

    pub fn photon_number(&self) -> usize {
        self.occupations.iter().map(|&q| q as usize).sum()
    }

    /// Mode index of every photon, with multiplicity, in ascending order.
    pub fn photon_modes(&self) -> Vec<usize> {
        self.occupations
            .iter()
            .enumerate()
            .flat_map(|(m, &q)| std::iter::repeat_n(m, q as usize))
            .collect()
    }

    /// `prod_j q_j!`
    pub fn factorial_product<T: Real>(&self) -> T {
        self.occupations
            .iter()
            .filter(|&&q| q > 1)
            .map(|&q| (1..=q).fold(T::one(), |acc, k| acc * T::from_u32(k).unwrap()))
            .fold(T::one(), |a, b| a * b)
    }

    /// Compact label such as `1100`; dot-separated when any mode holds ten or
    /// more photons.
    pub fn label(&self) -> String {
        if self.occupations.iter().all(|&q| q < 10) {
            self.occupations.iter().map(|q| q.to_string()).collect()
        } else {
            let parts: Vec<_> = self.occupations.iter().map(|q| q.to_string()).collect();
            parts.join(".")
        }
    }
}

/// All N-photon states over M modes, in reverse-lexicographic order of the
/// occupation vector: `(N,0,..,0)` first and `(0,..,0,N)` last.
#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: usize,
    photons: usize,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

/// `C(n, k)` or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    u64::try_from(acc).ok()
}

impl FockBasis {
    pub fn enumerate(modes: usize, photons: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter("a Fock basis needs at least one mode".into()));
        }
        let size = binomial((modes + photons - 1) as u64, photons as u64)
            .filter(|&s| s <= MAX_BASIS_SIZE)
            .ok_or_else(|| {
                Error::Capacity(format!(
                    "the {photons}-photon basis over {modes} modes exceeds {MAX_BASIS_SIZE} states"
                ))
            })? as usize;

        let mut states = Vec::with_capacity(size);
        let mut current = vec![0u32; modes];
        fill(&mut current, 0, photons as u32, &mut states);
        debug_assert_eq!(states.len(), size);
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self {
            modes,
            photons,
            states,
            index,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photon_number(&self) -> usize {
        self.photons
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        self.index.get(state).copied()
    }
}

fn fill(current: &mut [u32], mode: usize, remaining: u32, out: &mut Vec<FockState>) {
    if mode + 1 == current.len() {
        current[mode] = remaining;
        out.push(FockState::new(current.to_vec()));
        current[mode] = 0;
        return;
    }
    for q in (0..=remaining).rev() {
        current[mode] = q;
        fill(current, mode + 1, remaining - q, out);
    }
    current[mode] = 0;
}

/// Largest matrix [`permanent`] accepts; `2^(n-1)` terms beyond this are
/// out of reach anyway.
pub const MAX_PERMANENT_SIZE: usize = 40;

/// Permanent by Glynn's formula with Gray-code ordering, `O(2^(n-1) n)`.
pub fn permanent<T: Real>(a: ArrayView2<Complex<T>>) -> Result<Complex<T>> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(Error::Shape(format!(
            "permanent needs a square matrix, got {rows}x{cols}"
        )));
    }
    if rows > MAX_PERMANENT_SIZE {
        return Err(Error::Capacity(format!(
            "{rows}x{rows} permanent exceeds the {MAX_PERMANENT_SIZE}x{MAX_PERMANENT_SIZE} limit"
        )));
    }
    let data: Vec<Complex<T>> = a.iter().copied().collect();
    let mut sums = vec![Complex::zero(); rows];
    Ok(glynn(&data, rows, &mut sums))
}

/// `data` is row-major `n x n`; `sums` is scratch of length `n`.
fn glynn<T: Real>(data: &[Complex<T>], n: usize, sums: &mut [Complex<T>]) -> Complex<T> {
    match n {
        0 => return Complex::new(T::one(), T::zero()),
        1 => return data[0],
        _ => {}
    }
    // sums[j] = sum_i delta_i a_ij, all deltas starting at +1.
    for (j, s) in sums.iter_mut().enumerate() {
        *s = (0..n).map(|i| data[i * n + j]).fold(Complex::zero(), |a, b| a + b);
    }
    // Bit i set means row i currently carries a minus sign.
    let mut signs = 0u64;
    let mut total: Complex<T> = sums.iter().fold(Complex::new(T::one(), T::zero()), |a, &b| a * b);
    let mut negative = false;
    let two = T::lit(2.0);
    for k in 1u64..(1u64 << (n - 1)) {
        let row = k.trailing_zeros() as usize + 1;
        signs ^= 1 << row;
        let flipped = signs >> row & 1 == 1;
        let r = &data[row * n..row * n + n];
        if flipped {
            for (s, &x) in sums.iter_mut().zip(r) {
                *s -= x * two;
            }
        } else {
            for (s, &x) in sums.iter_mut().zip(r) {
                *s += x * two;
            }
        }
        negative = !negative;
        let prod = sums.iter().fold(Complex::new(T::one(), T::zero()), |a, &b| a * b);
        if negative {
            total -= prod;
        } else {
            total += prod;
        }
    }
    total / T::from_u64(1u64 << (n - 1)).unwrap()
}

fn check_pair(s: &FockState, q: &FockState) -> Result<()> {
    if s.modes() != q.modes() {
        return Err(Error::Basis(format!(
            "input has {} modes, output has {}",
            s.modes(),
            q.modes()
        )));
    }
    if s.photon_number() != q.photon_number() {
        return Err(Error::Basis(format!(
            "photon number mismatch: input {}, output {}",
            s.photon_number(),
            q.photon_number()
        )));
    }
    Ok(())
}

fn check_unitary_shape<T>(v: &ArrayView2<Complex<T>>, modes: usize) -> Result<()> {
    if v.dim() != (modes, modes) {
        return Err(Error::Shape(format!(
            "expected a {modes}x{modes} transfer matrix, got {:?}",
            v.dim()
        )));
    }
    Ok(())
}

/// `V_{Q,S}`: column `i` of `v` repeated `s_i` times, row `j` repeated `q_j` times.
pub fn scattering_submatrix<T: Real>(
    v: ArrayView2<Complex<T>>,
    s: &FockState,
    q: &FockState,
) -> Result<Array2<Complex<T>>> {
    check_pair(s, q)?;
    check_unitary_shape(&v, s.modes())?;
    let cols = s.photon_modes();
    let rows = q.photon_modes();
    Ok(Array2::from_shape_fn((rows.len(), cols.len()), |(r, c)| {
        v[[rows[r], cols[c]]]
    }))
}

fn checked_probability<T: Real>(p: T) -> Result<T> {
    let slack = T::lit(1e-12);
    if !(p >= -slack && p <= T::one() + slack) {
        return Err(Error::Numeric(format!(
            "transition probability {p} outside [0, 1]"
        )));
    }
    Ok(p.max(T::zero()).min(T::one()))
}

pub fn transition_probability<T: Real>(
    v: ArrayView2<Complex<T>>,
    s: &FockState,
    q: &FockState,
) -> Result<T> {
    let sub = scattering_submatrix(v, s, q)?;
    let per = permanent(sub.view())?;
    let norm = s.factorial_product::<T>() * q.factorial_product::<T>();
    checked_probability(per.norm_sqr() / norm)
}

/// Output photon-number distribution over a basis.
#[derive(Debug, Clone)]
pub struct PnrDistribution<T> {
    basis: Arc<FockBasis>,
    probs: Vec<T>,
}

impl<T: Real> PnrDistribution<T> {
    /// Validates length, range and normalization (to `1e-9`, or `1e-4` for
    /// single precision).
    pub fn new(basis: Arc<FockBasis>, probs: Vec<T>) -> Result<Self> {
        if probs.len() != basis.len() {
            return Err(Error::Basis(format!(
                "{} probabilities for a basis of {} states",
                probs.len(),
                basis.len()
            )));
        }
        let mut clamped = Vec::with_capacity(probs.len());
        for p in probs {
            clamped.push(checked_probability(p)?);
        }
        let total: T = clamped.iter().copied().sum();
        let tol = if std::mem::size_of::<T>() >= 8 { 1e-9 } else { 1e-4 };
        if (total - T::one()).abs() > T::lit(tol) {
            return Err(Error::Numeric(format!(
                "distribution sums to {total}, not 1"
            )));
        }
        Ok(Self {
            basis,
            probs: clamped,
        })
    }

    /// All mass on one state of the basis.
    pub fn point_mass(basis: Arc<FockBasis>, state: &FockState) -> Result<Self> {
        let idx = basis
            .index_of(state)
            .ok_or_else(|| Error::Basis(format!("state {} not in basis", state.label())))?;
        let mut probs = vec![T::zero(); basis.len()];
        probs[idx] = T::one();
        Ok(Self { basis, probs })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockState, T)> + '_ {
        self.basis.states().iter().zip(self.probs.iter().copied())
    }

    /// `index,occupation,probability` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,occupation,probability\n");
        for (i, (state, p)) in self.iter().enumerate() {
            let _ = writeln!(out, "{i},{},{p}", state.label());
        }
        out
    }
}

/// Output distribution of `s` through the full transfer matrix `v`.
pub fn output_distribution<T: Real>(
    v: ArrayView2<Complex<T>>,
    s: &FockState,
    basis: &Arc<FockBasis>,
) -> Result<PnrDistribution<T>> {
    if basis.modes() != s.modes() || basis.photon_number() != s.photon_number() {
        return Err(Error::Basis(format!(
            "input state ({} modes, {} photons) does not match basis ({} modes, {} photons)",
            s.modes(),
            s.photon_number(),
            basis.modes(),
            basis.photon_number()
        )));
    }
    check_unitary_shape(&v, s.modes())?;
    let input_cols = s.photon_modes();
    let columns = Array2::from_shape_fn((s.modes(), input_cols.len()), |(r, c)| {
        v[[r, input_cols[c]]]
    });
    distribution_from_columns(columns.view(), s.factorial_product(), basis)
}

/// Output distribution given only the transfer-matrix columns seen by the
/// photons: column `c` of `columns` is the column of `V` for photon `c`
/// (repeated for multiply occupied input modes). `input_norm` is
/// `prod_i s_i!`.
pub fn distribution_from_columns<T: Real>(
    columns: ArrayView2<Complex<T>>,
    input_norm: T,
    basis: &Arc<FockBasis>,
) -> Result<PnrDistribution<T>> {
    let (modes, n) = columns.dim();
    if modes != basis.modes() || n != basis.photon_number() {
        return Err(Error::Basis(format!(
            "{modes}x{n} column block does not match basis ({} modes, {} photons)",
            basis.modes(),
            basis.photon_number()
        )));
    }
    let mut scratch = vec![Complex::zero(); n * n];
    let mut sums = vec![Complex::zero(); n];
    let mut probs = Vec::with_capacity(basis.len());
    for q in basis.states() {
        let mut r = 0;
        for (mode, &occ) in q.occupations().iter().enumerate() {
            for _ in 0..occ {
                for c in 0..n {
                    scratch[r * n + c] = columns[[mode, c]];
                }
                r += 1;
            }
        }
        let per = glynn(&scratch, n, &mut sums);
        probs.push(per.norm_sqr() / (input_norm * q.factorial_product::<T>()));
    }
    PnrDistribution::new(basis.clone(), probs)
}
