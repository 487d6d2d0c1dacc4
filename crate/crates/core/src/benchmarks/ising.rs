//! Open Ising chain `H = -J sum s^z_i s^z_{i+1} + h_x sum s^x_i + h_z sum s^z_i`
//! evolved exactly from the all-up product state.
//!
//! Basis state `b` has spin `i` (0-based) down when bit `i` of `b` is set,
//! so the all-up state is index 0.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use super::min_max_normalize;
use crate::linalg::{symmetric_eigen, SymmetricEigen};
use crate::{Error, Real, Result};

pub const MAX_ISING_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingParams<T> {
    pub sites: usize,
    pub j: T,
    pub hx: T,
    pub hz: T,
    pub dt: T,
    /// 1-based site whose `s^z` is recorded.
    pub observable_site: usize,
}

impl<T: Real> Default for IsingParams<T> {
    fn default() -> Self {
        Self {
            sites: 5,
            j: T::one(),
            hx: T::lit(1.05),
            hz: T::lit(-0.5),
            dt: T::lit(0.05),
            observable_site: 3,
        }
    }
}

/// `+1` for up, `-1` for down.
fn spin_z<T: Real>(state: usize, site: usize) -> T {
    if state >> site & 1 == 1 {
        -T::one()
    } else {
        T::one()
    }
}

/// Dense Hamiltonian with its spectral decomposition.
#[derive(Debug, Clone)]
pub struct IsingChain<T> {
    params: IsingParams<T>,
    hamiltonian: Array2<T>,
    eigen: SymmetricEigen<T>,
}

impl<T: Real> IsingChain<T> {
    pub fn new(params: IsingParams<T>) -> Result<Self> {
        let l = params.sites;
        if !(2..=MAX_ISING_SITES).contains(&l) {
            return Err(Error::Capacity(format!(
                "Ising chain needs 2..={MAX_ISING_SITES} sites for dense evolution, got {l}"
            )));
        }
        if !(1..=l).contains(&params.observable_site) {
            return Err(Error::InvalidParameter(format!(
                "observable site {} outside 1..={l}",
                params.observable_site
            )));
        }
        let dim = 1usize << l;
        let mut h = Array2::zeros((dim, dim));
        for b in 0..dim {
            let mut diag = T::zero();
            for i in 0..l - 1 {
                diag -= params.j * spin_z::<T>(b, i) * spin_z::<T>(b, i + 1);
            }
            for i in 0..l {
                diag += params.hz * spin_z::<T>(b, i);
                h[[b ^ (1 << i), b]] += params.hx;
            }
            h[[b, b]] = diag;
        }
        let eigen = symmetric_eigen(&h)?;
        Ok(Self {
            params,
            hamiltonian: h,
            eigen,
        })
    }

    pub fn params(&self) -> &IsingParams<T> {
        &self.params
    }

    pub fn hamiltonian(&self) -> &Array2<T> {
        &self.hamiltonian
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn all_up(&self) -> Array1<Complex<T>> {
        let mut psi = Array1::zeros(self.dim());
        psi[0] = Complex::new(T::one(), T::zero());
        psi
    }

    /// `exp(-i H t) psi`.
    pub fn evolve(&self, psi: &Array1<Complex<T>>, t: T) -> Array1<Complex<T>> {
        let v = &self.eigen.vectors;
        let n = self.dim();
        let mut coeffs = Array1::<Complex<T>>::zeros(n);
        for k in 0..n {
            let mut c = Complex::new(T::zero(), T::zero());
            for b in 0..n {
                c += psi[b] * v[[b, k]];
            }
            coeffs[k] = c * Complex::from_polar(T::one(), -self.eigen.values[k] * t);
        }
        let mut out = Array1::zeros(n);
        for b in 0..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..n {
                acc += coeffs[k] * v[[b, k]];
            }
            out[b] = acc;
        }
        out
    }

    /// `<psi|s^z_site|psi>` for a 1-based site.
    pub fn magnetization(&self, psi: &Array1<Complex<T>>, site: usize) -> T {
        psi.iter()
            .enumerate()
            .map(|(b, a)| a.norm_sqr() * spin_z::<T>(b, site - 1))
            .sum()
    }

    pub fn energy(&self, psi: &Array1<Complex<T>>) -> T {
        let n = self.dim();
        let mut e = Complex::new(T::zero(), T::zero());
        for r in 0..n {
            let mut hpsi = Complex::new(T::zero(), T::zero());
            for c in 0..n {
                hpsi += psi[c] * self.hamiltonian[[r, c]];
            }
            e += psi[r].conj() * hpsi;
        }
        e.re
    }
}

/// Raw `<s^z_site(t_k)>` for `t_k = k dt`, `k = 0..steps`.
pub fn ising_magnetization<T: Real>(params: &IsingParams<T>, steps: usize) -> Result<Vec<T>> {
    let chain = IsingChain::new(*params)?;
    let psi0 = chain.all_up();
    Ok((0..steps)
        .map(|k| {
            let psi = chain.evolve(&psi0, params.dt * T::from_usize_lossy(k));
            chain.magnetization(&psi, params.observable_site)
        })
        .collect())
}

/// Magnetization samples min-max normalized to `[0, 1]`.
pub fn ising_series<T: Real>(params: &IsingParams<T>, steps: usize) -> Result<Vec<T>> {
    min_max_normalize(&ising_magnetization(params, steps)?)
}
