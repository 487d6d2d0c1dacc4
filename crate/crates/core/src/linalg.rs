//! Small dense linear algebra over [`Real`] scalars.

use ndarray::Array2;
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Real, Result};

/// Eigenpairs of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: Array2<T>,
}

/// Cyclic Jacobi eigendecomposition. Accurate to working precision for
/// symmetric input; only the upper triangle is read.
pub fn symmetric_eigen<T: Real>(a: &Array2<T>) -> Result<SymmetricEigen<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Shape(format!(
            "eigendecomposition needs a square matrix, got {:?}",
            a.dim()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("non-finite entry in symmetric matrix".into()));
    }
    let mut m = Array2::from_shape_fn((n, n), |(i, j)| if i <= j { a[[i, j]] } else { a[[j, i]] });
    let mut v = Array2::from_shape_fn((n, n), |(i, j)| if i == j { T::one() } else { T::zero() });

    let scale: T = m.iter().map(|&x| x * x).sum::<T>().sqrt();
    let tiny = T::epsilon() * T::epsilon() * scale * scale;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += m[[p, q]] * m[[p, q]];
            }
        }
        if off <= tiny || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq == T::zero() {
                    continue;
                }
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap());
    let values = order.iter().map(|&i| m[[i, i]]).collect();
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| v[[r, order[c]]]);
    Ok(SymmetricEigen { values, vectors })
}

/// Haar-random unitary: Gram-Schmidt orthonormalization of a complex
/// Ginibre matrix. The implied `R` has a positive real diagonal, which is
/// what makes the resulting `Q` Haar distributed.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Array2<Complex<T>> {
    let mut q = Array2::from_shape_fn((n, n), |_| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(T::lit(re), T::lit(im))
    });
    // Modified Gram-Schmidt on columns.
    for j in 0..n {
        for k in 0..j {
            let mut dot = Complex::new(T::zero(), T::zero());
            for i in 0..n {
                dot += q[[i, k]].conj() * q[[i, j]];
            }
            for i in 0..n {
                let qik = q[[i, k]];
                q[[i, j]] -= qik * dot;
            }
        }
        let norm = (0..n).map(|i| q[[i, j]].norm_sqr()).sum::<T>().sqrt();
        for i in 0..n {
            q[[i, j]] = q[[i, j]] / norm;
        }
    }
    q
}
