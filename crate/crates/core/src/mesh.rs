//! Reconfigurable MZI mesh: element unitaries, the Galton-style default
//! layout and composition into the full M x M transfer matrix.
//!
//! Modes are numbered from 1 in [`MziSpec`] and in the layout dump, to match
//! the usual optics convention; matrix indices are 0-based.

use std::fmt::Write as _;

use ndarray::Array2;
use num_complex::Complex;
use rand::Rng;
use serde::Serialize;

use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MziRole {
    /// Encodes the current input sample.
    Input,
    /// Reprogrammed from the previous coincidence vector.
    Wedge,
    /// Fixed random setting for the whole run.
    Static,
    /// Never illuminated; acts as the identity.
    Unused,
}

impl MziRole {
    pub fn as_str(self) -> &'static str {
        match self {
            MziRole::Input => "input",
            MziRole::Wedge => "wedge",
            MziRole::Static => "static",
            MziRole::Unused => "unused",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MziSpec {
    /// 1-based layer index.
    pub layer: usize,
    /// 1-based adjacent mode pair `(i, i + 1)`.
    pub modes: (usize, usize),
    pub role: MziRole,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MziParams<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> MziParams<T> {
    pub fn new(theta: T, phi: T) -> Self {
        Self { theta, phi }
    }

    /// The 50:50 setting `(pi/4, 0)`.
    pub fn balanced() -> Self {
        Self::new(T::FRAC_PI_4(), T::zero())
    }

    pub fn identity() -> Self {
        Self::new(T::zero(), T::zero())
    }
}

pub type Mzi2x2<T> = [[Complex<T>; 2]; 2];

/// `[[e^{i phi} cos theta, -sin theta], [e^{i phi} sin theta, cos theta]]`.
pub fn mzi_unitary<T: Real>(params: MziParams<T>) -> Result<Mzi2x2<T>> {
    let MziParams { theta, phi } = params;
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "MZI parameters must be finite (theta = {theta}, phi = {phi})"
        )));
    }
    let (s, c) = theta.sin_cos();
    let phase = Complex::from_polar(T::one(), phi);
    Ok([
        [phase * c, Complex::new(-s, T::zero())],
        [phase * s, Complex::new(c, T::zero())],
    ])
}

/// Placement and role of every MZI in an M-mode rectangular mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshLayout {
    modes: usize,
    layers: usize,
    /// Layer-major, then by first mode.
    mzis: Vec<MziSpec>,
    /// First mode (1-based) of the four-mode central input block.
    block_start: usize,
    wedge_depth: usize,
}

impl MeshLayout {
    /// Galton-style layout with `layers = modes`.
    ///
    /// Layer 1 holds the two input MZIs on the central block `c..=c+3` with
    /// `c = M/2 - 1`. Layer `l` in `2..=L_w` holds wedge MZIs whose pair lies
    /// inside the light cone `[c - (l-1), c + 3 + (l-1)]`, where `L_w` is the
    /// first layer whose cone covers every mode. Everything outside the cone
    /// up to `L_w` is unused and every later layer is static.
    pub fn build_default(modes: usize, photons: usize) -> Result<Self> {
        if modes < 8 || modes % 2 != 0 {
            return Err(Error::UnsupportedGeometry(format!(
                "need an even mode count >= 8, got {modes}"
            )));
        }
        if photons > modes {
            return Err(Error::UnsupportedGeometry(format!(
                "{photons} photons do not fit in {modes} modes"
            )));
        }
        let layers = modes;
        let c = modes / 2 - 1;
        let cone = |layer: usize| (c + 1).saturating_sub(layer)..=c + 2 + layer;
        let wedge_depth = (2..=layers)
            .find(|&l| {
                let r = cone(l);
                *r.start() <= 1 && *r.end() >= modes
            })
            .expect("cone reaches both edges before the last layer");

        let mut mzis = Vec::new();
        for layer in 1..=layers {
            let first = if layer % 2 == 1 { 1 } else { 2 };
            for a in (first..modes).step_by(2) {
                let b = a + 1;
                let role = if layer == 1 {
                    if a >= c && b <= c + 3 {
                        MziRole::Input
                    } else {
                        MziRole::Unused
                    }
                } else if layer <= wedge_depth {
                    let r = cone(layer);
                    if a >= *r.start() && b <= *r.end() {
                        MziRole::Wedge
                    } else {
                        MziRole::Unused
                    }
                } else {
                    MziRole::Static
                };
                mzis.push(MziSpec {
                    layer,
                    modes: (a, b),
                    role,
                });
            }
        }
        Ok(Self {
            modes,
            layers,
            mzis,
            block_start: c,
            wedge_depth,
        })
    }

    /// Arbitrary layout, mostly for tests and small experiments. Pairs must
    /// be adjacent, in range and disjoint within a layer.
    pub fn from_specs(modes: usize, mut mzis: Vec<MziSpec>) -> Result<Self> {
        mzis.sort_by_key(|m| (m.layer, m.modes.0));
        for (k, m) in mzis.iter().enumerate() {
            let (a, b) = m.modes;
            if m.layer == 0 || a == 0 || b != a + 1 || b > modes {
                return Err(Error::UnsupportedGeometry(format!(
                    "invalid MZI placement {m:?} in a {modes}-mode mesh"
                )));
            }
            if let Some(prev) = k.checked_sub(1).map(|p| mzis[p]) {
                if prev.layer == m.layer && prev.modes.1 >= a {
                    return Err(Error::UnsupportedGeometry(format!(
                        "overlapping MZIs in layer {}",
                        m.layer
                    )));
                }
            }
        }
        let layers = mzis.iter().map(|m| m.layer).max().unwrap_or(0);
        let wedge_depth = mzis
            .iter()
            .filter(|m| m.role == MziRole::Wedge)
            .map(|m| m.layer)
            .max()
            .unwrap_or(0);
        Ok(Self {
            modes,
            layers,
            mzis,
            block_start: (modes / 2).saturating_sub(1).max(1),
            wedge_depth,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn mzis(&self) -> &[MziSpec] {
        &self.mzis
    }

    /// Last layer containing wedge MZIs (`L_w`).
    pub fn wedge_depth(&self) -> usize {
        self.wedge_depth
    }

    /// 1-based modes of the central input block.
    pub fn central_block(&self) -> std::ops::RangeInclusive<usize> {
        self.block_start..=self.block_start + 3
    }

    pub fn indices_with_role(&self, role: MziRole) -> Vec<usize> {
        self.mzis
            .iter()
            .enumerate()
            .filter(|(_, m)| m.role == role)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn count_role(&self, role: MziRole) -> usize {
        self.mzis.iter().filter(|m| m.role == role).count()
    }

    /// Number of feedback-programmed MZIs, `R_fb`.
    pub fn wedge_size(&self) -> usize {
        self.count_role(MziRole::Wedge)
    }

    /// One row per MZI: index, layer, modes, role.
    pub fn dump_table(&self) -> String {
        let mut out = String::from("index\tlayer\tmodes\trole\n");
        for (i, m) in self.mzis.iter().enumerate() {
            let _ = writeln!(
                out,
                "{i}\t{}\t{}-{}\t{}",
                m.layer,
                m.modes.0,
                m.modes.1,
                m.role.as_str()
            );
        }
        out
    }
}

/// Per-MZI settings, indexed like [`MeshLayout::mzis`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeshParams<T> {
    entries: Vec<Option<MziParams<T>>>,
}

impl<T: Real> MeshParams<T> {
    pub fn empty(layout: &MeshLayout) -> Self {
        Self {
            entries: vec![None; layout.mzis.len()],
        }
    }

    /// Every MZI of the layout at `params`, including unused ones.
    pub fn uniform(layout: &MeshLayout, params: MziParams<T>) -> Self {
        Self {
            entries: vec![Some(params); layout.mzis.len()],
        }
    }

    pub fn set(&mut self, index: usize, params: MziParams<T>) -> Result<()> {
        let len = self.entries.len();
        let slot = self.entries.get_mut(index).ok_or_else(|| {
            Error::InvalidParameter(format!("MZI index {index} out of range ({len} MZIs)"))
        })?;
        *slot = Some(params);
        Ok(())
    }

    pub fn get(&self, index: usize) -> Option<MziParams<T>> {
        self.entries.get(index).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(Option::is_none)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, MziParams<T>)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (i, p)))
    }
}

/// Static MZIs draw `theta ~ U[0, pi/2]`, `phi ~ U[0, 2 pi)`; input MZIs sit at
/// the balanced point and wedge MZIs at the zero-feedback base point
/// `(pi/4, pi)`. Unused MZIs get no entry.
pub fn sample_static_params<T: Real, R: Rng + ?Sized>(
    layout: &MeshLayout,
    rng: &mut R,
) -> MeshParams<T> {
    let mut params = MeshParams::empty(layout);
    for (i, m) in layout.mzis.iter().enumerate() {
        let p = match m.role {
            MziRole::Input => MziParams::balanced(),
            MziRole::Wedge => wedge_base_point(),
            MziRole::Static => {
                let theta = rng.random_range(0.0..=std::f64::consts::FRAC_PI_2);
                let phi = rng.random_range(0.0..std::f64::consts::TAU);
                MziParams::new(T::lit(theta), T::lit(phi))
            }
            MziRole::Unused => continue,
        };
        params.entries[i] = Some(p);
    }
    params
}

/// Wedge setting when the feedback signal vanishes: `theta = pi/4`, `phi = 4 * pi/4`.
pub fn wedge_base_point<T: Real>() -> MziParams<T> {
    MziParams::new(T::FRAC_PI_4(), T::lit(4.0) * T::FRAC_PI_4())
}

/// Columns `inputs` (0-based) of the mesh transfer matrix, as an
/// `M x inputs.len()` matrix. Layer 1 acts first; unused MZIs are skipped.
pub fn propagate_columns<T: Real>(
    layout: &MeshLayout,
    params: &MeshParams<T>,
    inputs: &[usize],
) -> Result<Array2<Complex<T>>> {
    if params.len() != layout.mzis.len() {
        return Err(Error::Shape(format!(
            "parameter set has {} slots, layout has {} MZIs",
            params.len(),
            layout.mzis.len()
        )));
    }
    let m = layout.modes;
    let mut out = Array2::zeros((m, inputs.len()));
    for (col, &mode) in inputs.iter().enumerate() {
        if mode >= m {
            return Err(Error::Shape(format!("input mode {mode} outside {m} modes")));
        }
        out[[mode, col]] = Complex::new(T::one(), T::zero());
    }
    for (index, spec) in layout.mzis.iter().enumerate() {
        if spec.role == MziRole::Unused {
            continue;
        }
        let p = params.get(index).ok_or(Error::IncompleteParameters {
            index,
            layer: spec.layer,
            a: spec.modes.0,
            b: spec.modes.1,
        })?;
        let u = mzi_unitary(p)?;
        let (a, b) = (spec.modes.0 - 1, spec.modes.1 - 1);
        for col in 0..inputs.len() {
            let (xa, xb) = (out[[a, col]], out[[b, col]]);
            out[[a, col]] = u[0][0] * xa + u[0][1] * xb;
            out[[b, col]] = u[1][0] * xa + u[1][1] * xb;
        }
    }
    Ok(out)
}

/// Full `M x M` unitary `V = L_D ... L_2 L_1`, each layer the direct sum of
/// its MZI blocks embedded at their mode pairs.
pub fn compose_mesh<T: Real>(
    layout: &MeshLayout,
    params: &MeshParams<T>,
) -> Result<Array2<Complex<T>>> {
    let all: Vec<usize> = (0..layout.modes).collect();
    propagate_columns(layout, params, &all)
}
