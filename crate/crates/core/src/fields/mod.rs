//! Stationary random-field generators on regular lattices.
//!
//! A realization lives on the cubic window `[0, side]^d` (d = 1 or 2),
//! sampled at the lattice sites `t = i·h` per axis with `i = 0 .. ⌈side/h⌉`.
//! Each site is identified with the half-open lattice cell `[i·h, (i+1)·h)^d`
//! it anchors, so Riemann sums `h^d·Σ_sites` integrate over the window
//! exactly when `side` is a multiple of `h`.
//!
//! Three generators are provided:
//!
//! * [`levy::LevyFieldGenerator`] — moving sums of independently scattered
//!   noise, `X(t) = Λ(B + t)` with `Λ(cell) ~ Ψ_{h^d}` drawn from one of the
//!   five polynomial families and `B = [0, s]^d` a lattice-aligned cube.
//! * [`levy::GaussianMaGenerator`] — the same construction with centered
//!   Gaussian cells `N(0, h^d)`, giving a centered Gaussian moving average
//!   with triangular covariance.
//! * [`voronoi::VoronoiGenerator`] — the planar Poisson–Voronoi
//!   volume-fraction field, with values in [0, 1].

pub mod geometry;
pub mod levy;
pub mod voronoi;

use serde::Serialize;

use crate::error::{CoreError, Result};

/// Relative tolerance used when checking that a length is an integer
/// multiple of the lattice pitch.
const ALIGN_TOL: f64 = 1e-9;

/// Provenance carried by every realization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldMeta {
    /// Short generator identifier, e.g. `levy:poisson` or `voronoi`.
    pub generator: String,
    /// Master seed of the experiment the realization belongs to.
    pub master_seed: u64,
    /// RNG stream index (replicate number; stream 0 is reserved for
    /// experiment-level draws).
    pub stream: u64,
}

/// A sampled stationary field on the lattice of the window `[0, side]^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldRealization {
    /// Spatial dimension, 1 or 2.
    pub dim: usize,
    /// Window side length.
    pub side: f64,
    /// Lattice pitch h.
    pub spacing: f64,
    /// Sites per axis: `[n, 1]` for d = 1, `[n, n]` for d = 2.
    pub shape: [usize; 2],
    /// Row-major values, axis 0 major: index = i0·shape[1] + i1.
    pub values: Vec<f64>,
    pub meta: FieldMeta,
}

impl FieldRealization {
    pub fn n_sites(&self) -> usize {
        self.shape[0] * self.shape[1]
    }

    /// Lattice coordinates of site `index` (second component 0 for d = 1).
    pub fn site_coord(&self, index: usize) -> [f64; 2] {
        let i0 = index / self.shape[1];
        let i1 = index % self.shape[1];
        [i0 as f64 * self.spacing, i1 as f64 * self.spacing]
    }

    /// The lattice volume h^d·(number of sites) — the window measure as the
    /// Riemann sums downstream see it.
    pub fn lattice_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32) * self.n_sites() as f64
    }

    /// Checks that every value is finite.
    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.n_sites() {
            return Err(CoreError::Geometry(
                "value grid does not match the declared shape".into(),
            ));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::Geometry("non-finite field value".into()));
        }
        Ok(())
    }
}

/// Number of lattice sites per axis for a window of side `side` and pitch
/// `h`: ⌈side/h⌉, robust to the float division landing just above an
/// integer.
pub fn sites_per_axis(side: f64, h: f64) -> Result<usize> {
    if !(side > 0.0) || !(h > 0.0) || !side.is_finite() || !h.is_finite() {
        return Err(CoreError::Parameter(
            "window side and spacing must be positive and finite".into(),
        ));
    }
    let ratio = side / h;
    let n = (ratio - ALIGN_TOL).ceil();
    if n < 1.0 || n > 1e9 {
        return Err(CoreError::Parameter(format!(
            "window of side {side} at spacing {h} has an unreasonable site count"
        )));
    }
    Ok(n as usize)
}

/// Expresses `len` as an integer number of lattice cells of pitch `h`,
/// failing with an alignment error when it is not an exact multiple.
pub fn cells_for_aligned_length(len: f64, h: f64, what: &str) -> Result<usize> {
    if !(len > 0.0) || !len.is_finite() {
        return Err(CoreError::Parameter(format!("{what} must be positive")));
    }
    let k = (len / h).round();
    if k < 1.0 || (len - k * h).abs() > ALIGN_TOL * len.max(1.0) {
        return Err(CoreError::Alignment(format!(
            "{what} {len} is not a positive integer multiple of the spacing {h}"
        )));
    }
    Ok(k as usize)
}
