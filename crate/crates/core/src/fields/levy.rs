//! Moving-sum field generators driven by independently scattered noise.
//!
//! Both generators share one construction: the window lattice is extended by
//! the base-set width, every lattice cell receives an independent draw
//! `Λ(cell) ~ Ψ_{h^d}`, and the field value at site `t` is the exact sum of
//! the cell draws composing the translated base cube `B + t`,
//! `B = [0, s]^d`. Because `s` is required to be an integer multiple of the
//! pitch, `B + t` is a union of whole cells and the construction has no
//! discretization bias: the marginal is exactly `Ψ_{s^d}` and the covariance
//! at lag `t` is `Var(Ψ_1)·∏_a (s − |t_a|)₊`.
//!
//! Cell draws are consumed from the replicate RNG stream in a fixed
//! row-major order, so realizations are bit-identical for a given
//! (config, master seed, stream) regardless of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{cells_for_aligned_length, sites_per_axis, FieldMeta, FieldRealization};
use crate::error::{CoreError, Result};
use crate::exec::map_indexed;
use crate::meixner::{Family, PolySystem};

/// Moving sums of Lévy noise with cells drawn from one of the five
/// polynomial families.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyFieldGenerator {
    pub family: Family,
    /// Family's fixed parameter (γ for Pascal, a for the cosh family,
    /// ignored by Normal/Gamma/Poisson).
    pub fixed_param: f64,
    /// Side length s of the base cube B = [0, s]^d.
    pub base_side: f64,
    /// Spatial dimension, 1 or 2.
    pub dim: usize,
    /// Window side length.
    pub window_side: f64,
    /// Lattice pitch h.
    pub spacing: f64,
}

impl LevyFieldGenerator {
    pub fn new(
        family: Family,
        fixed_param: Option<f64>,
        base_side: f64,
        dim: usize,
        window_side: f64,
        spacing: f64,
    ) -> Result<Self> {
        let fixed = fixed_param
            .or_else(|| family.default_fixed_param())
            .unwrap_or(0.0);
        let gen = Self {
            family,
            fixed_param: fixed,
            base_side,
            dim,
            window_side,
            spacing,
        };
        gen.cell_system()?;
        gen.check_lattice()?;
        Ok(gen)
    }

    fn check_lattice(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 2 {
            return Err(CoreError::Parameter(
                "moving-sum fields support dim 1 or 2".into(),
            ));
        }
        sites_per_axis(self.window_side, self.spacing)?;
        cells_for_aligned_length(self.base_side, self.spacing, "base-set side")?;
        Ok(())
    }

    /// The law of a single lattice-cell increment, Ψ_{h^d}.
    pub fn cell_system(&self) -> Result<PolySystem> {
        let lam = self.spacing.powi(self.dim as i32);
        PolySystem::new(self.family, lam, self.fixed_param)
    }

    /// The marginal law of the field, Ψ_{s^d}.
    pub fn marginal_system(&self) -> Result<PolySystem> {
        let lam = self.base_side.powi(self.dim as i32);
        PolySystem::new(self.family, lam, self.fixed_param)
    }

    /// Exact covariance Cov(X(0), X(t)) of the construction.
    pub fn covariance_at(&self, lag: [f64; 2]) -> Result<f64> {
        let unit_var = self.cell_system()?.variance() / self.spacing.powi(self.dim as i32);
        let mut c = unit_var;
        for a in 0..self.dim {
            c *= (self.base_side - lag[a].abs()).max(0.0);
        }
        Ok(c)
    }

    pub fn generator_id(&self) -> String {
        format!("levy:{}", self.family.name())
    }

    pub fn generate(&self, master_seed: u64, stream: u64) -> Result<FieldRealization> {
        self.check_lattice()?;
        let cell_sys = self.cell_system()?;
        let sampler = cell_sys.sampler()?;
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream);
        let draw = |rng: &mut ChaCha8Rng| sampler.sample(rng);
        box_sum_field(
            self.dim,
            self.window_side,
            self.spacing,
            self.base_side,
            draw,
            &mut rng,
            FieldMeta {
                generator: self.generator_id(),
                master_seed,
                stream,
            },
        )
    }
}

/// Centered Gaussian moving average: same moving-sum construction with
/// cells `N(0, h^d)`; marginal `N(0, s^d)`, covariance
/// `∏_a (s − |t_a|)₊ ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMaGenerator {
    /// Side length s of the averaging kernel cube.
    pub kernel_side: f64,
    pub dim: usize,
    pub window_side: f64,
    pub spacing: f64,
}

impl GaussianMaGenerator {
    pub fn new(kernel_side: f64, dim: usize, window_side: f64, spacing: f64) -> Result<Self> {
        let inner = LevyFieldGenerator::new(
            Family::Normal,
            None,
            kernel_side,
            dim,
            window_side,
            spacing,
        )?;
        Ok(Self {
            kernel_side: inner.base_side,
            dim,
            window_side,
            spacing,
        })
    }

    fn as_levy(&self) -> LevyFieldGenerator {
        LevyFieldGenerator {
            family: Family::Normal,
            fixed_param: 0.0,
            base_side: self.kernel_side,
            dim: self.dim,
            window_side: self.window_side,
            spacing: self.spacing,
        }
    }

    /// Marginal law N(0, s^d).
    pub fn marginal_system(&self) -> Result<PolySystem> {
        self.as_levy().marginal_system()
    }

    pub fn covariance_at(&self, lag: [f64; 2]) -> Result<f64> {
        self.as_levy().covariance_at(lag)
    }

    pub fn generator_id(&self) -> String {
        "gauss-ma".into()
    }

    pub fn generate(&self, master_seed: u64, stream: u64) -> Result<FieldRealization> {
        let mut field = self.as_levy().generate(master_seed, stream)?;
        field.meta.generator = self.generator_id();
        Ok(field)
    }
}

/// Shared moving-sum core: draws the extended cell grid sequentially from
/// `rng`, builds a prefix-sum table, and reads each site's box sum from it.
fn box_sum_field<F>(
    dim: usize,
    window_side: f64,
    h: f64,
    base_side: f64,
    mut draw: F,
    rng: &mut ChaCha8Rng,
    meta: FieldMeta,
) -> Result<FieldRealization>
where
    F: FnMut(&mut ChaCha8Rng) -> Result<f64>,
{
    let n = sites_per_axis(window_side, h)?;
    let k = cells_for_aligned_length(base_side, h, "base-set side")?;
    let c = n + k - 1; // cells per axis covering B + t for every site t
    match dim {
        1 => {
            let mut prefix = vec![0.0f64; c + 1];
            for i in 0..c {
                prefix[i + 1] = prefix[i] + draw(rng)?;
            }
            let values = map_indexed(n, |i| prefix[i + k] - prefix[i]);
            let field = FieldRealization {
                dim,
                side: window_side,
                spacing: h,
                shape: [n, 1],
                values,
                meta,
            };
            field.validate()?;
            Ok(field)
        }
        2 => {
            // Summed-area table P with one extra leading row/column of zeros.
            let w = c + 1;
            let mut prefix = vec![0.0f64; w * w];
            for i in 0..c {
                let mut row_acc = 0.0;
                for j in 0..c {
                    row_acc += draw(rng)?;
                    prefix[(i + 1) * w + (j + 1)] = prefix[i * w + (j + 1)] + row_acc;
                }
            }
            let values = map_indexed(n * n, |idx| {
                let i = idx / n;
                let j = idx % n;
                prefix[(i + k) * w + (j + k)] - prefix[i * w + (j + k)]
                    - prefix[(i + k) * w + j]
                    + prefix[i * w + j]
            });
            let field = FieldRealization {
                dim,
                side: window_side,
                spacing: h,
                shape: [n, n],
                values,
                meta,
            };
            field.validate()?;
            Ok(field)
        }
        _ => Err(CoreError::Parameter(
            "moving-sum fields support dim 1 or 2".into(),
        )),
    }
}
