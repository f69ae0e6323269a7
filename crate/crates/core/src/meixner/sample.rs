//! Samplers for the marginal laws of the five families.
//!
//! Normal/Gamma/Poisson come straight from `rand_distr`. Pascal uses the
//! exact Gamma–Poisson mixture: K ~ Poisson(Y) with Y ~ Gamma(λ, γ/(1−γ))
//! has pmf Γ(λ+k)/(Γ(λ)k!)·γ^k(1−γ)^λ. Meixner-CH has no off-the-shelf
//! sampler and uses rejection from a scaled Cauchy envelope matched at the
//! density's mode; the envelope constant is certified on a wide grid at
//! construction and sampling aborts with a sampling error after a bounded
//! number of attempts (an exhausted budget signals a bad envelope, not bad
//! luck).

use rand::Rng;
use rand_distr::Distribution;

use crate::error::{CoreError, Result};
use crate::meixner::{ln_mch_density, Family, PolySystem};

/// Attempt budget for the Meixner-CH rejection sampler.
const MCH_MAX_ATTEMPTS: usize = 1_000_000;

/// Prepared sampler for a system's (affine-transformed) marginal law
/// Y = (X − c·λ)/m, X ~ Ψ_λ.
#[derive(Debug, Clone)]
pub struct MarginalSampler {
    /// Divide by this after shifting (the affine m).
    scale: f64,
    /// Subtract this first (the affine c·λ).
    shift: f64,
    imp: SamplerImpl,
}

#[derive(Debug, Clone)]
enum SamplerImpl {
    Normal(rand_distr::Normal<f64>),
    Gamma(rand_distr::Gamma<f64>),
    Poisson(rand_distr::Poisson<f64>),
    /// Gamma mixing distribution of the Gamma–Poisson representation.
    Pascal(rand_distr::Gamma<f64>),
    Mch(MchSampler),
}

impl MarginalSampler {
    pub(crate) fn new(sys: &PolySystem) -> Result<Self> {
        let lambda = sys.lambda();
        let imp = match sys.family() {
            Family::Normal => SamplerImpl::Normal(
                rand_distr::Normal::new(0.0, lambda.sqrt())
                    .map_err(|e| CoreError::Parameter(format!("normal sampler: {e}")))?,
            ),
            Family::Gamma => SamplerImpl::Gamma(
                rand_distr::Gamma::new(lambda, 1.0)
                    .map_err(|e| CoreError::Parameter(format!("gamma sampler: {e}")))?,
            ),
            Family::Poisson => SamplerImpl::Poisson(
                rand_distr::Poisson::new(lambda)
                    .map_err(|e| CoreError::Parameter(format!("poisson sampler: {e}")))?,
            ),
            Family::Pascal => {
                let g = sys.fixed_param();
                SamplerImpl::Pascal(
                    rand_distr::Gamma::new(lambda, g / (1.0 - g))
                        .map_err(|e| CoreError::Parameter(format!("pascal sampler: {e}")))?,
                )
            }
            Family::MeixnerCh => SamplerImpl::Mch(MchSampler::new(sys.fixed_param(), lambda)),
        };
        let (m, c) = sys.affine();
        Ok(MarginalSampler {
            scale: m,
            shift: c * lambda,
            imp,
        })
    }

    /// Draws one value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let x = match &self.imp {
            SamplerImpl::Normal(d) => d.sample(rng),
            SamplerImpl::Gamma(d) => d.sample(rng),
            SamplerImpl::Poisson(d) => d.sample(rng),
            SamplerImpl::Pascal(mix) => {
                let y = mix.sample(rng);
                if y > 0.0 {
                    rand_distr::Poisson::new(y)
                        .map_err(|e| CoreError::Sampling(format!("pascal mixture: {e}")))?
                        .sample(rng)
                } else {
                    // Gamma underflow for tiny shapes: the conditional
                    // Poisson(0+) mass is concentrated at zero.
                    0.0
                }
            }
            SamplerImpl::Mch(s) => s.sample(rng)?,
        };
        Ok((x - self.shift) / self.scale)
    }
}

/// Rejection sampler for the Mch(a, μ) density with a scaled Cauchy envelope
/// matched at the mode.
#[derive(Debug, Clone)]
struct MchSampler {
    a: f64,
    mu: f64,
    mode: f64,
    /// Cauchy scale of the envelope.
    s: f64,
    /// log of the envelope constant: ln f(x) ≤ ln_m + ln cauchy(x; mode, s).
    ln_m: f64,
}

impl MchSampler {
    fn new(a: f64, mu: f64) -> Self {
        let ln_f = |x: f64| ln_mch_density(x, a, mu);
        let mean = mu * (a / 2.0).tan();
        let sd = (mu * 0.5).sqrt() / (a / 2.0).cos();

        // Golden-section maximization of the (unimodal) log density.
        let (mut lo, mut hi) = (mean - 8.0 * sd - 1.0, mean + 8.0 * sd + 1.0);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
        let (mut f1, mut f2) = (ln_f(x1), ln_f(x2));
        for _ in 0..200 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = ln_f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = ln_f(x1);
            }
            if hi - lo < 1e-12 * (1.0 + sd) {
                break;
            }
        }
        let mode = 0.5 * (lo + hi);

        // Certify the envelope constant on a wide grid: f has exponential
        // tails e^{−(π−|a|)|x|} while the Cauchy envelope decays like 1/x²,
        // so domination beyond the grid follows from domination (with
        // margin) at its edges.
        let s = (2.0 * sd).max(1e-6);
        let w = 80.0 / (std::f64::consts::PI - a.abs()) + 10.0 * sd + mean.abs();
        let ln_cauchy = |x: f64| {
            let y = (x - mode) / s;
            -(std::f64::consts::PI * s).ln() - (1.0 + y * y).ln()
        };
        let coarse = 16_384usize;
        let mut best = f64::NEG_INFINITY;
        let mut best_x = mode;
        for i in 0..=coarse {
            let x = mode - w + 2.0 * w * (i as f64) / (coarse as f64);
            let r = ln_f(x) - ln_cauchy(x);
            if r > best {
                best = r;
                best_x = x;
            }
        }
        // Refine around the coarse argmax to catch ratio peaks narrower than
        // the coarse grid (the density spikes on a width-μ scale for small μ).
        let span = 4.0 * (2.0 * w / coarse as f64);
        for i in 0..=2000 {
            let x = best_x - span + 2.0 * span * (i as f64) / 2000.0;
            let r = ln_f(x) - ln_cauchy(x);
            if r > best {
                best = r;
            }
        }
        let ln_m = best + 0.14f64; // ≈ ln(1.15) safety margin

        MchSampler { a, mu, mode, s, ln_m }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        for _ in 0..MCH_MAX_ATTEMPTS {
            let u: f64 = rng.gen();
            let x = self.mode + self.s * (std::f64::consts::PI * (u - 0.5)).tan();
            let y = (x - self.mode) / self.s;
            let ln_env = self.ln_m
                - (std::f64::consts::PI * self.s).ln()
                - (1.0 + y * y).ln();
            let ln_f = ln_mch_density(x, self.a, self.mu);
            debug_assert!(
                ln_f <= ln_env + 1e-9,
                "envelope violated at x={x}: ln f = {ln_f}, ln env = {ln_env}"
            );
            let v: f64 = rng.gen();
            if v.ln() < ln_f - ln_env {
                return Ok(x);
            }
        }
        Err(CoreError::Sampling(format!(
            "meixner_ch rejection sampler exhausted {MCH_MAX_ATTEMPTS} attempts \
             (a = {}, mu = {}): envelope does not dominate",
            self.a, self.mu
        )))
    }
}
