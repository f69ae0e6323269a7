//! Experiment configuration: JSON schema, strict key checking, defaults,
//! and generator dispatch.
//!
//! A configuration file is a single JSON object. [`ExperimentConfig::from_json_str`]
//! parses it, rejects unknown keys anywhere in the tree, and validates every
//! parameter eagerly (each requested window is actually constructed) so that
//! bad runs fail before any sampling starts.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::covariance::CovMethod;
use crate::error::{CoreError, Result};
use crate::fields::levy::{GaussianMaGenerator, LevyFieldGenerator};
use crate::fields::voronoi::VoronoiGenerator;
use crate::fields::FieldRealization;
use crate::functionals::{CompiledFunc, FuncSpec, WindowSeq};
use crate::meixner::quadrature::marginal_expectation;
use crate::meixner::Family;

/// How the centering constant E[f(X(0))] in Φ is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanPolicy {
    /// Exact expectation under the marginal law (quadrature/summation for the
    /// moving-sum fields, the uniform integral for the volume-fraction field).
    #[default]
    Analytic,
    /// Monte Carlo estimate from dedicated extra replicates, drawn from
    /// reserved seed streams and flagged in every report that uses it.
    Estimated,
}

/// Which field model drives the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Independently scattered noise integrated over a moving box: the value
    /// at `t` is the noise mass of `[0, base_side]^dim + t`.
    Levy {
        family: Family,
        /// Family shape parameter (γ for pascal, a for meixner_ch); families
        /// with a canonical value (normal, gamma, poisson) may omit it.
        #[serde(default)]
        fixed_param: Option<f64>,
        base_side: f64,
        dim: usize,
        spacing: f64,
    },
    /// Gaussian moving average with a unit-rate box kernel — the normal
    /// special case of the moving-sum construction, kept as its own kind
    /// because it is the reference model with known covariance.
    GaussMa {
        kernel_side: f64,
        dim: usize,
        spacing: f64,
    },
    /// Planar Poisson–Voronoi volume-fraction field (always dimension 2).
    Voronoi {
        intensity: f64,
        spacing: f64,
        /// Margin beyond the window in which nuclei are still simulated;
        /// defaults to four mean cell diameters.
        #[serde(default)]
        guard: Option<f64>,
    },
}

impl GeneratorSpec {
    pub fn dim(&self) -> usize {
        match self {
            GeneratorSpec::Levy { dim, .. } | GeneratorSpec::GaussMa { dim, .. } => *dim,
            GeneratorSpec::Voronoi { .. } => 2,
        }
    }

    pub fn spacing(&self) -> f64 {
        match self {
            GeneratorSpec::Levy { spacing, .. }
            | GeneratorSpec::GaussMa { spacing, .. }
            | GeneratorSpec::Voronoi { spacing, .. } => *spacing,
        }
    }

    /// Default lag-truncation radius: twice the dependence range for the
    /// moving-sum fields (their covariance vanishes beyond one box side),
    /// four mean cell diameters for the volume-fraction field.
    pub fn default_trunc_radius(&self) -> f64 {
        match self {
            GeneratorSpec::Levy { base_side, .. } => 2.0 * base_side,
            GeneratorSpec::GaussMa { kernel_side, .. } => 2.0 * kernel_side,
            GeneratorSpec::Voronoi { intensity, .. } => 4.0 / intensity.sqrt(),
        }
    }

    /// Binds the spec to one window size, validating all parameters.
    pub fn build(&self, window_side: f64) -> Result<FieldGenerator> {
        Ok(match *self {
            GeneratorSpec::Levy {
                family,
                fixed_param,
                base_side,
                dim,
                spacing,
            } => FieldGenerator::Levy(LevyFieldGenerator::new(
                family,
                fixed_param,
                base_side,
                dim,
                window_side,
                spacing,
            )?),
            GeneratorSpec::GaussMa {
                kernel_side,
                dim,
                spacing,
            } => FieldGenerator::Gauss(GaussianMaGenerator::new(
                kernel_side,
                dim,
                window_side,
                spacing,
            )?),
            GeneratorSpec::Voronoi {
                intensity,
                spacing,
                guard,
            } => FieldGenerator::Voronoi(VoronoiGenerator::new(
                window_side,
                intensity,
                spacing,
                guard,
            )?),
        })
    }
}

/// A generator bound to one window size.
pub enum FieldGenerator {
    Levy(LevyFieldGenerator),
    Gauss(GaussianMaGenerator),
    Voronoi(VoronoiGenerator),
}

impl FieldGenerator {
    /// One replicate on the bound window; `stream` isolates replicates.
    pub fn generate(&self, master_seed: u64, stream: u64) -> Result<FieldRealization> {
        match self {
            FieldGenerator::Levy(g) => g.generate(master_seed, stream),
            FieldGenerator::Gauss(g) => g.generate(master_seed, stream),
            FieldGenerator::Voronoi(g) => Ok(g.generate(master_seed, stream)?.0),
        }
    }

    pub fn generator_id(&self) -> String {
        match self {
            FieldGenerator::Levy(g) => g.generator_id(),
            FieldGenerator::Gauss(g) => g.generator_id(),
            FieldGenerator::Voronoi(g) => g.generator_id(),
        }
    }

    /// E[f(X(0))] under the exact marginal law.
    pub fn analytic_mean(&self, f: &CompiledFunc) -> Result<f64> {
        if let Some(c) = f.constant_value() {
            // Exact, so constant functions center to identically zero
            // statistics rather than quadrature-noise residuals.
            return Ok(c);
        }
        match self {
            FieldGenerator::Levy(g) => marginal_expectation(&g.marginal_system()?, |x| f.eval(x)),
            FieldGenerator::Gauss(g) => marginal_expectation(&g.marginal_system()?, |x| f.eval(x)),
            FieldGenerator::Voronoi(_) => Ok(f.mean_under_uniform01()),
        }
    }
}

/// Full description of one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    /// Window side lengths, strictly increasing. Single-window commands use
    /// the largest; the variance scan walks the whole sequence.
    pub windows: Vec<f64>,
    /// Test functions applied to the field marginals.
    pub functions: Vec<FuncSpec>,
    /// Independent replicates M.
    pub replicates: usize,
    /// Lag truncation radius for the covariance estimator; `null` selects the
    /// generator-dependent default capped at half the window.
    #[serde(default)]
    pub trunc_radius: Option<f64>,
    pub master_seed: u64,
    #[serde(default)]
    pub mean_policy: MeanPolicy,
    #[serde(default = "default_cov_method")]
    pub cov_method: CovMethod,
    /// Relative degeneracy threshold for orthogonalization; `null` selects
    /// the built-in default.
    #[serde(default)]
    pub degeneracy_tau_rel: Option<f64>,
}

fn default_cov_method() -> CovMethod {
    CovMethod::LagIntegration
}

impl ExperimentConfig {
    /// Parses, rejects unknown keys anywhere in the tree, and validates.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: Value = serde_json::from_str(text)
            .map_err(|e| CoreError::Config(format!("malformed JSON: {e}")))?;
        let cfg: ExperimentConfig = serde_json::from_value(raw.clone())
            .map_err(|e| CoreError::Config(e.to_string()))?;
        let canonical = serde_json::to_value(&cfg).expect("config serialization is total");
        check_unknown_keys(&raw, &canonical, &mut String::from("$"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical pretty JSON with every default resolved and visible — what
    /// gets echoed into artifact directories as the resolved configuration.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serialization is total");
        s.push('\n');
        s
    }

    pub fn window_seq(&self) -> Result<WindowSeq> {
        WindowSeq::new(self.generator.dim(), self.windows.clone())
    }

    /// Truncation radius actually used at a given window: the explicit value
    /// if set, otherwise the generator default capped at half the window (the
    /// largest radius the edge-corrected estimator accepts).
    pub fn resolved_trunc_radius(&self, window_side: f64) -> f64 {
        match self.trunc_radius {
            Some(r) => r,
            None => self
                .generator
                .default_trunc_radius()
                .min(window_side / 2.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let windows = self
            .window_seq()
            .map_err(|e| CoreError::Config(e.to_string()))?;
        if self.functions.is_empty() {
            return Err(CoreError::Config("functions list is empty".into()));
        }
        for (i, f) in self.functions.iter().enumerate() {
            f.compile()
                .map_err(|e| CoreError::Config(format!("functions[{i}]: {e}")))?;
        }
        if self.replicates == 0 {
            return Err(CoreError::Config("replicates must be at least 1".into()));
        }
        if let Some(r) = self.trunc_radius {
            if !(r > 0.0) || !r.is_finite() {
                return Err(CoreError::Config(
                    "trunc_radius must be positive and finite".into(),
                ));
            }
        }
        if let Some(tau) = self.degeneracy_tau_rel {
            if !(tau > 0.0) || !tau.is_finite() {
                return Err(CoreError::Config(
                    "degeneracy_tau_rel must be positive and finite".into(),
                ));
            }
        }
        for &side in &windows.sides {
            self.generator
                .build(side)
                .map_err(|e| CoreError::Config(format!("window {side}: {e}")))?;
        }
        Ok(())
    }
}

/// Rejects keys present in the input but absent from the canonical
/// re-serialization. serde's `deny_unknown_fields` covers plain structs but
/// is a silent no-op inside internally tagged enums (the generator and
/// function specs), so strictness for those comes from this tree comparison.
/// Canonical serialization emits every known field (no skipping), so any
/// input key missing from it cannot be part of the schema.
fn check_unknown_keys(input: &Value, canonical: &Value, path: &mut String) -> Result<()> {
    match (input, canonical) {
        (Value::Object(inp), Value::Object(canon)) => {
            for (key, sub) in inp {
                match canon.get(key) {
                    None => {
                        return Err(CoreError::Config(format!("unknown key {path}.{key}")));
                    }
                    Some(c) => {
                        let len = path.len();
                        path.push('.');
                        path.push_str(key);
                        check_unknown_keys(sub, c, path)?;
                        path.truncate(len);
                    }
                }
            }
            Ok(())
        }
        (Value::Array(inp), Value::Array(canon)) => {
            for (i, (sub, c)) in inp.iter().zip(canon).enumerate() {
                let len = path.len();
                path.push_str(&format!("[{i}]"));
                check_unknown_keys(sub, c, path)?;
                path.truncate(len);
            }
            Ok(())
        }
        _ => Ok(()),
    }
}
