//! Test functions, window integrals, the normalized window functional, and
//! window-growth diagnostics.
//!
//! A [`FuncSpec`] is the serializable description of a test function f; it
//! compiles to a [`CompiledFunc`] for evaluation. Window integrals are
//! midpoint Riemann sums on the field's lattice — the honest choice, since
//! the fields are non-smooth — accumulated over fixed-size chunks so the
//! result is bit-identical whether or not the chunks are evaluated in
//! parallel.

pub mod net;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::exec::map_indexed;
use crate::fields::FieldRealization;
use crate::meixner::{quadrature, PolySystem, PolySystemSpec};

/// Fixed accumulation chunk (in sites) for window sums. Partial sums are
/// produced per chunk and folded in chunk order, making the floating-point
/// result independent of the execution schedule.
pub const SUM_CHUNK: usize = 8192;

/// Serializable test-function description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FuncSpec {
    /// f(x) = x.
    Identity,
    /// The system's monic orthogonal polynomial of the given degree.
    MeixnerPoly {
        degree: usize,
        system: PolySystemSpec,
    },
    /// Power-basis polynomial Σ coeffs[k]·x^k (coeffs[0] is the constant
    /// term), for bases like (x, x²) that are not orthogonal to begin with.
    Polynomial { coeffs: Vec<f64> },
    /// Piecewise-linear interpolation through (breakpoints[i], values[i]),
    /// extended constantly outside the breakpoint range.
    PiecewiseLinear {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// Continuous ramp from 0 to 1 across [threshold − width,
    /// threshold + width]: a Lipschitz smoothing of the step indicator
    /// 1_{[threshold, ∞)}.
    SmoothedIndicator { threshold: f64, width: f64 },
}

impl FuncSpec {
    /// Constant function as a one-knot piecewise-linear spec.
    pub fn constant(value: f64) -> Self {
        FuncSpec::PiecewiseLinear {
            breakpoints: vec![0.0],
            values: vec![value],
        }
    }

    /// Short stable name for reports and CSV headers.
    pub fn name(&self) -> String {
        match self {
            FuncSpec::Identity => "identity".into(),
            FuncSpec::MeixnerPoly { degree, system } => {
                format!("poly{}[{}]", degree, system.family.name())
            }
            FuncSpec::Polynomial { coeffs } => {
                format!("pow{}", coeffs.len().saturating_sub(1))
            }
            FuncSpec::PiecewiseLinear { breakpoints, .. } => {
                format!("pwl{}", breakpoints.len())
            }
            FuncSpec::SmoothedIndicator { threshold, width } => {
                format!("ind[{threshold}±{width}]")
            }
        }
    }

    pub fn compile(&self) -> Result<CompiledFunc> {
        match self {
            FuncSpec::Identity => Ok(CompiledFunc::Identity),
            FuncSpec::MeixnerPoly { degree, system } => Ok(CompiledFunc::MeixnerPoly {
                degree: *degree,
                system: system.build()?,
            }),
            FuncSpec::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(CoreError::Parameter(
                        "polynomial spec needs at least one coefficient".into(),
                    ));
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(CoreError::Parameter(
                        "polynomial spec has non-finite coefficients".into(),
                    ));
                }
                Ok(CompiledFunc::Polynomial {
                    coeffs: coeffs.clone(),
                })
            }
            FuncSpec::PiecewiseLinear {
                breakpoints,
                values,
            } => {
                if breakpoints.is_empty() || breakpoints.len() != values.len() {
                    return Err(CoreError::Parameter(
                        "piecewise-linear spec needs equally many breakpoints and values (≥ 1)"
                            .into(),
                    ));
                }
                if breakpoints
                    .iter()
                    .chain(values.iter())
                    .any(|v| !v.is_finite())
                {
                    return Err(CoreError::Parameter(
                        "piecewise-linear spec has non-finite entries".into(),
                    ));
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(CoreError::Parameter(
                        "piecewise-linear breakpoints must be strictly increasing".into(),
                    ));
                }
                Ok(CompiledFunc::PiecewiseLinear {
                    breakpoints: breakpoints.clone(),
                    values: values.clone(),
                })
            }
            FuncSpec::SmoothedIndicator { threshold, width } => {
                if !(*width > 0.0) || !threshold.is_finite() || !width.is_finite() {
                    return Err(CoreError::Parameter(
                        "smoothed indicator needs finite threshold and width > 0".into(),
                    ));
                }
                Ok(CompiledFunc::SmoothedIndicator {
                    threshold: *threshold,
                    width: *width,
                })
            }
        }
    }
}

/// Evaluatable test function.
#[derive(Debug, Clone)]
pub enum CompiledFunc {
    Identity,
    MeixnerPoly { degree: usize, system: PolySystem },
    /// Power-basis polynomial, evaluated by Horner's rule.
    Polynomial { coeffs: Vec<f64> },
    PiecewiseLinear {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    SmoothedIndicator { threshold: f64, width: f64 },
    /// Σ coeff·part — used to evaluate orthogonalized combinations.
    LinearCombination(Vec<(f64, CompiledFunc)>),
}

impl CompiledFunc {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CompiledFunc::Identity => x,
            CompiledFunc::MeixnerPoly { degree, system } => system.eval_poly(*degree, x),
            CompiledFunc::Polynomial { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
            }
            CompiledFunc::PiecewiseLinear {
                breakpoints,
                values,
            } => {
                let n = breakpoints.len();
                if x <= breakpoints[0] {
                    return values[0];
                }
                if x >= breakpoints[n - 1] {
                    return values[n - 1];
                }
                let j = breakpoints.partition_point(|&b| b <= x); // first index with b > x
                let (x0, x1) = (breakpoints[j - 1], breakpoints[j]);
                let (y0, y1) = (values[j - 1], values[j]);
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
            CompiledFunc::SmoothedIndicator { threshold, width } => {
                ((x - (threshold - width)) / (2.0 * width)).clamp(0.0, 1.0)
            }
            CompiledFunc::LinearCombination(parts) => {
                parts.iter().map(|(a, f)| a * f.eval(x)).sum()
            }
        }
    }

    /// Global Lipschitz constant, when finite: polynomials of degree ≥ 2 are
    /// unbounded in slope and yield `None`.
    pub fn lipschitz_constant(&self) -> Option<f64> {
        match self {
            CompiledFunc::Identity => Some(1.0),
            CompiledFunc::MeixnerPoly { degree, system } => match degree {
                0 => Some(0.0),
                1 => Some(system.affine().0.abs()),
                _ => None,
            },
            CompiledFunc::Polynomial { coeffs } => match coeffs.len() {
                1 => Some(0.0),
                2 => Some(coeffs[1].abs()),
                _ => None,
            },
            CompiledFunc::PiecewiseLinear {
                breakpoints,
                values,
            } => Some(
                breakpoints
                    .windows(2)
                    .zip(values.windows(2))
                    .map(|(b, v)| ((v[1] - v[0]) / (b[1] - b[0])).abs())
                    .fold(0.0, f64::max),
            ),
            CompiledFunc::SmoothedIndicator { width, .. } => Some(0.5 / width),
            CompiledFunc::LinearCombination(parts) => {
                let mut acc = 0.0;
                for (a, f) in parts {
                    acc += a.abs() * f.lipschitz_constant()?;
                }
                Some(acc)
            }
        }
    }

    pub fn value_at_zero(&self) -> f64 {
        self.eval(0.0)
    }

    /// `Some(c)` iff the function is constant by construction: flat
    /// piecewise-linear tables, degree-0 polynomials (monic, so ≡ 1), and
    /// linear combinations of constants. Lets callers use the exact constant
    /// as its own expectation instead of a quadrature approximation.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            CompiledFunc::Identity | CompiledFunc::SmoothedIndicator { .. } => None,
            CompiledFunc::MeixnerPoly { degree, .. } => (*degree == 0).then_some(1.0),
            CompiledFunc::Polynomial { coeffs } => {
                (coeffs.len() == 1 || coeffs[1..].iter().all(|&c| c == 0.0))
                    .then_some(coeffs[0])
            }
            CompiledFunc::PiecewiseLinear { values, .. } => values
                .iter()
                .all(|&v| v == values[0])
                .then_some(values[0]),
            CompiledFunc::LinearCombination(parts) => {
                let mut acc = 0.0;
                for (a, f) in parts {
                    acc += a * f.constant_value()?;
                }
                Some(acc)
            }
        }
    }

    /// Exact ∫₀¹ f(x) dx — the analytic mean under the volume-fraction
    /// field's uniform marginal. Piecewise-linear parts integrate in closed
    /// form; polynomials use the exact-degree quadrature rule.
    pub fn mean_under_uniform01(&self) -> f64 {
        match self {
            CompiledFunc::Identity => 0.5,
            CompiledFunc::MeixnerPoly { .. } => quadrature::integrate(|x| self.eval(x), 0.0, 1.0),
            CompiledFunc::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k as f64 + 1.0))
                .sum(),
            CompiledFunc::PiecewiseLinear { .. } | CompiledFunc::SmoothedIndicator { .. } => {
                // The function is piecewise linear with a bounded number of
                // knots; integrate each linear piece of [0,1] exactly.
                let mut knots = vec![0.0, 1.0];
                if let CompiledFunc::PiecewiseLinear { breakpoints, .. } = self {
                    knots.extend(breakpoints.iter().copied().filter(|b| (0.0..1.0).contains(b)));
                } else if let CompiledFunc::SmoothedIndicator { threshold, width } = self {
                    for k in [threshold - width, threshold + width] {
                        if (0.0..1.0).contains(&k) {
                            knots.push(k);
                        }
                    }
                }
                knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut acc = 0.0;
                for w in knots.windows(2) {
                    acc += 0.5 * (self.eval(w[0]) + self.eval(w[1])) * (w[1] - w[0]);
                }
                acc
            }
            CompiledFunc::LinearCombination(parts) => parts
                .iter()
                .map(|(a, f)| a * f.mean_under_uniform01())
                .sum(),
        }
    }
}

/// Riemann sum h^d·Σ_sites f(X(site)).
pub fn window_integral(field: &FieldRealization, f: &CompiledFunc) -> f64 {
    let hd = field.spacing.powi(field.dim as i32);
    hd * chunked_sum(&field.values, |x| f.eval(x))
}

/// The normalized window functional
/// `(∫_W f(X) − λ_d(W)·mean_f) / √λ_d(W)`, evaluated as the centered sum
/// `h^d·Σ(f(X_i) − mean_f)/√(h^d·#sites)` so that a constant function gives
/// exactly zero.
pub fn phi_n(field: &FieldRealization, f: &CompiledFunc, mean_f: f64) -> f64 {
    let hd = field.spacing.powi(field.dim as i32);
    let volume = field.lattice_volume();
    hd * chunked_sum(&field.values, |x| f.eval(x) - mean_f) / volume.sqrt()
}

/// Chunk-deterministic sum of g over `values` (see [`SUM_CHUNK`]).
fn chunked_sum<G: Fn(f64) -> f64 + Sync>(values: &[f64], g: G) -> f64 {
    let n = values.len();
    let chunks = n.div_ceil(SUM_CHUNK);
    let partials = map_indexed(chunks, |c| {
        let lo = c * SUM_CHUNK;
        let hi = ((c + 1) * SUM_CHUNK).min(n);
        values[lo..hi].iter().map(|&x| g(x)).sum::<f64>()
    });
    partials.into_iter().sum()
}

/// Boundary-to-volume ratio of the cube window [0, L]^d after dilating the
/// boundary by the unit ball in the max norm:
/// ((L+2)^d − max(L−2, 0)^d) / L^d.
pub fn van_hove_ratio(side: f64, dim: usize) -> Result<f64> {
    if !(side > 0.0) || !side.is_finite() {
        return Err(CoreError::Parameter("window side must be positive".into()));
    }
    if dim == 0 {
        return Err(CoreError::Parameter("dimension must be at least 1".into()));
    }
    let d = dim as i32;
    let outer = (side + 2.0).powi(d);
    let inner = (side - 2.0).max(0.0).powi(d);
    Ok((outer - inner) / side.powi(d))
}

/// An increasing sequence of cube windows [0, L_k]^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSeq {
    pub dim: usize,
    pub sides: Vec<f64>,
}

impl WindowSeq {
    pub fn new(dim: usize, sides: Vec<f64>) -> Result<Self> {
        if sides.is_empty() {
            return Err(CoreError::Parameter("window sequence is empty".into()));
        }
        if sides.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(CoreError::Parameter(
                "window sides must be positive and finite".into(),
            ));
        }
        if sides.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::Parameter(
                "window sides must be strictly increasing".into(),
            ));
        }
        if dim != 1 && dim != 2 {
            return Err(CoreError::Parameter("window dimension must be 1 or 2".into()));
        }
        Ok(Self { dim, sides })
    }

    /// Default dyadic sequence 8, 16, 32, 64.
    pub fn default_sides() -> Vec<f64> {
        vec![8.0, 16.0, 32.0, 64.0]
    }

    pub fn van_hove_ratios(&self) -> Vec<f64> {
        self.sides
            .iter()
            .map(|&s| van_hove_ratio(s, self.dim).expect("validated sides"))
            .collect()
    }

    pub fn largest(&self) -> f64 {
        *self.sides.last().expect("validated nonempty")
    }
}
