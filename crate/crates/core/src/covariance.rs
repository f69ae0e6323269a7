//! Estimation of the asymptotic covariance bilinear form
//! `⟨f, g⟩ = ∫ Cov(f(X(0)), g(X(t))) dt` and Gram–Schmidt
//! orthogonalization in the induced geometry.
//!
//! Two independent estimation routes are implemented and kept separate on
//! purpose:
//!
//! * **Lag integration** — the spatial covariance function is estimated per
//!   lattice lag (edge-corrected: only site pairs with both endpoints in the
//!   window count) and integrated over a truncation box of radius R.
//! * **Window variance** — the normalized window integrals
//!   `(∫ f(X) − mean)/√λ_d(W)` are computed per replicate and their sample
//!   covariance across replicates is taken, following the limit form of the
//!   normalized covariance of window integrals.
//!
//! Both routes center f(X) at its pooled (all sites, all replicates) mean,
//! which makes them exactly zero for constant functions and exactly bilinear
//! in (f, g) on fixed realizations.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::exec::map_indexed;
use crate::fields::FieldRealization;
use crate::functionals::{CompiledFunc, FuncSpec};

/// A lattice lag in cell units; the second component must be 0 for
/// one-dimensional fields.
pub type Lag = [i64; 2];

/// Estimation route for the bilinear form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovMethod {
    LagIntegration,
    WindowVariance,
}

/// Minimum replicate count for the window-variance route (sample covariance
/// plus jackknife error need a real sample).
pub const MIN_WINDOW_VARIANCE_REPLICATES: usize = 30;

/// One estimated bilinear-form entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovEstimate {
    pub value: f64,
    /// Lag truncation radius (lag-integration route only).
    pub trunc_radius: Option<f64>,
    /// Monte Carlo standard error: spread of per-replicate values for lag
    /// integration, leave-one-out jackknife for window variance.
    pub se: f64,
    pub method: CovMethod,
    pub replicates: usize,
}

/// f applied to every site of every replicate, centered at the pooled mean.
struct Applied {
    /// Centered values per replicate.
    per_rep: Vec<Vec<f64>>,
    pooled_mean: f64,
}

fn apply(replicates: &[FieldRealization], f: &CompiledFunc) -> Result<Applied> {
    if replicates.is_empty() {
        return Err(CoreError::SampleSize(
            "covariance estimation needs at least one replicate".into(),
        ));
    }
    let shape = replicates[0].shape;
    if replicates.iter().any(|r| r.shape != shape) {
        return Err(CoreError::Parameter(
            "replicates must share one lattice shape".into(),
        ));
    }
    let mut per_rep: Vec<Vec<f64>> = replicates
        .iter()
        .map(|r| r.values.iter().map(|&x| f.eval(x)).collect())
        .collect();
    // Anchored mean: summing deviations from the first value keeps the mean
    // exact when f is constant, so centered values (and every bilinear form
    // built from them) vanish identically rather than to rounding noise.
    let anchor = per_rep[0][0];
    let total: f64 = per_rep.iter().flatten().map(|&v| v - anchor).sum();
    let count = (per_rep.len() * per_rep[0].len()) as f64;
    let mean = anchor + total / count;
    for rep in &mut per_rep {
        for v in rep.iter_mut() {
            *v -= mean;
        }
    }
    Ok(Applied {
        per_rep,
        pooled_mean: mean,
    })
}

/// Linear combination of already-applied functions (used to re-estimate the
/// form on orthogonalized outputs without recompiling anything).
fn apply_combo(parts: &[Applied], coeffs: &[f64]) -> Applied {
    let reps = parts[0].per_rep.len();
    let n = parts[0].per_rep[0].len();
    let mut per_rep = vec![vec![0.0f64; n]; reps];
    let mut pooled_mean = 0.0;
    for (a, part) in coeffs.iter().zip(parts) {
        if *a == 0.0 {
            continue;
        }
        pooled_mean += a * part.pooled_mean;
        for (dst, src) in per_rep.iter_mut().zip(&part.per_rep) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += a * s;
            }
        }
    }
    Applied {
        per_rep,
        pooled_mean,
    }
}

/// Sum over valid site pairs of a[i]·b[i + lag] for one replicate pair of
/// centered arrays, with the pair count (identical across replicates).
fn lag_pair_sum(a: &[f64], b: &[f64], shape: [usize; 2], lag: Lag) -> (f64, usize) {
    let (n0, n1) = (shape[0] as i64, shape[1] as i64);
    let (j0, j1) = (lag[0], lag[1]);
    let i0_lo = 0.max(-j0);
    let i0_hi = n0 - 0.max(j0);
    let i1_lo = 0.max(-j1);
    let i1_hi = n1 - 0.max(j1);
    if i0_hi <= i0_lo || i1_hi <= i1_lo {
        return (0.0, 0);
    }
    let mut acc = 0.0;
    for i0 in i0_lo..i0_hi {
        let row_a = (i0 * n1) as usize;
        let row_b = ((i0 + j0) * n1 + j1) as usize;
        for i1 in (i1_lo as usize)..(i1_hi as usize) {
            acc += a[row_a + i1] * b[row_b.wrapping_add(i1)];
        }
    }
    let count = ((i0_hi - i0_lo) * (i1_hi - i1_lo)) as usize;
    (acc, count)
}

fn validate_lag(shape: [usize; 2], dim: usize, lag: Lag) -> Result<()> {
    if dim == 1 && lag[1] != 0 {
        return Err(CoreError::Lag(format!(
            "lag {lag:?} has a transverse component on a 1-d field"
        )));
    }
    for a in 0..2 {
        if lag[a].unsigned_abs() as usize >= shape[a] {
            return Err(CoreError::Lag(format!(
                "lag {lag:?} exceeds the window ({} sites on axis {a})",
                shape[a]
            )));
        }
    }
    Ok(())
}

/// Spatial-average covariance estimate of (f(X(s)), g(X(s + t))) at each
/// requested lag (in cell units), pooled over replicates.
pub fn estimate_cov_function(
    replicates: &[FieldRealization],
    f: &CompiledFunc,
    g: &CompiledFunc,
    lags: &[Lag],
) -> Result<Vec<(Lag, f64)>> {
    let af = apply(replicates, f)?;
    let ag = apply(replicates, g)?;
    let shape = replicates[0].shape;
    let dim = replicates[0].dim;
    for &lag in lags {
        validate_lag(shape, dim, lag)?;
    }
    let out = map_indexed(lags.len(), |li| {
        let lag = lags[li];
        let mut acc = 0.0;
        let mut cnt = 0usize;
        for (a, b) in af.per_rep.iter().zip(&ag.per_rep) {
            let (s, c) = lag_pair_sum(a, b, shape, lag);
            acc += s;
            cnt += c;
        }
        (lag, acc / cnt as f64)
    });
    Ok(out)
}

/// All lags within max-norm radius R (inclusive up to rounding), validated
/// against the window.
fn lag_box(replicate: &FieldRealization, r: f64) -> Result<Vec<Lag>> {
    let h = replicate.spacing;
    if !(r > 0.0) || !r.is_finite() {
        return Err(CoreError::Lag("truncation radius must be positive".into()));
    }
    if r > replicate.side / 2.0 + 1e-9 {
        return Err(CoreError::Lag(format!(
            "truncation radius {r} exceeds the window half-side {}",
            replicate.side / 2.0
        )));
    }
    let j_max = (r / h + 1e-9).floor() as i64;
    let dim = replicate.dim;
    let shape = replicate.shape;
    let mut lags = Vec::new();
    let j1_range = if dim == 1 { 0..=0 } else { -j_max..=j_max };
    for j0 in -j_max..=j_max {
        for j1 in j1_range.clone() {
            let lag = [j0, j1];
            validate_lag(shape, dim, lag)?;
            lags.push(lag);
        }
    }
    Ok(lags)
}

fn bilinear_lag_integration(
    replicates: &[FieldRealization],
    af: &Applied,
    ag: &Applied,
    r: f64,
) -> Result<CovEstimate> {
    let m = replicates.len();
    if m < 2 {
        return Err(CoreError::SampleSize(
            "lag integration needs at least 2 replicates for an error estimate".into(),
        ));
    }
    let lags = lag_box(&replicates[0], r)?;
    let shape = replicates[0].shape;
    let hd = replicates[0].spacing.powi(replicates[0].dim as i32);
    // Per (replicate, lag) normalized pair averages; integrate per replicate.
    let per_rep_values: Vec<f64> = map_indexed(m, |ri| {
        let a = &af.per_rep[ri];
        let b = &ag.per_rep[ri];
        let mut acc = 0.0;
        for &lag in &lags {
            let (s, c) = lag_pair_sum(a, b, shape, lag);
            acc += s / c as f64;
        }
        hd * acc
    });
    let value = per_rep_values.iter().sum::<f64>() / m as f64;
    let var = per_rep_values
        .iter()
        .map(|v| (v - value) * (v - value))
        .sum::<f64>()
        / (m as f64 - 1.0);
    Ok(CovEstimate {
        value,
        trunc_radius: Some(r),
        se: (var / m as f64).sqrt(),
        method: CovMethod::LagIntegration,
        replicates: m,
    })
}

fn bilinear_window_variance(
    replicates: &[FieldRealization],
    af: &Applied,
    ag: &Applied,
) -> Result<CovEstimate> {
    let m = replicates.len();
    if m < MIN_WINDOW_VARIANCE_REPLICATES {
        return Err(CoreError::SampleSize(format!(
            "window-variance estimation needs at least {MIN_WINDOW_VARIANCE_REPLICATES} replicates, got {m}"
        )));
    }
    let hd = replicates[0].spacing.powi(replicates[0].dim as i32);
    let vol = replicates[0].lattice_volume();
    let phi = |applied: &Applied| -> Vec<f64> {
        applied
            .per_rep
            .iter()
            .map(|vals| hd * vals.iter().sum::<f64>() / vol.sqrt())
            .collect()
    };
    let pf = phi(af);
    let pg = phi(ag);
    let cov_of = |skip: Option<usize>| -> f64 {
        let n = if skip.is_some() { m - 1 } else { m } as f64;
        let (mut mf, mut mg) = (0.0, 0.0);
        for i in 0..m {
            if Some(i) == skip {
                continue;
            }
            mf += pf[i];
            mg += pg[i];
        }
        mf /= n;
        mg /= n;
        let mut acc = 0.0;
        for i in 0..m {
            if Some(i) == skip {
                continue;
            }
            acc += (pf[i] - mf) * (pg[i] - mg);
        }
        acc / (n - 1.0)
    };
    let value = cov_of(None);
    let loo: Vec<f64> = (0..m).map(|i| cov_of(Some(i))).collect();
    let loo_mean = loo.iter().sum::<f64>() / m as f64;
    let jack_var = loo
        .iter()
        .map(|v| (v - loo_mean) * (v - loo_mean))
        .sum::<f64>()
        * (m as f64 - 1.0)
        / m as f64;
    Ok(CovEstimate {
        value,
        trunc_radius: None,
        se: jack_var.sqrt(),
        method: CovMethod::WindowVariance,
        replicates: m,
    })
}

fn bilinear_from_applied(
    replicates: &[FieldRealization],
    af: &Applied,
    ag: &Applied,
    r: f64,
    method: CovMethod,
) -> Result<CovEstimate> {
    match method {
        CovMethod::LagIntegration => bilinear_lag_integration(replicates, af, ag, r),
        CovMethod::WindowVariance => bilinear_window_variance(replicates, af, ag),
    }
}

/// Estimates ⟨f, g⟩ by the selected route.
pub fn estimate_bilinear_form(
    replicates: &[FieldRealization],
    f: &CompiledFunc,
    g: &CompiledFunc,
    trunc_radius: f64,
    method: CovMethod,
) -> Result<CovEstimate> {
    let af = apply(replicates, f)?;
    let ag = apply(replicates, g)?;
    bilinear_from_applied(replicates, &af, &ag, trunc_radius, method)
}

fn matrix_from_applied(
    replicates: &[FieldRealization],
    applied: &[Applied],
    r: f64,
    method: CovMethod,
) -> Result<Vec<Vec<CovEstimate>>> {
    let s = applied.len();
    let mut rows: Vec<Vec<Option<CovEstimate>>> = vec![vec![None; s]; s];
    for i in 0..s {
        for j in i..s {
            let up = bilinear_from_applied(replicates, &applied[i], &applied[j], r, method)?;
            let down = if i == j {
                up.clone()
            } else {
                bilinear_from_applied(replicates, &applied[j], &applied[i], r, method)?
            };
            // Symmetrize by averaging the (i,j) and (j,i) runs (they agree
            // exactly for both routes; the average keeps that explicit).
            let sym = CovEstimate {
                value: 0.5 * (up.value + down.value),
                se: 0.5 * (up.se + down.se),
                ..up
            };
            rows[i][j] = Some(sym.clone());
            rows[j][i] = Some(sym);
        }
    }
    Ok(rows
        .into_iter()
        .map(|row| row.into_iter().map(|e| e.expect("filled")).collect())
        .collect())
}

/// The s×s estimated form on a function list.
pub fn sigma_matrix(
    replicates: &[FieldRealization],
    funcs: &[CompiledFunc],
    trunc_radius: f64,
    method: CovMethod,
) -> Result<Vec<Vec<CovEstimate>>> {
    if funcs.is_empty() {
        return Err(CoreError::Parameter("function list is empty".into()));
    }
    let applied: Vec<Applied> = funcs
        .iter()
        .map(|f| apply(replicates, f))
        .collect::<Result<_>>()?;
    matrix_from_applied(replicates, &applied, trunc_radius, method)
}

/// Gram–Schmidt output: unit-lower-triangular coefficients over the input
/// functions, plus the estimated form on the inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalBasis {
    pub input: Vec<FuncSpec>,
    /// Row j holds the coefficients of output f_j over the inputs g_1..g_s.
    pub coeffs: Vec<Vec<f64>>,
    /// Estimated ⟨g_i, g_j⟩ values.
    pub gram: Vec<Vec<f64>>,
    /// ⟨f_k, f_k⟩ for each output, in the estimated geometry.
    pub output_norms: Vec<f64>,
}

impl OrthogonalBasis {
    /// Compiles the orthogonalized outputs as evaluatable functions.
    pub fn output_funcs(&self) -> Result<Vec<CompiledFunc>> {
        let compiled: Vec<CompiledFunc> = self
            .input
            .iter()
            .map(|s| s.compile())
            .collect::<Result<_>>()?;
        Ok(self
            .coeffs
            .iter()
            .map(|row| {
                CompiledFunc::LinearCombination(
                    row.iter()
                        .cloned()
                        .zip(compiled.iter().cloned())
                        .filter(|(a, _)| *a != 0.0)
                        .collect(),
                )
            })
            .collect())
    }
}

/// Default relative degeneracy threshold: τ = 10⁻⁶ · max diagonal entry.
pub const DEFAULT_TAU_REL: f64 = 1e-6;

/// Orthogonalizes `basis` in the estimated form geometry:
/// f_j = g_j − Σ_{k<j} (⟨g_j, f_k⟩/⟨f_k, f_k⟩) f_k. Raises a degeneracy
/// error naming the (1-based) index whose residual squared norm falls at or
/// below τ = tau_rel · max_i ⟨g_i, g_i⟩.
pub fn gram_schmidt(
    replicates: &[FieldRealization],
    basis: &[FuncSpec],
    trunc_radius: f64,
    method: CovMethod,
    tau_rel: f64,
) -> Result<OrthogonalBasis> {
    let s = basis.len();
    if s == 0 {
        return Err(CoreError::Parameter("basis is empty".into()));
    }
    let funcs: Vec<CompiledFunc> = basis.iter().map(|b| b.compile()).collect::<Result<_>>()?;
    let gram_est = sigma_matrix(replicates, &funcs, trunc_radius, method)?;
    let gram: Vec<Vec<f64>> = gram_est
        .iter()
        .map(|row| row.iter().map(|e| e.value).collect())
        .collect();
    let max_diag = (0..s).map(|i| gram[i][i]).fold(f64::MIN, f64::max);
    let tau = tau_rel * max_diag.max(0.0);
    let form = |u: &[f64], v: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..s {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..s {
                acc += u[i] * gram[i][j] * v[j];
            }
        }
        acc
    };
    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut norms: Vec<f64> = Vec::with_capacity(s);
    for j in 0..s {
        let mut u = vec![0.0; s];
        u[j] = 1.0;
        for k in 0..j {
            let e_j: Vec<f64> = (0..s).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
            let proj = form(&e_j, &coeffs[k]) / norms[k];
            for i in 0..s {
                u[i] -= proj * coeffs[k][i];
            }
        }
        let norm = form(&u, &u);
        if norm <= tau {
            return Err(CoreError::Degeneracy {
                index: j + 1,
                norm,
                threshold: tau,
            });
        }
        coeffs.push(u);
        norms.push(norm);
    }
    Ok(OrthogonalBasis {
        input: basis.to_vec(),
        coeffs,
        gram,
        output_norms: norms,
    })
}

/// Re-estimates the form on linear combinations of `basis` (rows of
/// `coeff_rows`), typically the Gram–Schmidt outputs on fresh replicates.
pub fn estimate_form_on_combos(
    replicates: &[FieldRealization],
    basis: &[FuncSpec],
    coeff_rows: &[Vec<f64>],
    trunc_radius: f64,
    method: CovMethod,
) -> Result<Vec<Vec<CovEstimate>>> {
    let funcs: Vec<CompiledFunc> = basis.iter().map(|b| b.compile()).collect::<Result<_>>()?;
    let applied: Vec<Applied> = funcs
        .iter()
        .map(|f| apply(replicates, f))
        .collect::<Result<_>>()?;
    let combos: Vec<Applied> = coeff_rows
        .iter()
        .map(|row| {
            if row.len() != applied.len() {
                return Err(CoreError::Parameter(
                    "coefficient row length does not match the basis".into(),
                ));
            }
            Ok(apply_combo(&applied, row))
        })
        .collect::<Result<_>>()?;
    matrix_from_applied(replicates, &combos, trunc_radius, method)
}
