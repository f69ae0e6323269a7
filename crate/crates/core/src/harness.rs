//! Monte Carlo experiments around the normalized window statistic
//!
//! ```text
//! Φ(f) = (1/√λ_d(W)) ∫_W (f(X(t)) − E f(X(0))) dt
//! ```
//!
//! Three entry points:
//! [`run_clt_experiment`] replicates a field, collects the Φ vector per
//! replicate, tests each coordinate against N(0, σ̂_ii), and cross-checks the
//! replicate covariance against the lag-estimated matrix.
//! [`ks_normality`] is the underlying one-sample Kolmogorov–Smirnov test.
//! [`degenerate_variance_scan`] tracks Var Φ_L(f) over a growing window
//! sequence — shrinking toward zero for the volume-fraction field, stabilizing
//! at the asymptotic variance for fields with a nondegenerate limit.
//!
//! Determinism: replicate r of window index l draws from RNG stream
//! `l·M + r + 1` (stream 0 stays reserved for scene-level use); mean
//! estimation, when requested, uses a dedicated stream block after all
//! replicate streams. Replicates are generated in parallel but assembled in
//! replicate order, so reports are byte-stable for a fixed config and seed.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::config::{ExperimentConfig, FieldGenerator, MeanPolicy};
use crate::covariance::{sigma_matrix, CovEstimate};
use crate::error::{CoreError, Result};
use crate::exec::map_indexed;
use crate::fields::voronoi::VoronoiScene;
use crate::fields::FieldRealization;
use crate::functionals::{phi_n, CompiledFunc};

/// Extra replicates drawn when the centering mean must be estimated: the
/// estimation sample is 10 windows' worth of sites, an order of magnitude
/// more marginal draws than any single replicate contributes.
pub const MEAN_ESTIMATION_REPLICATES: u64 = 10;

/// One coordinate's Kolmogorov–Smirnov test result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsStat {
    /// Supremum distance between the empirical CDF and the reference normal.
    pub distance: f64,
    /// Asymptotic p-value with the finite-sample size correction.
    pub p_value: f64,
}

/// Seed bookkeeping echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedInfo {
    pub master_seed: u64,
    /// Inclusive RNG stream range used for replicates.
    pub replicate_streams: [u64; 2],
    /// Inclusive stream range used for mean estimation, when it ran.
    pub mean_streams: Option<[u64; 2]>,
}

/// Result of one CLT experiment at a single window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub generator: String,
    pub window: f64,
    pub replicates: usize,
    pub function_names: Vec<String>,
    /// Φ(f_i) per replicate: `replicates` rows × `function_names` columns.
    pub replicate_matrix: Vec<Vec<f64>>,
    /// Centering constants E[f_i(X(0))] used inside Φ.
    pub means: Vec<f64>,
    /// True when the centering constants came from Monte Carlo estimation
    /// rather than the exact marginal law.
    pub mean_estimated: bool,
    /// Estimated asymptotic covariance matrix Σ̂.
    pub sigma_hat: Vec<Vec<f64>>,
    /// Standard errors of the Σ̂ entries.
    pub sigma_se: Vec<Vec<f64>>,
    /// Truncation radius the Σ̂ estimate used.
    pub trunc_radius: f64,
    /// Sample covariance of the replicate matrix columns.
    pub empirical_cov: Vec<Vec<f64>>,
    /// max over entries of |empirical_cov − sigma_hat|.
    pub cov_discrepancy: f64,
    /// Per-coordinate KS test of the Φ sample vs N(0, σ̂_ii); `None` where
    /// the coordinate is degenerate or the sample is too small (< 30).
    pub ks_stats: Vec<Option<KsStat>>,
    /// Coordinate is degenerate: replicate values all equal, or σ̂_ii not a
    /// usable positive variance.
    pub degenerate: Vec<bool>,
    pub seeds: SeedInfo,
}

/// One window's variance estimate in a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub window: f64,
    /// Sample variance of Φ_L(f) across replicates.
    pub variance: f64,
    pub replicates: usize,
}

/// Variance-over-windows scan result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceScan {
    pub generator: String,
    pub function: String,
    pub points: Vec<ScanPoint>,
    /// Centering constant used at every window.
    pub mean: f64,
    pub mean_estimated: bool,
    pub seeds: SeedInfo,
}

/// One-sample Kolmogorov–Smirnov test of `samples` against N(0, variance).
///
/// The p-value uses the asymptotic tail Q(t) = 2Σ_{k≥1} (−1)^{k−1} e^{−2k²t²}
/// evaluated at the Stephens-corrected statistic (√n + 0.12 + 0.11/√n)·D.
pub fn ks_normality(samples: &[f64], variance: f64) -> Result<KsStat> {
    if samples.len() < 30 {
        return Err(CoreError::SampleSize(format!(
            "KS test needs at least 30 samples, got {}",
            samples.len()
        )));
    }
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(CoreError::Parameter(format!(
            "KS reference variance is degenerate: {variance}"
        )));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::Parameter(
            "KS samples contain non-finite values".into(),
        ));
    }
    let normal = Normal::new(0.0, variance.sqrt()).expect("positive finite sd");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = sorted.len() as f64;
    let mut distance: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = normal.cdf(x);
        let upper = (i + 1) as f64 / n - cdf;
        let lower = cdf - i as f64 / n;
        distance = distance.max(upper).max(lower);
    }
    let t = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * distance;
    Ok(KsStat {
        distance,
        p_value: kolmogorov_tail(t),
    })
}

/// Q(t) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²t²}, clamped to [0, 1].
fn kolmogorov_tail(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64).powi(2) * t * t).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Centering constants for all functions, honoring the configured policy.
/// Returns (means, estimated?, mean stream range).
fn resolve_means(
    gen: &FieldGenerator,
    config: &ExperimentConfig,
    funcs: &[CompiledFunc],
    first_mean_stream: u64,
) -> Result<(Vec<f64>, bool, Option<[u64; 2]>)> {
    match config.mean_policy {
        MeanPolicy::Analytic => {
            let means = funcs
                .iter()
                .map(|f| gen.analytic_mean(f))
                .collect::<Result<Vec<f64>>>()?;
            Ok((means, false, None))
        }
        MeanPolicy::Estimated => {
            let streams = [
                first_mean_stream,
                first_mean_stream + MEAN_ESTIMATION_REPLICATES - 1,
            ];
            let mut sums = vec![0.0f64; funcs.len()];
            let mut count = 0usize;
            for stream in streams[0]..=streams[1] {
                let field = gen
                    .generate(config.master_seed, stream)
                    .map_err(|e| CoreError::Sampling(format!("mean estimation: {e}")))?;
                count += field.values.len();
                for (f, sum) in funcs.iter().zip(&mut sums) {
                    *sum += field.values.iter().map(|&x| f.eval(x)).sum::<f64>();
                }
            }
            let means = sums.into_iter().map(|s| s / count as f64).collect();
            Ok((means, true, Some(streams)))
        }
    }
}

/// Sample covariance matrix of the columns of an M×s matrix (denominator
/// M − 1). Column means are computed anchored at the first row so constant
/// columns center to exact zeros.
fn sample_cov_matrix(matrix: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = matrix.len();
    let s = matrix[0].len();
    let mut centered = vec![vec![0.0f64; m]; s];
    for (j, col) in centered.iter_mut().enumerate() {
        let anchor = matrix[0][j];
        let mean = anchor + matrix.iter().map(|row| row[j] - anchor).sum::<f64>() / m as f64;
        for (r, row) in matrix.iter().enumerate() {
            col[r] = row[j] - mean;
        }
    }
    let mut cov = vec![vec![0.0f64; s]; s];
    for i in 0..s {
        for j in i..s {
            let c = centered[i]
                .iter()
                .zip(&centered[j])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / (m as f64 - 1.0);
            cov[i][j] = c;
            cov[j][i] = c;
        }
    }
    cov
}

/// Runs the full experiment at the largest configured window: M replicates,
/// Φ vectors, per-coordinate normality tests against N(0, σ̂_ii), and the
/// covariance cross-check between the replicate sample and the lag estimate.
pub fn run_clt_experiment(config: &ExperimentConfig) -> Result<CltReport> {
    config.validate()?;
    let window = config.window_seq()?.largest();
    let gen = config.generator.build(window)?;
    let funcs: Vec<CompiledFunc> = config
        .functions
        .iter()
        .map(|f| f.compile())
        .collect::<Result<_>>()?;
    let m = config.replicates;
    if m < 2 {
        return Err(CoreError::SampleSize(
            "a CLT experiment needs at least 2 replicates".into(),
        ));
    }

    let (means, mean_estimated, mean_streams) =
        resolve_means(&gen, config, &funcs, m as u64 + 1)?;

    // Generate all replicates (streams 1..=M), keeping the fields for the
    // covariance estimate so Φ and Σ̂ come from the same ensemble.
    let fields: Vec<FieldRealization> = map_indexed(m, |r| {
        gen.generate(config.master_seed, r as u64 + 1)
            .map_err(|e| CoreError::Sampling(format!("replicate {r}: {e}")))
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let replicate_matrix: Vec<Vec<f64>> = fields
        .iter()
        .map(|field| {
            funcs
                .iter()
                .zip(&means)
                .map(|(f, &mu)| phi_n(field, f, mu))
                .collect()
        })
        .collect();
    if replicate_matrix
        .iter()
        .any(|row| row.iter().any(|v| !v.is_finite()))
    {
        return Err(CoreError::Domain(
            "replicate statistics contain non-finite values".into(),
        ));
    }

    let trunc_radius = config.resolved_trunc_radius(window);
    let sigma = sigma_matrix(&fields, &funcs, trunc_radius, config.cov_method)?;
    let sigma_hat: Vec<Vec<f64>> = sigma
        .iter()
        .map(|row| row.iter().map(|e| e.value).collect())
        .collect();
    let sigma_se: Vec<Vec<f64>> = sigma
        .iter()
        .map(|row: &Vec<CovEstimate>| row.iter().map(|e| e.se).collect())
        .collect();

    let empirical_cov = sample_cov_matrix(&replicate_matrix);
    let cov_discrepancy = empirical_cov
        .iter()
        .flatten()
        .zip(sigma_hat.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    let s = funcs.len();
    let mut ks_stats: Vec<Option<KsStat>> = Vec::with_capacity(s);
    let mut degenerate = Vec::with_capacity(s);
    for j in 0..s {
        let column: Vec<f64> = replicate_matrix.iter().map(|row| row[j]).collect();
        let all_equal = column.iter().all(|&v| v == column[0]);
        let var = sigma_hat[j][j];
        let is_degenerate = all_equal || !(var > 0.0) || !var.is_finite();
        degenerate.push(is_degenerate);
        if is_degenerate || m < 30 {
            ks_stats.push(None);
        } else {
            ks_stats.push(Some(ks_normality(&column, var)?));
        }
    }

    Ok(CltReport {
        generator: gen.generator_id(),
        window,
        replicates: m,
        function_names: config.functions.iter().map(|f| f.name()).collect(),
        replicate_matrix,
        means,
        mean_estimated,
        sigma_hat,
        sigma_se,
        trunc_radius,
        empirical_cov,
        cov_discrepancy,
        ks_stats,
        degenerate,
        seeds: SeedInfo {
            master_seed: config.master_seed,
            replicate_streams: [1, m as u64],
            mean_streams,
        },
    })
}

/// Variance of Φ_L(f) across replicates for each window side in `sizes`
/// (strictly increasing). Uses the first configured function; fields are
/// never retained, so arbitrarily large scans run in per-replicate memory.
///
/// Window index l, replicate r draws from stream `l·M + r + 1`.
pub fn degenerate_variance_scan(
    config: &ExperimentConfig,
    sizes: &[f64],
) -> Result<VarianceScan> {
    config.validate()?;
    if sizes.is_empty() {
        return Err(CoreError::Parameter("scan needs at least one window".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoreError::Parameter(
            "scan windows must be strictly increasing".into(),
        ));
    }
    let m = config.replicates;
    if m < 2 {
        return Err(CoreError::SampleSize(
            "variance estimation needs at least 2 replicates".into(),
        ));
    }
    let func_spec = &config.functions[0];
    let func = func_spec.compile()?;

    // Means do not depend on the window (the marginal law is window-free),
    // so resolve once at the largest window; estimation streams sit after
    // every replicate stream of the scan.
    let largest = *sizes.last().expect("nonempty");
    let gen_largest = config.generator.build(largest)?;
    let total_rep_streams = (sizes.len() * m) as u64;
    let (means, mean_estimated, mean_streams) = resolve_means(
        &gen_largest,
        config,
        std::slice::from_ref(&func),
        total_rep_streams + 1,
    )?;
    let mean = means[0];

    let mut points = Vec::with_capacity(sizes.len());
    for (l, &side) in sizes.iter().enumerate() {
        let gen = config.generator.build(side)?;
        let phis: Vec<f64> = map_indexed(m, |r| {
            let stream = (l * m + r) as u64 + 1;
            let field = gen
                .generate(config.master_seed, stream)
                .map_err(|e| CoreError::Sampling(format!("window {side} replicate {r}: {e}")))?;
            Ok::<f64, CoreError>(phi_n(&field, &func, mean))
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let anchor = phis[0];
        let mu = anchor + phis.iter().map(|p| p - anchor).sum::<f64>() / m as f64;
        let variance = phis.iter().map(|p| (p - mu).powi(2)).sum::<f64>() / (m as f64 - 1.0);
        points.push(ScanPoint {
            window: side,
            variance,
            replicates: m,
        });
    }

    Ok(VarianceScan {
        generator: config.generator.build(largest)?.generator_id(),
        function: func_spec.name(),
        points,
        mean,
        mean_estimated,
        seeds: SeedInfo {
            master_seed: config.master_seed,
            replicate_streams: [1, total_rep_streams],
            mean_streams,
        },
    })
}

/// Lattice integral of g(X) over one Voronoi cell versus the uniform-law
/// prediction — the per-cell sanity check behind the degenerate-variance
/// mechanism: within a cell the field value is the normalized distance rank,
/// so ∫_cell g(X(t)) dt ≈ (∫₀¹ g) · area(cell) up to O(h·perimeter).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCheck {
    /// Nucleus index of the cell.
    pub cell: usize,
    pub area: f64,
    /// h²·Σ_{sites in the cell} g(X(site)).
    pub lattice_integral: f64,
    /// (∫₀¹ g) · area.
    pub predicted: f64,
}

/// Evaluates the per-cell integral check for each listed cell index.
/// `uniform_integral` is ∫₀¹ g(x) dx for the supplied g.
pub fn per_cell_lattice_integrals<G: Fn(f64) -> f64>(
    scene: &VoronoiScene,
    field: &FieldRealization,
    g: G,
    uniform_integral: f64,
    cells: &[usize],
) -> Vec<CellCheck> {
    let h_d = field.spacing * field.spacing;
    cells
        .iter()
        .map(|&cell| {
            let lattice_integral = field
                .values
                .iter()
                .zip(&scene.site_nucleus)
                .filter(|(_, &nucleus)| nucleus as usize == cell)
                .map(|(&v, _)| g(v))
                .sum::<f64>()
                * h_d;
            let area = scene.cell_areas[cell];
            CellCheck {
                cell,
                area,
                lattice_integral,
                predicted: uniform_integral * area,
            }
        })
        .collect()
}
