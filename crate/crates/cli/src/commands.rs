//! Implementations of the seven subcommands.
//!
//! Every command resolves its output directory, writes a
//! `resolved_config.json` recording the exact inputs (after seed overrides),
//! emits its results as tabular and JSON artifacts, and closes the directory
//! with a checksum manifest. The returned path is printed by the caller.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use rfclt_core::config::{ExperimentConfig, FieldGenerator};
use rfclt_core::covariance::{gram_schmidt, sigma_matrix, CovEstimate, DEFAULT_TAU_REL};
use rfclt_core::exec::map_indexed;
use rfclt_core::fields::FieldRealization;
use rfclt_core::functionals::net::{net_approximation, random_lipschitz1, LipschitzNet};
use rfclt_core::functionals::CompiledFunc;
use rfclt_core::harness::{degenerate_variance_scan, run_clt_experiment};
use rfclt_core::meixner::exact::{closed_form_coeffs, moments, stieltjes, to_f64, Rat};
use rfclt_core::meixner::{Family, PolySystem};
use rfclt_core::CoreError;

use crate::artifacts::{resolve_out, ArtifactDir, Format, Table};
use crate::{Cli, CliError, Command};

/// Relative tolerance for the float-vs-exact recurrence comparison in
/// `poly-check`. The closed forms are a handful of float operations, so the
/// discrepancy is a few ulp; anything past this threshold means a wrong
/// formula, not rounding.
const POLY_CHECK_REL_TOL: f64 = 1e-9;

/// Dispatches the parsed command line to its implementation.
pub fn run(cli: &Cli) -> Result<PathBuf, CliError> {
    let out = resolve_out(cli.out.as_deref(), cli.command.name());
    match &cli.command {
        Command::Simulate { config } => simulate(cli, config, out),
        Command::PolyCheck {
            family,
            lambda,
            fixed_param,
            nmax,
        } => poly_check(cli, (*family).into(), *lambda, *fixed_param, *nmax, out),
        Command::EstimateCov { config } => estimate_cov(cli, config, out),
        Command::GramSchmidt { config } => gram_schmidt_cmd(cli, config, out),
        Command::CltTest { config } => clt_test(cli, config, out),
        Command::VarianceScan { config } => variance_scan(cli, config, out),
        Command::NetCheck { m, c, trials } => net_check(cli, *m, *c, *trials, out),
    }
}

/// Loads and validates an experiment configuration, applying the `--seed`
/// override before anything downstream sees the config.
fn load_config(path: &Path, seed_override: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json_str(&text)?;
    if let Some(seed) = seed_override {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

/// Generates the replicate ensemble at the largest configured window:
/// replicate r uses RNG stream r + 1 (stream 0 is reserved for
/// experiment-level draws). Field generation is pure per replicate, so the
/// parallel map is deterministic.
fn generate_ensemble(
    cfg: &ExperimentConfig,
) -> Result<(f64, FieldGenerator, Vec<FieldRealization>), CliError> {
    let window = cfg.window_seq()?.largest();
    let generator = cfg.generator.build(window)?;
    let fields = map_indexed(cfg.replicates, |r| {
        generator
            .generate(cfg.master_seed, r as u64 + 1)
            .map_err(|e| CoreError::Sampling(format!("replicate {}: {e}", r + 1)))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok((window, generator, fields))
}

/// JSON name of a covariance method (e.g. `lag_integration`).
fn method_name(method: rfclt_core::covariance::CovMethod) -> String {
    match serde_json::to_value(method) {
        Ok(serde_json::Value::String(s)) => s,
        _ => "unknown".to_string(),
    }
}

fn json_f64(x: f64) -> serde_json::Value {
    json!(x)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn simulate(cli: &Cli, config_path: &Path, out: PathBuf) -> Result<PathBuf, CliError> {
    let cfg = load_config(config_path, cli.seed)?;
    cfg.validate()?;
    let (window, generator, fields) = generate_ensemble(&cfg)?;

    let mut dir = ArtifactDir::create(out)?;
    dir.write("resolved_config.json", cfg.to_canonical_json().as_bytes())?;
    for (r, field) in fields.iter().enumerate() {
        let name = format!("field_{:04}.{}", r + 1, cli.format.ext());
        let bytes = match cli.format {
            Format::Csv => dump_field_csv(field).into_bytes(),
            Format::Json => {
                let mut text = serde_json::to_string_pretty(field)
                    .map_err(|e| CliError::Io(format!("serializing {name}: {e}")))?;
                text.push('\n');
                text.into_bytes()
            }
        };
        dir.write(&name, &bytes)?;
    }
    let report = json!({
        "generator": generator.generator_id(),
        "window": window,
        "dim": cfg.generator.dim(),
        "spacing": cfg.generator.spacing(),
        "shape": fields[0].shape,
        "sites_per_replicate": fields[0].n_sites(),
        "replicates": cfg.replicates,
        "master_seed": cfg.master_seed,
        "replicate_streams": [1, cfg.replicates],
    });
    dir.write_json("report.json", &report)?;
    dir.finish("simulate", cfg.master_seed)
}

/// Lattice dump: one comment line of key=value metadata, then the value grid
/// row-major (one row per axis-0 index, axis-1 values comma-separated).
fn dump_field_csv(field: &FieldRealization) -> String {
    let [n0, n1] = field.shape;
    let mut s = format!(
        "# generator={} dim={} side={} spacing={} shape={}x{} master_seed={} stream={}\n",
        field.meta.generator,
        field.dim,
        field.side,
        field.spacing,
        n0,
        n1,
        field.meta.master_seed,
        field.meta.stream,
    );
    for i0 in 0..n0 {
        let row = &field.values[i0 * n1..(i0 + 1) * n1];
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

// ---------------------------------------------------------------------------
// poly-check
// ---------------------------------------------------------------------------

fn poly_check(
    cli: &Cli,
    family: Family,
    lambda: f64,
    fixed_param: Option<f64>,
    nmax: usize,
    out: PathBuf,
) -> Result<PathBuf, CliError> {
    let fixed = fixed_param.or_else(|| family.default_fixed_param()).ok_or_else(|| {
        CliError::Config(format!(
            "family {} requires --fixed-param",
            family.name()
        ))
    })?;
    let system =
        PolySystem::new(family, lambda, fixed).map_err(|e| CliError::Config(e.to_string()))?;
    if nmax == 0 {
        return Err(CliError::Config("--nmax must be at least 1".into()));
    }
    let coeffs = system.recurrence_coeffs(nmax);

    // Exact route: moments → Stieltjes, on the exact binary rationals of the
    // given parameters. Closed forms are compared too, so a formula error in
    // either direction surfaces as a nonzero diff.
    let lam_rat = Rat::from_float(lambda)
        .ok_or_else(|| CliError::Config("lambda is not a finite number".into()))?;
    let fixed_rat = Rat::from_float(fixed)
        .ok_or_else(|| CliError::Config("fixed_param is not a finite number".into()))?;
    let exact = match moments(family, &lam_rat, &fixed_rat, 2 * nmax + 1) {
        Ok(moms) => {
            let (a_ref, b_ref) = stieltjes(&moms);
            let (a_cf, b_cf) = closed_form_coeffs(family, &lam_rat, &fixed_rat, nmax)?;
            if a_ref[..=nmax] != a_cf[..] || b_ref[..nmax] != b_cf[..] {
                return Err(CliError::Module(CoreError::Domain(
                    "closed-form recurrence coefficients disagree with the exact moment oracle"
                        .into(),
                )));
            }
            Some((a_ref, b_ref))
        }
        // The only inexact case: meixner_ch with a ≠ 0 has irrational
        // moments, so the rational oracle does not apply.
        Err(CoreError::Parameter(_)) => None,
        Err(other) => return Err(other.into()),
    };

    let mut table = Table::new(
        "recurrence",
        vec![
            "n",
            "alpha",
            "beta",
            "alpha_exact",
            "beta_exact",
            "alpha_diff",
            "beta_diff",
        ],
    );
    let mut max_rel_diff = 0.0f64;
    for n in 0..=nmax {
        let alpha = coeffs.alpha[n];
        let beta = (n >= 1).then(|| coeffs.beta[n - 1]);
        let (alpha_exact, beta_exact) = match &exact {
            Some((a, b)) => (Some(to_f64(&a[n])), (n >= 1).then(|| to_f64(&b[n - 1]))),
            None => (None, None),
        };
        let alpha_diff = alpha_exact.map(|e| alpha - e);
        let beta_diff = match (beta, beta_exact) {
            (Some(b), Some(e)) => Some(b - e),
            _ => None,
        };
        for (diff, scale) in [
            (alpha_diff, alpha_exact.map(f64::abs)),
            (beta_diff, beta_exact.map(f64::abs)),
        ] {
            if let (Some(d), Some(s)) = (diff, scale) {
                max_rel_diff = max_rel_diff.max(d.abs() / s.max(1.0));
            }
        }
        let opt = |v: Option<f64>| v.map(json_f64).unwrap_or(serde_json::Value::Null);
        table.push(vec![
            json!(n),
            json_f64(alpha),
            opt(beta),
            opt(alpha_exact),
            opt(beta_exact),
            opt(alpha_diff),
            opt(beta_diff),
        ]);
    }

    let mut dir = ArtifactDir::create(out)?;
    let resolved = json!({
        "command": "poly-check",
        "family": family.name(),
        "lambda": lambda,
        "fixed_param": fixed,
        "nmax": nmax,
    });
    dir.write_json("resolved_config.json", &resolved)?;
    table.write(&mut dir, cli.format)?;
    let report = json!({
        "family": family.name(),
        "lambda": lambda,
        "fixed_param": fixed,
        "nmax": nmax,
        "exact_available": exact.is_some(),
        "max_rel_diff": max_rel_diff,
        "rel_tolerance": POLY_CHECK_REL_TOL,
        "passed": exact.is_none() || max_rel_diff <= POLY_CHECK_REL_TOL,
    });
    dir.write_json("report.json", &report)?;
    let path = dir.finish("poly-check", cli.seed.unwrap_or(0))?;
    if exact.is_some() && max_rel_diff > POLY_CHECK_REL_TOL {
        return Err(CliError::Module(CoreError::Domain(format!(
            "recurrence coefficients deviate from the exact oracle by relative {max_rel_diff:.3e} \
             (tolerance {POLY_CHECK_REL_TOL:.1e})"
        ))));
    }
    Ok(path)
}

// ---------------------------------------------------------------------------
// estimate-cov
// ---------------------------------------------------------------------------

fn estimate_cov(cli: &Cli, config_path: &Path, out: PathBuf) -> Result<PathBuf, CliError> {
    let cfg = load_config(config_path, cli.seed)?;
    cfg.validate()?;
    let (window, generator, fields) = generate_ensemble(&cfg)?;
    let funcs: Vec<CompiledFunc> = cfg
        .functions
        .iter()
        .map(|f| f.compile())
        .collect::<Result<_, _>>()?;
    let names: Vec<String> = cfg.functions.iter().map(|f| f.name()).collect();
    let radius = cfg.resolved_trunc_radius(window);
    let sigma = sigma_matrix(&fields, &funcs, radius, cfg.cov_method)?;

    let mut dir = ArtifactDir::create(out)?;
    dir.write("resolved_config.json", cfg.to_canonical_json().as_bytes())?;
    let mut table = Table::new(
        "sigma",
        vec!["i", "j", "f_i", "f_j", "value", "se", "method", "replicates"],
    );
    for (i, row) in sigma.iter().enumerate() {
        for (j, est) in row.iter().enumerate() {
            table.push(vec![
                json!(i),
                json!(j),
                json!(names[i]),
                json!(names[j]),
                json_f64(est.value),
                json_f64(est.se),
                json!(method_name(est.method)),
                json!(est.replicates),
            ]);
        }
    }
    table.write(&mut dir, cli.format)?;
    let value_of = |get: fn(&CovEstimate) -> f64| -> Vec<Vec<f64>> {
        sigma
            .iter()
            .map(|row| row.iter().map(get).collect())
            .collect()
    };
    let report = json!({
        "generator": generator.generator_id(),
        "window": window,
        "replicates": cfg.replicates,
        "functions": names,
        "method": method_name(cfg.cov_method),
        "trunc_radius": radius,
        "matrix": value_of(|e| e.value),
        "se": value_of(|e| e.se),
        "seeds": { "master_seed": cfg.master_seed, "replicate_streams": [1, cfg.replicates] },
    });
    dir.write_json("report.json", &report)?;
    dir.finish("estimate-cov", cfg.master_seed)
}

// ---------------------------------------------------------------------------
// gram-schmidt
// ---------------------------------------------------------------------------

fn gram_schmidt_cmd(cli: &Cli, config_path: &Path, out: PathBuf) -> Result<PathBuf, CliError> {
    let cfg = load_config(config_path, cli.seed)?;
    cfg.validate()?;
    let (window, generator, fields) = generate_ensemble(&cfg)?;
    let radius = cfg.resolved_trunc_radius(window);
    let tau_rel = cfg.degeneracy_tau_rel.unwrap_or(DEFAULT_TAU_REL);
    let basis = gram_schmidt(&fields, &cfg.functions, radius, cfg.cov_method, tau_rel)?;
    let names: Vec<String> = cfg.functions.iter().map(|f| f.name()).collect();

    let mut dir = ArtifactDir::create(out)?;
    dir.write("resolved_config.json", cfg.to_canonical_json().as_bytes())?;

    let mut coeff_cols: Vec<String> = vec!["output".to_string()];
    coeff_cols.extend(names.iter().cloned());
    let mut coeff_table = Table::new("coefficients", coeff_cols);
    for (j, row) in basis.coeffs.iter().enumerate() {
        let mut cells = vec![json!(j)];
        cells.extend(row.iter().map(|&a| json_f64(a)));
        coeff_table.push(cells);
    }
    coeff_table.write(&mut dir, cli.format)?;

    let mut gram_table = Table::new("gram", vec!["i", "j", "f_i", "f_j", "value"]);
    for (i, row) in basis.gram.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            gram_table.push(vec![
                json!(i),
                json!(j),
                json!(names[i]),
                json!(names[j]),
                json_f64(v),
            ]);
        }
    }
    gram_table.write(&mut dir, cli.format)?;

    let mut norm_table = Table::new("norms", vec!["output", "squared_norm"]);
    for (j, &norm) in basis.output_norms.iter().enumerate() {
        norm_table.push(vec![json!(j), json_f64(norm)]);
    }
    norm_table.write(&mut dir, cli.format)?;

    let report = json!({
        "generator": generator.generator_id(),
        "window": window,
        "replicates": cfg.replicates,
        "method": method_name(cfg.cov_method),
        "trunc_radius": radius,
        "tau_rel": tau_rel,
        "basis": basis,
        "seeds": { "master_seed": cfg.master_seed, "replicate_streams": [1, cfg.replicates] },
    });
    dir.write_json("report.json", &report)?;
    dir.finish("gram-schmidt", cfg.master_seed)
}

// ---------------------------------------------------------------------------
// clt-test
// ---------------------------------------------------------------------------

fn clt_test(cli: &Cli, config_path: &Path, out: PathBuf) -> Result<PathBuf, CliError> {
    let cfg = load_config(config_path, cli.seed)?;
    let report = run_clt_experiment(&cfg)?;

    let mut dir = ArtifactDir::create(out)?;
    dir.write("resolved_config.json", cfg.to_canonical_json().as_bytes())?;
    let mut cols: Vec<String> = vec!["replicate".to_string()];
    cols.extend(report.function_names.iter().cloned());
    let mut table = Table::new("replicate_matrix", cols);
    for (r, row) in report.replicate_matrix.iter().enumerate() {
        let mut cells = vec![json!(r + 1)];
        cells.extend(row.iter().map(|&v| json_f64(v)));
        table.push(cells);
    }
    table.write(&mut dir, cli.format)?;
    dir.write_json("report.json", &report)?;
    dir.finish("clt-test", cfg.master_seed)
}

// ---------------------------------------------------------------------------
// variance-scan
// ---------------------------------------------------------------------------

fn variance_scan(cli: &Cli, config_path: &Path, out: PathBuf) -> Result<PathBuf, CliError> {
    let cfg = load_config(config_path, cli.seed)?;
    let scan = degenerate_variance_scan(&cfg, &cfg.windows)?;

    let mut dir = ArtifactDir::create(out)?;
    dir.write("resolved_config.json", cfg.to_canonical_json().as_bytes())?;
    let mut table = Table::new("scan", vec!["window", "variance", "replicates"]);
    for p in &scan.points {
        table.push(vec![
            json_f64(p.window),
            json_f64(p.variance),
            json!(p.replicates),
        ]);
    }
    table.write(&mut dir, cli.format)?;
    dir.write_json("report.json", &scan)?;
    dir.finish("variance-scan", cfg.master_seed)
}

// ---------------------------------------------------------------------------
// net-check
// ---------------------------------------------------------------------------

fn net_check(
    cli: &Cli,
    m: usize,
    c: f64,
    trials: usize,
    out: PathBuf,
) -> Result<PathBuf, CliError> {
    let net = LipschitzNet::new(m, c).map_err(|e| CliError::Config(e.to_string()))?;
    if trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    let seed = cli.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut table = Table::new("trials", vec!["trial", "best_member", "error", "ok"]);
    let mut successes = 0usize;
    let mut max_error = 0.0f64;
    // Grid-level tolerance: the bound `error ≤ c` is exact arithmetic on the
    // grid, so only rounding slack is allowed.
    let tol = c * 1e-12;
    for t in 0..trials {
        let spec = random_lipschitz1(&mut rng, m, c);
        let f = spec.compile()?;
        let (best, error) = net_approximation(&f, &net)?;
        let ok = error <= c + tol;
        successes += ok as usize;
        max_error = max_error.max(error);
        table.push(vec![json!(t), json!(best), json_f64(error), json!(ok)]);
    }

    let mut dir = ArtifactDir::create(out)?;
    let resolved = json!({
        "command": "net-check",
        "m": m,
        "c": c,
        "trials": trials,
        "seed": seed,
    });
    dir.write_json("resolved_config.json", &resolved)?;
    table.write(&mut dir, cli.format)?;
    let report = json!({
        "m": m,
        "c": c,
        "member_count": net.member_count(),
        "trials": trials,
        "successes": successes,
        "max_error": max_error,
        "seed": seed,
    });
    dir.write_json("report.json", &report)?;
    let path = dir.finish("net-check", seed)?;
    if successes < trials {
        return Err(CliError::Module(CoreError::Domain(format!(
            "covering net failed on {} of {trials} trials (max error {max_error:.6} > pitch {c})",
            trials - successes
        ))));
    }
    Ok(path)
}
