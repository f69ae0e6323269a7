//! Asymptotic-covariance oracles for the two reference constructions.
//!
//! Both use a unit box in d = 1, whose lag-covariance profile is the triangle
//! V(t) = (1 − |t|)₊, and both have orthogonal-polynomial diagonalization:
//!
//!   ⟨Q_n, Q_m⟩ = δ_{nm} · (E Q_n²) · ∫ V(t)ⁿ dt = δ_{nm} · n! · 2/(n+1)
//!
//! for the standard-normal marginal (Hermite) and equally for the
//! unit-rate Poisson marginal (Charlier with λ = 1, where E Q_n² = n!).
//! Frozen values: σ₁₁ = 1, σ₂₂ = 4/3, σ₃₃ = 3.
//!
//! Tolerances: 3 Monte Carlo standard errors plus a 2% discretization
//! allowance — the lag sum is a trapezoid-type rule on the kinked triangle
//! power, with bias ≈ −h²·n/6 (relative ≲ 0.5% at h = 1/8).

use rfclt_core::covariance::{estimate_bilinear_form, sigma_matrix, CovMethod};
use rfclt_core::fields::levy::{GaussianMaGenerator, LevyFieldGenerator};
use rfclt_core::fields::FieldRealization;
use rfclt_core::functionals::FuncSpec;
use rfclt_core::meixner::{Family, PolySystemSpec};

const ORACLE_DIAG: [f64; 3] = [1.0, 4.0 / 3.0, 3.0];

fn poly_funcs(family: Family) -> Vec<FuncSpec> {
    (1..=3)
        .map(|degree| FuncSpec::MeixnerPoly {
            degree,
            system: PolySystemSpec {
                family,
                lambda: 1.0,
                fixed_param: None,
                affine_m: 1.0,
                affine_c: 0.0,
            },
        })
        .collect()
}

fn check_matrix_against_oracle(
    fields: &[FieldRealization],
    funcs: &[FuncSpec],
    label: &str,
) {
    let compiled: Vec<_> = funcs.iter().map(|f| f.compile().unwrap()).collect();
    let sigma = sigma_matrix(fields, &compiled, 2.0, CovMethod::LagIntegration).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let est = &sigma[i][j];
            if i == j {
                let oracle = ORACLE_DIAG[i];
                assert!(
                    (est.value - oracle).abs() < 3.0 * est.se + 0.02 * oracle,
                    "{label} σ[{i}][{i}] = {:.4} ± {:.4}, oracle {oracle:.4}",
                    est.value,
                    est.se
                );
                assert!(
                    est.value > 3.0 * est.se,
                    "{label} diagonal {i} not significantly positive: {est:?}"
                );
            } else {
                assert!(
                    est.value.abs() < 3.0 * est.se + 0.02,
                    "{label} σ[{i}][{j}] = {:.4} ± {:.4}, oracle 0",
                    est.value,
                    est.se
                );
            }
        }
    }
}

#[test]
fn hermite_diagonalization_on_the_gaussian_field() {
    let gen = GaussianMaGenerator::new(1.0, 1, 64.0, 0.125).unwrap();
    let fields: Vec<FieldRealization> = (1..=250).map(|r| gen.generate(17, r).unwrap()).collect();
    check_matrix_against_oracle(&fields, &poly_funcs(Family::Normal), "hermite");
}

#[test]
fn charlier_diagonalization_on_the_poisson_field() {
    let gen = LevyFieldGenerator::new(Family::Poisson, None, 1.0, 1, 64.0, 0.125).unwrap();
    let fields: Vec<FieldRealization> = (1..=250).map(|r| gen.generate(23, r).unwrap()).collect();
    check_matrix_against_oracle(&fields, &poly_funcs(Family::Poisson), "charlier");
}

#[test]
fn both_estimation_routes_agree_on_the_identity_form() {
    let gen = GaussianMaGenerator::new(1.0, 1, 64.0, 0.125).unwrap();
    let fields: Vec<FieldRealization> = (1..=120).map(|r| gen.generate(29, r).unwrap()).collect();
    let id = FuncSpec::Identity.compile().unwrap();
    let a = estimate_bilinear_form(&fields, &id, &id, 2.0, CovMethod::LagIntegration).unwrap();
    let b = estimate_bilinear_form(&fields, &id, &id, 2.0, CovMethod::WindowVariance).unwrap();
    assert!(
        (a.value - 1.0).abs() < 3.0 * a.se + 0.01,
        "lag route {a:?}"
    );
    assert!(
        (b.value - 1.0).abs() < 4.0 * b.se + 0.02,
        "window route {b:?}"
    );
    assert!(
        (a.value - b.value).abs() < 3.0 * (a.se + b.se) + 0.03,
        "routes disagree: {a:?} vs {b:?}"
    );
}
