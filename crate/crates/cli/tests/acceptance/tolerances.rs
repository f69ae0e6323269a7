//! Pinned parameters, tolerances, and wall-clock budgets for the acceptance
//! suite. Every value here is frozen together with the seeds: a criterion
//! that fails is investigated, not loosened.
//!
//! Statistical bounds follow one pattern: a pinned master seed makes the
//! experiment deterministic, and the bound allows three standard errors of
//! Monte Carlo noise plus a small systematic allowance. The systematic part
//! covers the O(h²) bias of summing the covariance function on a lattice of
//! pitch h (relative size ≈ h²·n/6 for a degree-n polynomial direction,
//! ≲ 0.5% at the pitches used here — comfortably inside the 2% allowance).

/// C1 — orthogonal polynomial systems (all five families).
pub const C1_BUDGET_SECS: u64 = 10;
/// Quadrature orthogonality: |⟨Q_n, Q_m⟩| relative to the norm scale.
pub const C1_ORTHO_REL_TOL: f64 = 1e-8;
/// Leading coefficient recovered by n-th forward differences.
pub const C1_MONIC_REL_TOL: f64 = 1e-6;
/// Convolution identity, relative to max(1, |lhs|).
pub const C1_CONV_REL_TOL: f64 = 1e-9;
pub const C1_DEGREE_MAX: usize = 5;
pub const C1_CONV_POINTS: usize = 20;
pub const C1_SEED: u64 = 101;

/// C2 — closed-form recurrence coefficients equal the exact-rational
/// moment/Stieltjes oracle, as rationals (no tolerance at all).
pub const C2_BUDGET_SECS: u64 = 5;
pub const C2_DEGREE_MAX: usize = 8;

/// C3 — Gaussian moving average, identity functional: the normalized
/// window functional matches its N(0, 1) limit.
pub const C3_BUDGET_SECS: u64 = 120;
pub const C3_SEED: u64 = 2024;
pub const C3_REPLICATES: usize = 500;
pub const C3_WINDOW: f64 = 64.0;
pub const C3_SPACING: f64 = 0.25;
/// Replicate variance must bracket the theoretical σ² = 1.
pub const C3_VARIANCE_LO: f64 = 0.85;
pub const C3_VARIANCE_HI: f64 = 1.15;
/// KS distance of 500 replicates against N(0, 1); the 0.1%-level critical
/// value is ≈ 0.087, and the pinned seed lands far below.
pub const C3_KS_DISTANCE_MAX: f64 = 0.08;

/// C4 — Poisson Lévy field, polynomial directions 1..3: the estimated
/// covariance matrix is diagonal with the predicted entries.
pub const C4_BUDGET_SECS: u64 = 180;
pub const C4_SEED: u64 = 23;
pub const C4_REPLICATES: usize = 250;
pub const C4_WINDOW: f64 = 64.0;
pub const C4_SPACING: f64 = 0.125;
/// Predicted diagonal: n!·2/(n+1) for the unit box at unit rate.
pub const C4_DIAG_ORACLE: [f64; 3] = [1.0, 4.0 / 3.0, 3.0];
/// Diagonal: |est − oracle| ≤ 3·SE + 2%·oracle (bias allowance above).
pub const C4_DIAG_REL_ALLOWANCE: f64 = 0.02;
/// Off-diagonal: |est| ≤ 3·SE + 0.02 absolute.
pub const C4_OFFDIAG_ABS_ALLOWANCE: f64 = 0.02;

/// C5 — Gram–Schmidt coefficients fitted on one ensemble orthogonalize a
/// fresh, independently seeded ensemble.
pub const C5_BUDGET_SECS: u64 = 120;
pub const C5_SEED_FIT: u64 = 314;
pub const C5_SEED_FRESH: u64 = 2718;
pub const C5_REPLICATES: usize = 150;
pub const C5_WINDOW: f64 = 32.0;
pub const C5_SPACING: f64 = 0.25;
/// Off-diagonal of the re-estimated form: |est| ≤ 3·SE + 0.02.
pub const C5_OFFDIAG_ABS_ALLOWANCE: f64 = 0.02;

/// C6 — Voronoi volume-fraction field: every direction is degenerate, so
/// the scan variance must collapse, and per-cell level sets obey
/// area{X ≤ b} = b·area exactly up to rasterization error.
pub const C6_BUDGET_SECS: u64 = 480;
pub const C6_SEED: u64 = 99;
pub const C6_REPLICATES: usize = 200;
pub const C6_WINDOWS: [f64; 3] = [8.0, 16.0, 32.0];
pub const C6_SPACING: f64 = 0.1;
/// Var(Φ_L) decays like a/L (+ O(h²)); over a 4× window growth the pinned
/// run must drop below a quarter of the starting variance.
pub const C6_FINAL_RATIO_MAX: f64 = 0.25;
/// Number of interior cells checked for the exact-level-set property.
pub const C6_CELLS: usize = 50;
/// Rasterizing {X ≤ 1/2} ∩ C misses by O(h·perimeter); the bound is
/// FACTOR·h·√area per cell.
pub const C6_CELL_TOL_FACTOR: f64 = 5.0;
pub const C6_CELL_WINDOW: f64 = 16.0;
/// Level checked in the per-cell property.
pub const C6_LEVEL: f64 = 0.5;

/// C7 — circle–polygon intersection kernel: exact closed-form cases to
/// machine precision, random cells against a Monte Carlo rejection oracle.
pub const C7_BUDGET_SECS: u64 = 30;
pub const C7_EXACT_TOL: f64 = 1e-12;
pub const C7_SEED: u64 = 7071;
pub const C7_MC_CASES: usize = 20;
/// Rejection-sampling points per case; at 4·10⁶ the oracle's own relative
/// noise is ≈ 6·10⁻⁴, so three noise sigmas stay inside the tolerance.
pub const C7_MC_POINTS: usize = 4_000_000;
/// "Three significant digits" against the MC oracle.
pub const C7_MC_REL_TOL: f64 = 2e-3;

/// C8 — Lipschitz covering net: every random Lipschitz-1 function with
/// f(0) = 0 is approximated within the net pitch on the net's grid.
pub const C8_BUDGET_SECS: u64 = 30;
pub const C8_SEED: u64 = 4242;
pub const C8_TRIALS_PER_NET: usize = 500;
/// (resolution m, pitch c) pairs; the net has 2^{2m} members.
pub const C8_NETS: [(usize, f64); 2] = [(2, 0.5), (4, 0.25)];
/// Pure float-rounding slack on the grid bound `error ≤ c`.
pub const C8_ROUNDING_SLACK: f64 = 1e-12;

/// C9 — rerunning the binary with one seed reproduces byte-identical
/// artifacts (compared through the checksum manifests).
pub const C9_BUDGET_SECS: u64 = 60;
pub const C9_SEED: u64 = 7;
