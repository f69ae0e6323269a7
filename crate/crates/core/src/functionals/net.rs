//! The Lipschitz covering net: 2^{2m} piecewise-linear functions with
//! slopes ±1 on the 2m intervals [(k−1)c, kc], k = −m+1..m, all vanishing
//! at 0 and constant outside [−mc, mc].
//!
//! For any f with f(0) = 0 and Lipschitz constant ≤ 1, some member matches
//! f at every grid point kc (k = −m..m) within c: walking outward from 0,
//! each ±c step can stay within c of a 1-Lipschitz function's increment.
//! `net_approximation` certifies this constructively by exhaustive search.

use rand::Rng;

use super::{CompiledFunc, FuncSpec};
use crate::error::{CoreError, Result};

/// Largest admissible half-width parameter m (member count is 4^m).
pub const MAX_NET_M: usize = 12;

/// The family of 2^{2m} slope-±1 piecewise-linear functions on a grid of
/// pitch c.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LipschitzNet {
    m: usize,
    c_bits: u64,
}

impl LipschitzNet {
    pub fn new(m: usize, c: f64) -> Result<Self> {
        if m == 0 || m > MAX_NET_M {
            return Err(CoreError::Parameter(format!(
                "net half-width m must be in 1..={MAX_NET_M}"
            )));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(CoreError::Parameter("net pitch c must be positive".into()));
        }
        Ok(Self {
            m,
            c_bits: c.to_bits(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn c(&self) -> f64 {
        f64::from_bits(self.c_bits)
    }

    /// Exactly 2^{2m}.
    pub fn member_count(&self) -> usize {
        1usize << (2 * self.m)
    }

    /// Member by canonical binary index: bit j (least significant first)
    /// gives the slope on the j-th interval from the left, with bit 1 ↦
    /// slope +1 and bit 0 ↦ slope −1.
    pub fn member(&self, index: usize) -> NetMember {
        assert!(index < self.member_count(), "member index out of range");
        let m = self.m;
        let c = self.c();
        let slopes: Vec<f64> = (0..2 * m)
            .map(|j| if index >> j & 1 == 1 { 1.0 } else { -1.0 })
            .collect();
        // Grid values at kc, k = −m..=m, anchored at f(0) = 0. Interval j
        // spans [(j−m)c, (j−m+1)c]; its left grid slot is j, right is j+1.
        let mut grid = vec![0.0; 2 * m + 1];
        for j in m..2 * m {
            grid[j + 1] = grid[j] + c * slopes[j];
        }
        for j in (0..m).rev() {
            grid[j] = grid[j + 1] - c * slopes[j];
        }
        NetMember {
            m,
            c,
            slopes,
            grid,
        }
    }

    pub fn members(&self) -> impl Iterator<Item = NetMember> + '_ {
        (0..self.member_count()).map(|i| self.member(i))
    }
}

/// One net function.
#[derive(Debug, Clone, PartialEq)]
pub struct NetMember {
    m: usize,
    c: f64,
    /// ±1 per interval, left to right.
    pub slopes: Vec<f64>,
    /// Values at the grid points kc, k = −m..=m.
    pub grid: Vec<f64>,
}

impl NetMember {
    pub fn eval(&self, x: f64) -> f64 {
        let (m, c) = (self.m as f64, self.c);
        if x <= -m * c {
            return self.grid[0];
        }
        if x >= m * c {
            return self.grid[2 * self.m];
        }
        let j = ((x / c + m).floor() as usize).min(2 * self.m - 1);
        let left = (j as f64 - m) * c;
        self.grid[j] + self.slopes[j] * (x - left)
    }

    /// Value at the grid point kc, k ∈ [−m, m].
    pub fn grid_value(&self, k: isize) -> f64 {
        self.grid[(k + self.m as isize) as usize]
    }
}

/// Finds the net member closest to `f` on the grid {kc : k = −m..m} by
/// exhaustive search, returning its index and grid error
/// max_k |f(kc) − f_i(kc)|. Requires f(0) = 0 and a known Lipschitz
/// constant ≤ 1 — the hypotheses under which the error is guaranteed ≤ c.
pub fn net_approximation(f: &CompiledFunc, net: &LipschitzNet) -> Result<(usize, f64)> {
    let lip = f.lipschitz_constant().ok_or_else(|| {
        CoreError::Domain("net approximation needs a function with a finite Lipschitz constant".into())
    })?;
    if lip > 1.0 + 1e-12 {
        return Err(CoreError::Domain(format!(
            "net approximation requires Lipschitz constant ≤ 1, got {lip}"
        )));
    }
    let f0 = f.value_at_zero();
    if f0.abs() > 1e-12 {
        return Err(CoreError::Domain(format!(
            "net approximation requires f(0) = 0, got {f0}"
        )));
    }
    let m = net.m() as isize;
    let c = net.c();
    let targets: Vec<f64> = (-m..=m).map(|k| f.eval(k as f64 * c)).collect();
    let mut best = (0usize, f64::INFINITY);
    for (i, member) in net.members().enumerate() {
        let mut err: f64 = 0.0;
        for (slot, &t) in targets.iter().enumerate() {
            err = err.max((t - member.grid[slot]).abs());
            if err >= best.1 {
                break;
            }
        }
        if err < best.1 {
            best = (i, err);
        }
    }
    Ok(best)
}

/// Random 1-Lipschitz piecewise-linear function with f(0) = 0: slopes drawn
/// uniformly from [−1, 1] on intervals of width c/2 covering
/// [−(m+1)c, (m+1)c]. Used by the net verification harness.
pub fn random_lipschitz1<R: Rng + ?Sized>(rng: &mut R, m: usize, c: f64) -> FuncSpec {
    let half = c / 2.0;
    let steps = 2 * (2 * m + 2); // intervals of width c/2 on each side of 0
    let total = steps + 1;
    let mut breakpoints = Vec::with_capacity(total);
    let mut values = vec![0.0; total];
    let zero_slot = steps / 2;
    for i in 0..total {
        breakpoints.push((i as isize - zero_slot as isize) as f64 * half);
    }
    for i in zero_slot..steps {
        let slope: f64 = rng.gen_range(-1.0..=1.0);
        values[i + 1] = values[i] + slope * half;
    }
    for i in (0..zero_slot).rev() {
        let slope: f64 = rng.gen_range(-1.0..=1.0);
        values[i] = values[i + 1] - slope * half;
    }
    FuncSpec::PiecewiseLinear {
        breakpoints,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn member_count_is_four_to_the_m() {
        assert_eq!(LipschitzNet::new(1, 1.0).unwrap().member_count(), 4);
        assert_eq!(LipschitzNet::new(2, 0.5).unwrap().member_count(), 16);
        assert_eq!(LipschitzNet::new(4, 0.25).unwrap().member_count(), 256);
        assert!(LipschitzNet::new(0, 1.0).is_err());
        assert!(LipschitzNet::new(13, 1.0).is_err());
        assert!(LipschitzNet::new(2, 0.0).is_err());
    }

    #[test]
    fn members_vanish_at_zero_and_flatten_outside() {
        let net = LipschitzNet::new(2, 0.5).unwrap();
        for member in net.members() {
            assert_eq!(member.eval(0.0), 0.0);
            assert_eq!(member.eval(-100.0), member.grid_value(-2));
            assert_eq!(member.eval(100.0), member.grid_value(2));
            // Slopes are ±1 and grid increments match them.
            for (j, &s) in member.slopes.iter().enumerate() {
                assert!(s == 1.0 || s == -1.0);
                let inc = member.grid[j + 1] - member.grid[j];
                assert!((inc - 0.5 * s).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn grid_values_are_integer_multiples_of_c_bounded_by_distance() {
        let net = LipschitzNet::new(3, 0.25).unwrap();
        for member in net.members() {
            for k in -3isize..=3 {
                let v = member.grid_value(k);
                let ratio = v / 0.25;
                assert!((ratio - ratio.round()).abs() < 1e-12);
                assert!(v.abs() <= k.unsigned_abs() as f64 * 0.25 + 1e-12);
            }
        }
    }

    #[test]
    fn a_net_member_is_recovered_with_zero_error() {
        let net = LipschitzNet::new(2, 0.5).unwrap();
        let target = net.member(9);
        // Express the member as a piecewise-linear FuncSpec.
        let breakpoints: Vec<f64> = (-2..=2).map(|k| k as f64 * 0.5).collect();
        let values: Vec<f64> = (-2..=2).map(|k| target.grid_value(k)).collect();
        let f = FuncSpec::PiecewiseLinear {
            breakpoints,
            values,
        }
        .compile()
        .unwrap();
        let (idx, err) = net_approximation(&f, &net).unwrap();
        assert_eq!(idx, 9);
        assert!(err < 1e-14);
    }

    #[test]
    fn halved_identity_and_clipped_abs_are_approximated() {
        let net = LipschitzNet::new(2, 1.0).unwrap();
        let half = FuncSpec::PiecewiseLinear {
            breakpoints: vec![-2.0, 2.0],
            values: vec![-1.0, 1.0],
        }
        .compile()
        .unwrap();
        let (_, err) = net_approximation(&half, &net).unwrap();
        assert!(err <= 1.0 + 1e-12, "error {err}");
        let abs = FuncSpec::PiecewiseLinear {
            breakpoints: vec![-2.0, 0.0, 2.0],
            values: vec![2.0, 0.0, 2.0],
        }
        .compile()
        .unwrap();
        let (_, err) = net_approximation(&abs, &net).unwrap();
        assert!(err < 1e-14, "|x| is itself a member, error {err}");
    }

    #[test]
    fn preconditions_are_enforced() {
        let net = LipschitzNet::new(2, 0.5).unwrap();
        let steep = FuncSpec::PiecewiseLinear {
            breakpoints: vec![0.0, 1.0],
            values: vec![0.0, 2.0],
        }
        .compile()
        .unwrap();
        assert!(matches!(
            net_approximation(&steep, &net),
            Err(CoreError::Domain(_))
        ));
        let offset = FuncSpec::constant(1.0).compile().unwrap();
        assert!(net_approximation(&offset, &net).is_err());
        let poly = FuncSpec::MeixnerPoly {
            degree: 2,
            system: crate::meixner::PolySystemSpec::from_system(
                &crate::meixner::PolySystem::normal(1.0).unwrap(),
            ),
        }
        .compile()
        .unwrap();
        assert!(net_approximation(&poly, &net).is_err());
    }

    #[test]
    fn random_lipschitz_sample_always_within_c() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for &(m, c) in &[(2usize, 0.5f64), (3, 0.25)] {
            let net = LipschitzNet::new(m, c).unwrap();
            for _ in 0..200 {
                let f = random_lipschitz1(&mut rng, m, c).compile().unwrap();
                assert!(f.lipschitz_constant().unwrap() <= 1.0 + 1e-12);
                assert!(f.value_at_zero().abs() < 1e-15);
                let (_, err) = net_approximation(&f, &net).unwrap();
                assert!(err <= c + 1e-12, "m={m} c={c}: error {err}");
            }
        }
    }
}
