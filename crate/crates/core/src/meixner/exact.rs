//! Exact-rational reference computations for the recurrence coefficients.
//!
//! Everything here runs in `BigRational` arithmetic, so equality checks
//! against the closed-form coefficients are exact, not approximate. The
//! reference path is deliberately independent of the closed forms: it
//! computes raw moments of Ψ_λ from first principles (Stirling-number
//! expansions, rising factorials, cumulant recursions) and then runs the
//! Stieltjes procedure — Gram–Schmidt on the moment functional — to recover
//! α_n and β_n.
//!
//! Rational moments exist for every family when λ (and γ for Pascal) is
//! rational; the Meixner-CH family is covered in its symmetric case a = 0,
//! where tan(a/2) = 0 keeps the cumulants rational.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::meixner::Family;

/// Exact rational scalar.
pub type Rat = BigRational;

/// Small helper: the rational p/q.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Stirling numbers of the second kind S(n, k) for n, k ≤ `order`, via
/// S(n, k) = k·S(n−1, k) + S(n−1, k−1).
fn stirling2_table(order: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); order + 1]; order + 1];
    s[0][0] = BigInt::one();
    for n in 1..=order {
        for k in 1..=n {
            let t = &s[n - 1][k] * BigInt::from(k as u64) + &s[n - 1][k - 1];
            s[n][k] = t;
        }
    }
    s
}

/// Rising factorial λ(λ+1)⋯(λ+j−1).
fn rising(lambda: &Rat, j: usize) -> Rat {
    let mut r = Rat::one();
    for t in 0..j {
        r *= lambda + Rat::from_integer(BigInt::from(t as u64));
    }
    r
}

/// Raw moments m_0..=m_order of Ψ_λ, exactly.
///
/// `fixed` is the family's fixed parameter (γ for Pascal; must be 0 for
/// Meixner-CH — the skewed case has irrational moments; ignored elsewhere).
pub fn moments(family: Family, lambda: &Rat, fixed: &Rat, order: usize) -> Result<Vec<Rat>> {
    if lambda <= &Rat::zero() {
        return Err(CoreError::Parameter("exact moments require lambda > 0".into()));
    }
    let mut m = vec![Rat::zero(); order + 1];
    m[0] = Rat::one();
    match family {
        Family::Normal => {
            // m_{2j} = (2j−1)!!·λ^j, odd moments vanish.
            for k in (2..=order).step_by(2) {
                let j = k / 2;
                let mut dfact = BigInt::one();
                let mut i = 1u64;
                while i + 1 <= k as u64 {
                    // product of odd numbers 1·3·5⋯(2j−1)
                    dfact *= BigInt::from(i);
                    i += 2;
                }
                m[k] = Rat::from_integer(dfact) * pow_rat(lambda, j);
            }
        }
        Family::Gamma => {
            for k in 1..=order {
                m[k] = rising(lambda, k);
            }
        }
        Family::Poisson => {
            let s = stirling2_table(order);
            for k in 1..=order {
                let mut acc = Rat::zero();
                for j in 1..=k {
                    acc += Rat::from_integer(s[k][j].clone()) * pow_rat(lambda, j);
                }
                m[k] = acc;
            }
        }
        Family::Pascal => {
            if fixed <= &Rat::zero() || fixed >= &Rat::one() {
                return Err(CoreError::Parameter(
                    "exact pascal moments require gamma in (0,1)".into(),
                ));
            }
            // E[X(X−1)⋯(X−j+1)] = λ^{(j)}·(γ/(1−γ))^j, then x^k = Σ S(k,j)·(x)_j.
            let theta = fixed / (Rat::one() - fixed);
            let s = stirling2_table(order);
            for k in 1..=order {
                let mut acc = Rat::zero();
                for j in 1..=k {
                    acc += Rat::from_integer(s[k][j].clone()) * rising(lambda, j) * pow_rat(&theta, j);
                }
                m[k] = acc;
            }
        }
        Family::MeixnerCh => {
            if !fixed.is_zero() {
                return Err(CoreError::Parameter(
                    "exact meixner_ch moments are only rational in the symmetric case a = 0".into(),
                ));
            }
            // Cumulants: κ_r = λ·c_r(0) with c_1(T) = T and
            // c_{r+1} = c_r'(T)·(1 + T²)/2, evaluated at T = tan(a/2) = 0.
            let mut c: Vec<Rat> = vec![Rat::zero(), Rat::one()]; // polynomial c_1(T) = T
            let mut kappa = vec![Rat::zero(); order + 1]; // kappa[r] = κ_r / λ
            if order >= 1 {
                kappa[1] = c[0].clone();
            }
            for r in 2..=order {
                c = next_cumulant_poly(&c);
                kappa[r] = c[0].clone();
            }
            // Moments from cumulants: m_n = Σ_{k=0}^{n−1} C(n−1, k)·κ_{k+1}·m_{n−1−k}.
            let binom = binom_table(order);
            for n in 1..=order {
                let mut acc = Rat::zero();
                for k in 0..n {
                    let kap = &kappa[k + 1] * lambda;
                    acc += Rat::from_integer(binom[n - 1][k].clone()) * kap * m[n - 1 - k].clone();
                }
                m[n] = acc;
            }
        }
    }
    Ok(m)
}

/// c_{r+1}(T) = c_r'(T)·(1 + T²)/2 on coefficient vectors.
fn next_cumulant_poly(c: &[Rat]) -> Vec<Rat> {
    // derivative
    let mut d = vec![Rat::zero(); c.len().max(2) - 1];
    for (j, coeff) in c.iter().enumerate().skip(1) {
        d[j - 1] = coeff * Rat::from_integer(BigInt::from(j as u64));
    }
    // multiply by (1 + T²)/2
    let mut out = vec![Rat::zero(); d.len() + 2];
    let half = rat(1, 2);
    for (j, coeff) in d.iter().enumerate() {
        out[j] += coeff * &half;
        out[j + 2] += coeff * &half;
    }
    out
}

fn binom_table(n: usize) -> Vec<Vec<BigInt>> {
    let mut b = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for i in 0..=n {
        b[i][0] = BigInt::one();
        for j in 1..=i {
            let t = &b[i - 1][j] + &b[i - 1][j - 1];
            b[i][j] = t;
        }
    }
    b
}

fn pow_rat(x: &Rat, n: usize) -> Rat {
    let mut r = Rat::one();
    for _ in 0..n {
        r *= x;
    }
    r
}

/// The Stieltjes procedure: monic orthogonal polynomials from raw moments.
///
/// Given m_0..m_{2N+1}, builds q_0..q_N by q_{n+1} = (x − α_n)q_n − β_n q_{n−1}
/// with α_n = L[x·q_n²]/L[q_n²] and β_n = L[q_n²]/L[q_{n−1}²], where L is the
/// moment functional. Returns (α_0..α_N, β_1..β_N); requires the moment list
/// to have odd length ≥ 3 (so N = (len − 2)/2 ≥ 0 is well defined).
pub fn stieltjes(moments: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    assert!(moments.len() >= 2, "need at least m_0, m_1");
    let n_max = (moments.len() - 2) / 2;
    let l = |p: &[Rat]| -> Rat {
        p.iter()
            .enumerate()
            .map(|(j, c)| c * moments[j].clone())
            .fold(Rat::zero(), |a, b| a + b)
    };
    let mul = |p: &[Rat], q: &[Rat]| -> Vec<Rat> {
        let mut r = vec![Rat::zero(); p.len() + q.len() - 1];
        for (i, a) in p.iter().enumerate() {
            for (j, b) in q.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        r
    };
    let mut alphas = Vec::with_capacity(n_max + 1);
    let mut betas = Vec::with_capacity(n_max);
    let mut q_prev: Vec<Rat> = vec![];
    let mut q: Vec<Rat> = vec![Rat::one()];
    let mut norm_prev = Rat::zero();
    for n in 0..=n_max {
        let qq = mul(&q, &q);
        let norm = l(&qq);
        let mut xqq = vec![Rat::zero(); qq.len() + 1];
        for (j, c) in qq.iter().enumerate() {
            xqq[j + 1] = c.clone();
        }
        let alpha = l(&xqq) / norm.clone();
        alphas.push(alpha.clone());
        if n >= 1 {
            betas.push(norm.clone() / norm_prev.clone());
        }
        // q_{n+1} = (x − α)q − β·q_prev
        let mut next = vec![Rat::zero(); q.len() + 1];
        for (j, c) in q.iter().enumerate() {
            next[j + 1] += c.clone();
            next[j] -= &alpha * c;
        }
        if n >= 1 {
            let beta = betas.last().unwrap().clone();
            for (j, c) in q_prev.iter().enumerate() {
                next[j] -= &beta * c;
            }
        }
        q_prev = q;
        q = next;
        norm_prev = norm;
    }
    (alphas, betas)
}

/// The closed-form recurrence coefficients in exact arithmetic
/// (α_0..α_{n_max}, β_1..β_{n_max}), mirroring the f64 implementation. The
/// Meixner-CH case is restricted to a = 0, matching [`moments`].
pub fn closed_form_coeffs(
    family: Family,
    lambda: &Rat,
    fixed: &Rat,
    n_max: usize,
) -> Result<(Vec<Rat>, Vec<Rat>)> {
    let n_rat = |n: usize| Rat::from_integer(BigInt::from(n as u64));
    let alpha: Vec<Rat>;
    let beta: Vec<Rat>;
    match family {
        Family::Normal => {
            alpha = (0..=n_max).map(|_| Rat::zero()).collect();
            beta = (1..=n_max).map(|n| n_rat(n) * lambda).collect();
        }
        Family::Gamma => {
            alpha = (0..=n_max).map(|n| rat(2, 1) * n_rat(n) + lambda).collect();
            beta = (1..=n_max)
                .map(|n| n_rat(n) * (n_rat(n) + lambda - Rat::one()))
                .collect();
        }
        Family::Poisson => {
            alpha = (0..=n_max).map(|n| n_rat(n) + lambda).collect();
            beta = (1..=n_max).map(|n| n_rat(n) * lambda).collect();
        }
        Family::Pascal => {
            let g = fixed;
            let om = Rat::one() - g;
            alpha = (0..=n_max)
                .map(|n| (n_rat(n) * (Rat::one() + g) + lambda * g) / om.clone())
                .collect();
            beta = (1..=n_max)
                .map(|n| g * n_rat(n) * (n_rat(n) + lambda - Rat::one()) / (om.clone() * om.clone()))
                .collect();
        }
        Family::MeixnerCh => {
            if !fixed.is_zero() {
                return Err(CoreError::Parameter(
                    "exact meixner_ch closed forms are provided for a = 0 only".into(),
                ));
            }
            alpha = (0..=n_max).map(|_| Rat::zero()).collect();
            beta = (1..=n_max)
                .map(|n| n_rat(n) * (n_rat(n) + rat(2, 1) * lambda - Rat::one()) / rat(4, 1))
                .collect();
        }
    }
    Ok((alpha, beta))
}

/// Convenience: f64 view of a rational (for bridging tests).
pub fn to_f64(x: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().expect("rational out of f64 range")
}
