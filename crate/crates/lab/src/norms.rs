//! Weighted sums and norms over vertex subsets.

use hklab::geometry::Exponent;
use hklab::graph::VertexSet;

/// `Σ_{x∈A} μ(x) f(x)`.
pub fn weighted_sum(mu: &[f64], set: &VertexSet, f: impl Fn(usize) -> f64) -> f64 {
    set.iter().map(|x| mu[x] * f(x)).sum()
}

/// `(Σ_A μ |f|^p)^{1/p}`, or `sup_A |f|` for `p = ∞`.
pub fn lp_norm(mu: &[f64], set: &VertexSet, p: Exponent<f64>, f: impl Fn(usize) -> f64) -> f64 {
    match p {
        Exponent::Infinite => set.iter().map(|x| f(x).abs()).fold(0.0, f64::max),
        Exponent::Finite(p) => weighted_sum(mu, set, |x| f(x).abs().powf(p)).powf(1.0 / p),
    }
}

/// Hölder conjugate of `p ∈ [1, ∞]`; `p = 1` maps to `∞`.
pub fn conjugate(p: Exponent<f64>) -> Exponent<f64> {
    match p {
        Exponent::Infinite => Exponent::Finite(1.0),
        Exponent::Finite(1.0) => Exponent::Infinite,
        Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
    }
}

/// `a^k − b^k` for `a, b ≥ 0`, `k > 0`, accurate to full relative precision
/// even when `a ≈ b` (naive subtraction cancels there).
pub fn pow_diff(a: f64, b: f64, k: f64) -> f64 {
    if b == 0.0 {
        return a.powf(k);
    }
    if a == 0.0 {
        return -b.powf(k);
    }
    b.powf(k) * (k * ((a - b) / b).ln_1p()).exp_m1()
}

/// `m_A = m / m(A)`.
pub fn normalized(mu: &[f64], set: &VertexSet) -> Vec<f64> {
    let mass = weighted_sum(mu, set, |_| 1.0);
    mu.iter().map(|&m| m / mass).collect()
}
