//! Moser iteration in time for nonnegative `Δ_ω`-supersolutions on a fixed
//! finite measure space `(B, μ)`.
//!
//! `μ` is any positive weight on the vertices of `B`; the degree function is
//! always the graph's `Deg = deg/m`. Norms are taken in `ℓ^p(B, μ)`.

use hklab::bounds::ln_c_beta;
use hklab::geometry::Exponent;
use hklab::graph::VertexSet;
use hklab::linalg::{integrate, maximize, QUADRATURE_TOLERANCE};
use hklab::{CheckReport, Error, Graph, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::norms::{conjugate, lp_norm, weighted_sum};
use crate::sample::{SampleKind, SolutionSample};
use crate::statements::{INTERPOLATION, SUPERSOLUTION_MAXIMAL, TIME_ITERATION, TIME_ITERATION_STEP};
use crate::subsolution::{powered, tightest, INTEGRAL_TOLERANCE};

/// A finite measure space `(B, μ)` carved out of a graph.
#[derive(Clone, Debug)]
pub struct MeasureSpace<'a> {
    pub set: &'a VertexSet,
    pub mu: &'a [f64],
}

impl MeasureSpace<'_> {
    fn validate(&self) -> Result<()> {
        if self.set.is_empty() {
            return Err(Error::Precondition("measure space must be nonempty".into()));
        }
        if self.set.iter().any(|x| !(self.mu[x] > 0.0)) {
            return Err(Error::Precondition("measure must be positive on B".into()));
        }
        Ok(())
    }

    pub fn mass(&self) -> f64 {
        weighted_sum(self.mu, self.set, |_| 1.0)
    }

    /// `μ(B)^{1/p}`, equal to 1 for `p = ∞`.
    pub fn mass_root(&self, p: Exponent<f64>) -> f64 {
        self.mass().powf(p.reciprocal())
    }

    pub fn norm(&self, p: Exponent<f64>, f: impl Fn(usize) -> f64) -> f64 {
        lp_norm(self.mu, self.set, p, f)
    }

    /// `‖μ^{−1}‖_p`.
    pub fn inverse_norm(&self, p: Exponent<f64>) -> f64 {
        self.norm(p, |x| self.mu[x].recip())
    }
}

fn require_supersolution(sample: &SolutionSample<'_>) -> Result<()> {
    if sample.kind() == SampleKind::Subsolution {
        return Err(Error::Precondition("statement needs a supersolution sample".into()));
    }
    Ok(())
}

fn require_times(times: &[f64; 4]) -> Result<()> {
    let [t1, t2, t3, t4] = *times;
    if !(t1 <= t2 && t2 <= t3 && t3 < t4) {
        return Err(Error::Precondition(format!("need T1 <= T2 <= T3 < T4, got {times:?}")));
    }
    Ok(())
}

/// `p ∈ (1, ∞]` and `β ∈ (1, 1 + 1/q)`.
pub fn check_beta(p: Exponent<f64>, beta: f64) -> Result<()> {
    if let Exponent::Finite(p) = p {
        if !(p > 1.0) {
            return Err(Error::Precondition(format!("need p in (1, inf], got {p}")));
        }
    }
    let q = p.conjugate();
    if !(beta > 1.0 && beta < 1.0 + 1.0 / q) {
        return Err(Error::Precondition(format!("need beta in (1, {}), got {beta}", 1.0 + 1.0 / q)));
    }
    Ok(())
}

/// `‖v‖_∞ ≤ ‖μ^{−1}‖_p ‖v‖_q` on `(B, μ)`, `p ∈ [1, ∞]`.
pub fn interpolation_sides(space: &MeasureSpace<'_>, v: &[f64], p: Exponent<f64>) -> (f64, f64) {
    let sup = space.norm(Exponent::Infinite, |x| v[x]);
    let rhs = space.inverse_norm(p) * space.norm(conjugate(p), |x| v[x]);
    (sup, rhs)
}

pub fn check_interpolation(space: &MeasureSpace<'_>, v: &[f64], p: Exponent<f64>) -> Result<CheckReport> {
    space.validate()?;
    let (lhs, rhs) = interpolation_sides(space, v, p);
    Ok(CheckReport::linear(INTERPOLATION, format!("|B|={} p={p}", space.set.len()), lhs, rhs, 1e-12 * rhs.abs()))
}

/// `count` random `(μ, v, p)` draws on spaces of 1 to 12 points; one report
/// with the tightest draw.
pub fn random_interpolation(count: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples = (0..count).map(|_| {
        let n = rng.random_range(1..=12);
        let mu: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-3.0..3.0))).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let p = match rng.random_range(0..4) {
            0 => Exponent::Infinite,
            1 => Exponent::Finite(1.0),
            _ => Exponent::Finite(1.0 + 10f64.powf(rng.random_range(-2.0..1.5))),
        };
        let set = VertexSet::full(n);
        let (lhs, rhs) = interpolation_sides(&MeasureSpace { set: &set, mu: &mu }, &v, p);
        (lhs, rhs, rhs.abs())
    });
    tightest(INTERPOLATION, format!("random draws={count}"), triples).with_seed(seed)
}

/// `max_{[T2,T3]}‖v^s‖₁ ≤ (μ(B)^{1/p}/(T4−T3) + s‖Deg‖_p) ∫_{T1}^{T4}‖v^s‖_q`.
pub fn check_supersolution_maximal(
    g: &Graph,
    sample: &SolutionSample<'_>,
    space: &MeasureSpace<'_>,
    times: [f64; 4],
    s: f64,
    p: Exponent<f64>,
) -> Result<CheckReport> {
    require_supersolution(sample)?;
    space.validate()?;
    require_times(&times)?;
    if !(s >= 1.0) {
        return Err(Error::Precondition(format!("need s >= 1, got {s}")));
    }
    let [t1, t2, t3, t4] = times;
    sample.require_window(t1, t4)?;
    let q = conjugate(p);
    let deg = g.weighted_degrees();
    let one_norm = |t: f64| {
        let w = powered(&sample.value(t), s);
        space.norm(Exponent::Finite(1.0), |x| w[x])
    };
    let (_, lhs) = maximize(one_norm, t2, t3);
    let q_norm = |t: f64| {
        let w = powered(&sample.value(t), s);
        space.norm(q, |x| w[x])
    };
    let integral = integrate(q_norm, t1, t4, QUADRATURE_TOLERANCE);
    let factor = space.mass_root(p) / (t4 - t3) + s * space.norm(p, |x| deg[x]);
    let rhs = factor * integral;
    Ok(CheckReport::linear(
        SUPERSOLUTION_MAXIMAL,
        format!("{} |B|={} T={times:?} s={s} p={p}", sample.kind().as_str(), space.set.len()),
        lhs,
        rhs,
        INTEGRAL_TOLERANCE * rhs.abs(),
    ))
}

/// The single β-step of the time iteration, in log space.
#[allow(clippy::too_many_arguments)]
pub fn check_time_iteration_step(
    g: &Graph,
    sample: &SolutionSample<'_>,
    space: &MeasureSpace<'_>,
    times: [f64; 4],
    s: f64,
    p: Exponent<f64>,
    beta: f64,
) -> Result<CheckReport> {
    require_supersolution(sample)?;
    space.validate()?;
    require_times(&times)?;
    check_beta(p, beta)?;
    if !(s >= 1.0) {
        return Err(Error::Precondition(format!("need s >= 1, got {s}")));
    }
    let [t1, t2, t3, t4] = times;
    sample.require_window(t1, t4)?;
    let q_exp = conjugate(p);
    let q = p.conjugate();
    let deg = g.weighted_degrees();
    let integral = |power: f64, a: f64, b: f64| {
        integrate(
            |t| {
                let w = powered(&sample.value(t), power);
                space.norm(q_exp, |x| w[x])
            },
            a,
            b,
            QUADRATURE_TOLERANCE,
        )
    };
    let lhs = integral(s * beta, t2, t3).ln();
    let bracket = s * (space.mass_root(p).max(1.0) / (t4 - t3) + space.norm(p, |x| deg[x])) * space.inverse_norm(p).powf(q);
    let rhs = (beta - 1.0) * bracket.ln() + beta * integral(s, t1, t4).ln();
    Ok(CheckReport::logarithmic(
        TIME_ITERATION_STEP,
        format!("|B|={} T={times:?} s={s} p={p} beta={beta}", space.set.len()),
        lhs,
        rhs,
        INTEGRAL_TOLERANCE,
    ))
}

/// `ln G = ln C_β + β^{−k} ln[(1∨μ(B)^{1/p} + δT‖Deg‖_p)‖μ^{−1}‖_p^q]`.
#[allow(clippy::too_many_arguments)]
pub fn ln_time_iteration_g(mass_root: f64, deg_norm: f64, inverse_norm: f64, q: f64, delta: f64, t: f64, beta: f64, k: u32) -> f64 {
    let inner = (mass_root.max(1.0) + delta * t * deg_norm) * inverse_norm.powf(q);
    ln_c_beta(beta) + beta.powi(-(k as i32)) * inner.ln()
}

/// The iterated sup bound over `[(1−δ/2)T, (1+δ/2)T] × B`, in log space.
#[allow(clippy::too_many_arguments)]
pub fn check_time_iteration(
    g: &Graph,
    sample: &SolutionSample<'_>,
    space: &MeasureSpace<'_>,
    delta: f64,
    t: f64,
    p: Exponent<f64>,
    beta: f64,
    k: u32,
) -> Result<CheckReport> {
    require_supersolution(sample)?;
    space.validate()?;
    check_beta(p, beta)?;
    if !(delta > 0.0 && t > 0.0 && delta <= 1.0) {
        return Err(Error::Precondition(format!("need delta in (0, 1] and T > 0, got delta={delta}, T={t}")));
    }
    sample.require_window((1.0 - delta) * t, (1.0 + delta) * t)?;
    let q = p.conjugate();
    let deg = g.weighted_degrees();
    let sup = |tt: f64| {
        let v = sample.value(tt);
        space.set.iter().map(|x| v[x].max(0.0).powi(2)).fold(0.0, f64::max)
    };
    let (_, peak) = maximize(sup, (1.0 - delta / 2.0) * t, (1.0 + delta / 2.0) * t);
    let power = 2.0 * beta.powi(k as i32) * q;
    let integral = integrate(
        |tt| {
            let w = powered(&sample.value(tt), power);
            weighted_sum(space.mu, space.set, |x| w[x])
        },
        (1.0 - delta) * t,
        (1.0 + delta) * t,
        QUADRATURE_TOLERANCE,
    );
    let ln_g = ln_time_iteration_g(space.mass_root(p), space.norm(p, |x| deg[x]), space.inverse_norm(p), q, delta, t, beta, k);
    let rhs = ln_g + 2.0 / power * (integral / (2.0 * delta * t)).ln();
    Ok(CheckReport::logarithmic(
        TIME_ITERATION,
        format!("|B|={} delta={delta} T={t} p={p} beta={beta} k={k}", space.set.len()),
        peak.ln(),
        rhs,
        INTEGRAL_TOLERANCE,
    ))
}
