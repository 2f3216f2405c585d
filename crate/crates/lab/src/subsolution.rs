//! Caccioppoli-type estimates and the Moser iteration in space and time for
//! nonnegative `Δ_ω`-subsolutions.

use hklab::bounds::ln_c_dn;
use hklab::geometry::{k_iterations, DimensionParams};
use hklab::graph::{VertexFunction, VertexSet};
use hklab::linalg::{integrate, maximize, QUADRATURE_TOLERANCE};
use hklab::{CheckReport, Error, Graph, Metric, Result};

use crate::hypothesis::{gate, Hypothesis};
use crate::norms::{normalized, weighted_sum};
use crate::sample::{SampleKind, SolutionSample};
use crate::statements::{CACCIOPPOLI, PARABOLIC_STEP, POINTWISE_CLAIM, SPACETIME_ITERATION, SUBSOLUTION_MAXIMAL};

/// Absolute slack of the Caccioppoli check (samples are normalized to `sup f = 1`).
pub const CACCIOPPOLI_TOLERANCE: f64 = 1e-8;
/// Relative slack for statements whose sides are time integrals.
pub const INTEGRAL_TOLERANCE: f64 = 1e-7;

/// Roundoff can leave `P_t f` a few ulps below zero; powers need `v ≥ 0`.
pub(crate) fn powered(v: &[f64], p: f64) -> Vec<f64> {
    v.iter().map(|&a| a.max(0.0).powf(p)).collect()
}

fn require_subsolution(sample: &SolutionSample<'_>) -> Result<()> {
    if sample.kind() == SampleKind::Supersolution {
        return Err(Error::Precondition("statement needs a subsolution sample".into()));
    }
    Ok(())
}

/// `Σ_{x∈A} m(x)|∇f|²(x)`.
fn gradient_mass(g: &Graph, set: &VertexSet, f: &[f64], weight: impl Fn(usize) -> f64) -> f64 {
    set.iter().map(|x| g.measure(x) * weight(x) * g.gradient_norm_sq(f, x)).sum()
}

/// Checks `0 ≤ φ ≤ 1_{B∖∂_iB}` with `∂_iB := B ∖ B°`.
pub fn admissible_cutoff(g: &Graph, phi: &VertexFunction<f64>, set: &VertexSet) -> Result<()> {
    let interior = g.combinatorial_interior(set);
    for x in 0..g.len() {
        let v = phi[x];
        if !(0.0..=1.0).contains(&v) || (v > 0.0 && !interior.contains(x)) {
            return Err(Error::Precondition(format!("cut-off violates 0 <= phi <= 1 on the interior of B at vertex {}", g.id(x))));
        }
    }
    Ok(())
}

/// `d/dt‖φv^p‖² + ½‖φ|∇v^p|‖² ≤ 166p²(h(ω) + ‖|∇φ|‖²_∞)‖1_B v^p‖²` at each
/// time, with the exact spectral time derivative.
pub fn check_caccioppoli(
    g: &Graph,
    sample: &SolutionSample<'_>,
    phi: &VertexFunction<f64>,
    set: &VertexSet,
    p: f64,
    times: &[f64],
) -> Result<Vec<CheckReport>> {
    require_subsolution(sample)?;
    if !(p >= 1.0) {
        return Err(Error::Precondition(format!("need p >= 1, got {p}")));
    }
    admissible_cutoff(g, phi, set)?;
    let h = g.h_omega(sample.omega());
    let grad_phi = (0..g.len()).map(|x| g.gradient_norm_sq(phi, x)).fold(0.0, f64::max);
    let constant = 166.0 * p * p * (h + grad_phi);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        sample.require_window(t, t)?;
        let v = sample.value(t);
        let dv = sample.derivative(t);
        let vp = powered(&v, p);
        let v2p1 = powered(&v, 2.0 * p - 1.0);
        let all = VertexSet::full(g.len());
        let dnorm = weighted_sum(g.measures(), &all, |x| phi[x] * phi[x] * 2.0 * p * v2p1[x] * dv[x]);
        let grad = 0.5 * gradient_mass(g, &all, &vp, |x| phi[x] * phi[x]);
        let rhs = constant * weighted_sum(g.measures(), set, |x| vp[x] * vp[x]);
        out.push(CheckReport::linear(
            CACCIOPPOLI,
            format!("{} p={p} t={t} |B|={} h={h:e}", sample.kind().as_str(), set.len()),
            dnorm + grad,
            rhs,
            CACCIOPPOLI_TOLERANCE,
        ));
    }
    Ok(out)
}

/// Both sides of the pointwise claim at one pair: returns
/// `(lower bound, ∇(φ²v^{2p−1}ψ)∇(ψ^{−1}v), scale)`.
pub fn pointwise_claim_sides(psi: (f64, f64), phi: (f64, f64), v: (f64, f64), p: f64) -> (f64, f64, f64) {
    let grad = |f: &dyn Fn(f64, f64, f64) -> f64| f(psi.0, phi.0, v.0) - f(psi.1, phi.1, v.1);
    let av = |f: &dyn Fn(f64, f64, f64) -> f64| 0.5 * (f(psi.0, phi.0, v.0) + f(psi.1, phi.1, v.1));
    let actual = grad(&|s, f, w| f * f * w.powf(2.0 * p - 1.0) * s) * grad(&|s, _, w| w / s);
    let av_phi2 = av(&|_, f, _| f * f);
    let grad_vp = grad(&|_, _, w| w.powf(p));
    let psi_cross = (grad(&|s, _, _| s) * grad(&|s, _, _| 1.0 / s)).abs();
    let grad_phi = grad(&|_, f, _| f);
    let av_v2p = av(&|_, _, w| w.powf(2.0 * p));
    let gain = av_phi2 * grad_vp * grad_vp / (2.0 * p);
    let loss = (6.0 + 160.0 * p) * (psi_cross * av_phi2 + grad_phi * grad_phi) * av_v2p;
    (gain - loss, actual, actual.abs() + gain.abs() + loss.abs())
}

/// The pointwise claim over `pairs`, at time `t` of `sample`, with `ψ = e^ω`.
/// One report with the tightest pair.
pub fn check_pointwise_claim(
    sample: &SolutionSample<'_>,
    phi: &VertexFunction<f64>,
    p: f64,
    t: f64,
    pairs: &[(usize, usize)],
) -> Result<CheckReport> {
    if !(p >= 1.0) {
        return Err(Error::Precondition(format!("need p >= 1, got {p}")));
    }
    sample.require_window(t, t)?;
    let v = sample.value(t);
    let psi = sample.omega().map(f64::exp);
    let triples = pairs.iter().map(|&(x, y)| pointwise_claim_sides((psi[x], psi[y]), (phi[x], phi[y]), (v[x].max(0.0), v[y].max(0.0)), p));
    Ok(tightest(POINTWISE_CLAIM, format!("p={p} t={t} pairs={}", pairs.len()), triples))
}

/// Reduces `(lower, upper, scale)` triples to a report on the tightest one.
pub(crate) fn tightest(statement: &str, instance: String, triples: impl Iterator<Item = (f64, f64, f64)>) -> CheckReport {
    const REL: f64 = 1e-12;
    let mut worst = (f64::INFINITY, 0.0, 0.0, 0.0);
    let mut violations = 0usize;
    let mut count = 0usize;
    for (lo, hi, scale) in triples {
        count += 1;
        let rel = (hi - lo) / scale.max(f64::MIN_POSITIVE);
        if rel < -REL {
            violations += 1;
        }
        if rel < worst.0 {
            worst = (rel, lo, hi, scale);
        }
    }
    if count == 0 {
        return CheckReport::skipped(statement, instance, "no instances");
    }
    CheckReport::linear(statement, instance, worst.1, worst.2, REL * worst.3).with_note(format!("violations={violations} of {count}"))
}

/// Time-window ordering `T1 < T2 < T3`.
fn ordered(times: &[f64]) -> Result<()> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition(format!("times must be strictly increasing, got {times:?}")));
    }
    Ok(())
}

/// `max_{[T2,T3]}‖1_{B(R1)}v^p‖² + ∫_{T2}^{T3}‖1_{B(R1)}|∇v^p|‖²
///  ≤ 332p²(h(ω) + (R2−R1−S)^{−2} + (T2−T1)^{−1}) ∫_{T1}^{T3}‖1_{B(R2)}v^p‖²`.
#[allow(clippy::too_many_arguments)]
pub fn check_maximal_subsolution(
    g: &Graph,
    metric: &Metric,
    sample: &SolutionSample<'_>,
    x: usize,
    radii: (f64, f64),
    times: [f64; 3],
    p: f64,
) -> Result<CheckReport> {
    require_subsolution(sample)?;
    let (r1, r2) = radii;
    let s = metric.jump_size();
    if !(r1 >= 0.0 && r2 - s > r1) {
        return Err(Error::Precondition(format!("need 0 <= R1 < R2 - S, got R1={r1}, R2={r2}, S={s}")));
    }
    if !(p >= 1.0) {
        return Err(Error::Precondition(format!("need p >= 1, got {p}")));
    }
    ordered(&times)?;
    let [t1, t2, t3] = times;
    sample.require_window(t1, t3)?;
    let b1 = metric.ball(x, r1);
    let b2 = metric.ball(x, r2);
    let m = g.measures();
    let energy = |t: f64, set: &VertexSet| {
        let vp = powered(&sample.value(t), p);
        weighted_sum(m, set, |y| vp[y] * vp[y])
    };
    let (_, peak) = maximize(|t| energy(t, &b1), t2, t3);
    let grad = integrate(|t| gradient_mass(g, &b1, &powered(&sample.value(t), p), |_| 1.0), t2, t3, QUADRATURE_TOLERANCE);
    let h = g.h_omega(sample.omega());
    let gap = r2 - r1 - s;
    let constant = 332.0 * p * p * (h + gap.powi(-2) + (t2 - t1).recip());
    let outer = integrate(|t| energy(t, &b2), t1, t3, QUADRATURE_TOLERANCE);
    let lhs = peak + grad;
    let rhs = constant * outer;
    let mut report = CheckReport::linear(
        SUBSOLUTION_MAXIMAL,
        format!("center {} R1={r1} R2={r2} T=({t1},{t2},{t3}) p={p}", g.id(x)),
        lhs,
        rhs,
        INTEGRAL_TOLERANCE * rhs.abs(),
    );
    if lhs > 0.0 && rhs > 1e6 * lhs {
        report = report.with_note("low-information: constant dominates");
    }
    Ok(report)
}

/// The `L^{2pα}`–`L^{2p}` parabolic step under `S(n, R2)`, in log space.
#[allow(clippy::too_many_arguments)]
pub fn check_parabolic_step(
    g: &Graph,
    metric: &Metric,
    sample: &SolutionSample<'_>,
    x: usize,
    radii: [f64; 3],
    times: [f64; 3],
    p: f64,
    n: f64,
    hypothesis: &Hypothesis<'_>,
) -> Result<CheckReport> {
    require_subsolution(sample)?;
    let s = metric.jump_size();
    let [r1, r2, r3] = radii;
    if !(r1 >= 0.0 && r1 < r2 - s && r2 < r3 - s) {
        return Err(Error::Precondition(format!("need 0 <= R1 < R2 - S and R2 < R3 - S, got {radii:?}, S={s}")));
    }
    if !(p >= 1.0 && n > 2.0) {
        return Err(Error::Precondition(format!("need p >= 1 and n > 2, got p={p}, n={n}")));
    }
    ordered(&times)?;
    let [t1, t2, t3] = times;
    sample.require_window(t1, t3)?;
    let constants = hypothesis.resolve(g, x, r2, r2, n)?;
    let alpha = 1.0 + 2.0 / n;
    let (b1, b2, b3) = (metric.ball(x, r1), metric.ball(x, r2), metric.ball(x, r3));
    let m = g.measures();
    let vol = |b: &VertexSet| weighted_sum(m, b, |_| 1.0);
    let (m1, m3) = (normalized(m, &b1), normalized(m, &b3));
    let inner = integrate(
        |t| {
            let w = powered(&sample.value(t), 2.0 * p * alpha);
            weighted_sum(&m1, &b1, |y| w[y])
        },
        t2,
        t3,
        QUADRATURE_TOLERANCE,
    );
    let outer = integrate(
        |t| {
            let w = powered(&sample.value(t), 2.0 * p);
            weighted_sum(&m3, &b3, |y| w[y])
        },
        t1,
        t3,
        QUADRATURE_TOLERANCE,
    );
    let h = g.h_omega(sample.omega());
    let bracket = h + (r3 - r2 - s).powi(-2) + (r2 - r1 - s).powi(-2) + (t2 - t1).recip();
    let ln_c0 = constants.c_s.ln()
        + alpha * 996f64.ln()
        + 2.0 * alpha * p.ln()
        + 2.0 * r2.ln()
        + (vol(&b3) / vol(&b1)).ln()
        + 2.0 / n * (vol(&b3) / vol(&b2)).ln()
        + alpha * (t3 - t1).ln()
        - (t3 - t2).ln()
        + alpha * bracket.ln();
    let lhs = (inner / (t3 - t2)).ln();
    let rhs = ln_c0 + alpha * (outer / (t3 - t1)).ln();
    let report = CheckReport::logarithmic(
        PARABOLIC_STEP,
        format!("center {} R={radii:?} T={times:?} p={p} n={n} C_S={}", g.id(x), constants.c_s),
        lhs,
        rhs,
        INTEGRAL_TOLERANCE,
    );
    Ok(gate(report, &constants))
}

/// The space-time Moser iteration with `K = ⌊√(R/8S) − 2⌋` steps, in log
/// space, under `SV(n, R/2, R)`. The sample must cover `[T − R², T + R²]`.
#[allow(clippy::too_many_arguments)]
pub fn check_spacetime_iteration(
    g: &Graph,
    metric: &Metric,
    sample: &SolutionSample<'_>,
    x: usize,
    r: f64,
    t: f64,
    delta: f64,
    params: &DimensionParams<f64>,
    hypothesis: &Hypothesis<'_>,
) -> Result<CheckReport> {
    require_subsolution(sample)?;
    let s = metric.jump_size();
    let k = k_iterations(r, s)?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Precondition(format!("need delta in (0, 1], got {delta}")));
    }
    sample.require_window(t - r * r, t + r * r)?;
    let (n, d) = (params.n, params.d);
    let constants = hypothesis.resolve(g, x, r / 2.0, r, n)?;
    let alpha = params.alpha();
    let power = alpha.powi(k as i32);
    let half = r / 2.0;
    let (b_half, b_full) = (metric.ball(x, half), metric.ball(x, r));
    let m = g.measures();
    let (m_half, m_full) = (normalized(m, &b_half), normalized(m, &b_full));
    let inner_w = delta * half * half;
    let inner = integrate(
        |tt| {
            let w = powered(&sample.value(tt), 2.0 * power);
            weighted_sum(&m_half, &b_half, |y| w[y])
        },
        t - inner_w,
        t + inner_w,
        QUADRATURE_TOLERANCE,
    );
    let outer_w = delta * r * r;
    let outer = integrate(
        |tt| {
            let w = powered(&sample.value(tt), 2.0);
            weighted_sum(&m_full, &b_full, |y| w[y])
        },
        t - outer_w,
        t + outer_w,
        QUADRATURE_TOLERANCE,
    );
    let h = g.h_omega(sample.omega());
    let e = n / 2.0 + 1.0;
    let lhs = (inner / (2.0 * inner_w)).ln() / power;
    let rhs = ln_c_dn(n, d, constants.c_d, constants.c_s) + e * (1.0 + delta * r * r * h).ln() - e * delta.ln() - 2.0 * r.ln() + outer.ln();
    let report = CheckReport::logarithmic(
        SPACETIME_ITERATION,
        format!("center {} R={r} K={k} T={t} delta={delta}", g.id(x)),
        lhs,
        rhs,
        INTEGRAL_TOLERANCE,
    );
    Ok(gate(report, &constants))
}
