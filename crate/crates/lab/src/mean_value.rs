//! The ℓ²-mean value inequality for nonnegative `Δ_ω`-solutions and its
//! arithmetic pivot.

use hklab::bounds::{ln_c_beta, ln_c_dn};
use hklab::geometry::{kappa_theta, r0, DimensionParams, GeometryProfile};
use hklab::linalg::{integrate, maximize, QUADRATURE_TOLERANCE};
use hklab::{CheckReport, Error, Graph, Metric, Result};

use crate::hypothesis::{gate, Constants, Hypothesis};
use crate::norms::weighted_sum;
use crate::sample::{SampleKind, SolutionSample};
use crate::statements::{MEAN_VALUE, MEAN_VALUE_PIVOT};
use crate::subsolution::INTEGRAL_TOLERANCE;

/// Log of the mean-value constant
/// `C_{d,n,β} Γ(R/2)² (1+τR²h)^{n/2+1} / (τ^{n/2+1} R² m(B(R)))`.
pub fn ln_mean_value_constant(profile: &GeometryProfile<f64>, constants: &Constants, r: f64, tau: f64, h: f64) -> f64 {
    let params = profile.params();
    let e = params.n / 2.0 + 1.0;
    ln_c_beta(params.beta())
        + ln_c_dn(params.n, params.d, constants.c_d, constants.c_s)
        + 2.0 * profile.ln_gamma(r / 2.0)
        + e * (tau * r * r * h).ln_1p()
        - e * tau.ln()
        - 2.0 * r.ln()
        - profile.volume(r).ln()
}

/// Checks `R ≥ R₀` and `τ ∈ (0, 1]`.
pub fn mean_value_preconditions(s: f64, params: &DimensionParams<f64>, r: f64, tau: f64) -> Result<()> {
    let threshold = r0(s, params);
    if !(r >= threshold) {
        return Err(Error::Precondition(format!("the mean-value inequality needs R >= R0 = {threshold}, got {r}")));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::Precondition(format!("need tau in (0, 1], got {tau}")));
    }
    Ok(())
}

/// `sup v²` over `[T ± τR²/8] × B(R/2)` against the mean-value bound, in
/// log space, under `SV(R/2, R)`.
#[allow(clippy::too_many_arguments)]
pub fn check_mv2(
    g: &Graph,
    metric: &Metric,
    sample: &SolutionSample<'_>,
    x: usize,
    r: f64,
    tau: f64,
    t: f64,
    params: &DimensionParams<f64>,
    hypothesis: &Hypothesis<'_>,
) -> Result<CheckReport> {
    if sample.kind() != SampleKind::Solution {
        return Err(Error::Precondition("the mean-value inequality needs a solution sample".into()));
    }
    mean_value_preconditions(metric.jump_size(), params, r, tau)?;
    sample.require_window(t - r * r, t + r * r)?;
    let constants = hypothesis.resolve(g, x, r / 2.0, r, params.n)?;
    let profile = GeometryProfile::new(g, metric, x, *params)?;
    let inner = metric.ball(x, r / 2.0);
    let outer = metric.ball(x, r);
    let half = tau * r * r / 8.0;
    let sup = |tt: f64| {
        let v = sample.value(tt);
        inner.iter().map(|y| v[y].max(0.0).powi(2)).fold(0.0, f64::max)
    };
    let (_, peak) = maximize(sup, t - half, t + half);
    let m = g.measures();
    let w = tau * r * r;
    let integral = integrate(
        |tt| {
            let v = sample.value(tt);
            weighted_sum(m, &outer, |y| v[y] * v[y])
        },
        t - w,
        t + w,
        QUADRATURE_TOLERANCE,
    );
    let h = g.h_omega(sample.omega());
    let rhs = ln_mean_value_constant(&profile, &constants, r, tau, h) + integral.ln();
    let report = CheckReport::logarithmic(
        MEAN_VALUE,
        format!("center {} R={r} tau={tau} T={t} n={} p={}", g.id(x), params.n, params.p),
        peak.ln(),
        rhs,
        INTEGRAL_TOLERANCE,
    );
    Ok(gate(report, &constants))
}

/// `κ(R/2) ln(α/β) ≥ ln q`, i.e. `α^κ ≥ β^κ q`, whenever `R ≥ R₀`.
pub fn check_pivot(s: f64, params: &DimensionParams<f64>, r: f64) -> Result<CheckReport> {
    mean_value_preconditions(s, params, r, 1.0)?;
    let (kappa, _) = kappa_theta(r / 2.0, s, params.beta());
    let lhs = params.q().ln();
    let rhs = kappa as f64 * (params.alpha() / params.beta()).ln();
    Ok(CheckReport::linear(
        MEAN_VALUE_PIVOT,
        format!("n={} p={} R={r} S={s} kappa={kappa}", params.n, params.p),
        lhs,
        rhs,
        1e-12 * lhs.abs().max(1.0),
    ))
}

/// The pivot over a grid of `n`, `p` and radii `R ∈ R₀·multipliers`.
pub fn pivot_grid(s: f64, ns: &[f64], ps: &[hklab::geometry::Exponent<f64>], multipliers: &[f64]) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &n in ns {
        for &p in ps {
            let params = DimensionParams::new(n, 1.0, p)?;
            let base = r0(s, &params);
            for &k in multipliers {
                out.push(check_pivot(s, &params, base * k)?);
            }
        }
    }
    Ok(out)
}
