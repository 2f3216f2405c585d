//! Test objects for the sub- and supersolution lemmas.
//!
//! Every sample is built from an exact solution `w_t = P^ω_{t+s} f` with
//! `f ≥ 0`, so values and time derivatives are spectral and exact:
//!
//! * solution: `v_t = w_t`;
//! * subsolution: `v_t = e^{−c(t−t₀)} w_t` with `c ≥ 0`, since
//!   `(∂_t + Δ_ω) v = −c v ≤ 0`;
//! * supersolution: `v_t = w_t + r (t − t₀) e^ω 1_active` with `r ≥ 0`, since
//!   `(∂_t + Δ_ω)` of the ramp is `r e^ω (1 + (t − t₀) Δ1_active) ≥ 0`.
//!
//! [`SolutionSample::audit`] re-checks the defining inequality by a centered
//! finite difference before any lemma consumes the sample.

use hklab::graph::{VertexFunction, VertexSet};
use hklab::semigroup::{fd_step, Evolution, HeatSystem};
use hklab::{CheckReport, Error, Graph, Result};
use serde::Serialize;

/// Tolerance of the finite-difference audit, relative to the sample scale.
pub const AUDIT_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Solution,
    Subsolution,
    Supersolution,
}

impl SampleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleKind::Solution => "solution",
            SampleKind::Subsolution => "subsolution",
            SampleKind::Supersolution => "supersolution",
        }
    }
}

/// How a sample deviates from the underlying exact solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Recipe {
    Exact,
    /// `e^{−c(t−t₀)}` damping, `c ≥ 0`.
    Damped {
        rate: f64,
    },
    /// `r (t − t₀) e^ω` on active vertices, `r ≥ 0`.
    Ramp {
        slope: f64,
    },
}

pub struct SolutionSample<'a> {
    kind: SampleKind,
    recipe: Recipe,
    evolution: Evolution<'a, f64>,
    omega: VertexFunction<f64>,
    shift: f64,
    interval: (f64, f64),
    ramp_profile: Vec<f64>,
}

impl<'a> SolutionSample<'a> {
    /// `v_t` built from `P^ω_{t+shift} f` on `interval = [t₀, t₁]`.
    /// Requires `f ≥ 0` and `t₀ + shift ≥ 0`.
    pub fn new(
        hs: &'a HeatSystem<f64>,
        omega: &VertexFunction<f64>,
        f: &VertexFunction<f64>,
        shift: f64,
        interval: (f64, f64),
        recipe: Recipe,
    ) -> Result<Self> {
        if f.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::Precondition("initial datum must be nonnegative".into()));
        }
        let (t0, t1) = interval;
        if !(t1 > t0) || !(t0 + shift >= 0.0) {
            return Err(Error::Precondition(format!("sample interval [{t0}, {t1}] with shift {shift} reaches negative times")));
        }
        let kind = match recipe {
            Recipe::Exact => SampleKind::Solution,
            Recipe::Damped { rate } if rate >= 0.0 => SampleKind::Subsolution,
            Recipe::Ramp { slope } if slope >= 0.0 => SampleKind::Supersolution,
            _ => return Err(Error::Precondition("damping rate and ramp slope must be nonnegative".into())),
        };
        let mut active = vec![0.0; hs.len()];
        for &x in hs.active() {
            active[x] = omega[x].exp();
        }
        Ok(SolutionSample {
            kind,
            recipe,
            evolution: hs.evolution(Some(omega), f)?,
            omega: omega.clone(),
            shift,
            interval,
            ramp_profile: active,
        })
    }

    pub fn kind(&self) -> SampleKind {
        self.kind
    }

    pub fn recipe(&self) -> Recipe {
        self.recipe
    }

    pub fn omega(&self) -> &VertexFunction<f64> {
        &self.omega
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn system(&self) -> &'a HeatSystem<f64> {
        self.evolution.system()
    }

    /// Fails unless `[a, b]` lies inside the sample interval.
    pub fn require_window(&self, a: f64, b: f64) -> Result<()> {
        let (t0, t1) = self.interval;
        if a < t0 || b > t1 {
            return Err(Error::Precondition(format!("time window [{a}, {b}] leaves the sample interval [{t0}, {t1}]")));
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> VertexFunction<f64> {
        let w = self.evolution.at(t + self.shift);
        let s = t - self.interval.0;
        match self.recipe {
            Recipe::Exact => w,
            Recipe::Damped { rate } => w.scale((-rate * s).exp()),
            Recipe::Ramp { slope } => VertexFunction::from_fn(w.len(), |x| w[x] + slope * s * self.ramp_profile[x]),
        }
    }

    /// Exact `∂_t v_t`.
    pub fn derivative(&self, t: f64) -> VertexFunction<f64> {
        let w = self.evolution.at(t + self.shift);
        let dw = self.evolution.derivative(t + self.shift);
        let s = t - self.interval.0;
        match self.recipe {
            Recipe::Exact => dw,
            Recipe::Damped { rate } => {
                let e = (-rate * s).exp();
                VertexFunction::from_fn(w.len(), |x| e * (dw[x] - rate * w[x]))
            }
            Recipe::Ramp { slope } => VertexFunction::from_fn(w.len(), |x| dw[x] + slope * self.ramp_profile[x]),
        }
    }

    /// Signed defect `(∂_t + Δ_ω) v_t` from a second-order difference in
    /// time: centered where `t − h` is still a valid time of the underlying
    /// solution, one-sided three-point otherwise.
    fn fd_defect(&self, g: &Graph, t: f64) -> VertexFunction<f64> {
        let h = fd_step(t);
        let v = self.value(t);
        let dt: VertexFunction<f64> = if t - h + self.shift >= 0.0 {
            let (plus, minus) = (self.value(t + h), self.value(t - h));
            VertexFunction::from_fn(g.len(), |x| (plus[x] - minus[x]) / (2.0 * h))
        } else {
            let (a, b) = (self.value(t + h), self.value(t + 2.0 * h));
            VertexFunction::from_fn(g.len(), |x| (-3.0 * v[x] + 4.0 * a[x] - b[x]) / (2.0 * h))
        };
        let gen = g.sandwiched_apply(&self.omega, &g.zero_extend(&v));
        VertexFunction::from_fn(g.len(), |x| dt[x] + gen[x])
    }

    /// Checks the defining inequality on `domain` at `points` equispaced times,
    /// together with `v ≥ 0`. The margin is the worst signed violation.
    pub fn audit(&self, g: &Graph, domain: &VertexSet, points: usize) -> CheckReport {
        let (t0, t1) = self.interval;
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        let mut negative = 0.0f64;
        for k in 0..points.max(2) {
            let t = t0 + (t1 - t0) * k as f64 / (points.max(2) - 1) as f64;
            let v = self.value(t);
            let dv = self.derivative(t);
            let defect = self.fd_defect(g, t);
            for x in domain.iter() {
                if g.is_dirichlet(x) {
                    continue;
                }
                scale = scale.max(v[x].abs()).max(dv[x].abs());
                negative = negative.min(v[x]);
                let violation = match self.kind {
                    SampleKind::Solution => defect[x].abs(),
                    SampleKind::Subsolution => defect[x],
                    SampleKind::Supersolution => -defect[x],
                };
                worst = worst.max(violation);
            }
        }
        let tol = AUDIT_TOLERANCE * scale.max(1e-300);
        CheckReport::linear(
            "sample-audit",
            format!("{} on {} vertices, t in [{t0}, {t1}]", self.kind.as_str(), domain.len()),
            worst.max(-negative),
            0.0,
            tol,
        )
    }
}
