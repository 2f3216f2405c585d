//! Lower estimates of the Sobolev constant on balls and the combined
//! Sobolev/doubling certificate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::doubling::doubling_constant;
use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::linalg::EnvelopeCholesky;
use crate::metric::IntrinsicMetric;
use crate::scalar::Real;

/// Ascent stops once `‖∇F‖·‖u‖` drops below this.
pub const ASCENT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SobolevBudget {
    /// Random starts on top of the deterministic candidates.
    pub starts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SobolevBudget {
    fn default() -> Self {
        SobolevBudget { starts: 4, max_iters: 4000, seed: 0x5eed }
    }
}

/// Best Sobolev ratio found at one radius, with the function attaining it.
#[derive(Clone, Debug, Serialize)]
pub struct SobolevEstimate {
    pub radius: f64,
    pub c_s: f64,
    pub converged: bool,
    pub source: String,
    pub interior_size: usize,
    pub certificate: Vec<f64>,
}

/// `(m(B)^{2/n}/R²)·‖u‖²_{2n/(n−2)} / (‖|∇u|‖² + R^{−2}‖u‖²)`, evaluated from
/// the graph directly; `u` must be supported in `B(R)°`.
pub fn sobolev_ratio<T: Real>(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, x: usize, r: T, n: T, u: &[T]) -> Result<T> {
    let ball = metric.ball(x, r);
    let interior = g.combinatorial_interior(&ball);
    if u.len() != g.len() {
        return Err(Error::Precondition("certificate length does not match the graph".into()));
    }
    if let Some(y) = (0..g.len()).find(|&y| u[y] != T::zero() && !interior.contains(y)) {
        return Err(Error::Precondition(format!("certificate is nonzero at {} outside B(R)°", g.id(y))));
    }
    let s = T::of(2.0) * n / (n - T::of(2.0));
    let norm_s: T = (0..g.len()).map(|y| g.measure(y) * u[y].abs().powf(s)).sum::<T>().powf(T::of(2.0) / s);
    let norm_2: T = g.inner(u, u);
    if norm_2 == T::zero() {
        return Err(Error::Precondition("certificate vanishes identically".into()));
    }
    let vol: T = ball.iter().map(|y| g.measure(y)).sum();
    let r2 = r * r;
    Ok(vol.powf(T::of(2.0) / n) / r2 * norm_s / (g.gradient_energy(u) + norm_2 / r2))
}

/// Restriction of `2(diag(deg) − b) + R^{−2} diag(m)` to `B(R)°`.
struct Energy<T> {
    verts: Vec<usize>,
    mass: Vec<T>,
    diag: Vec<T>,
    off: Vec<Vec<(usize, T)>>,
    chol: EnvelopeCholesky<T>,
    s: T,
}

impl<T: Real> Energy<T> {
    fn new(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, x: usize, interior: &VertexSet, r: T, s: T) -> Result<Self> {
        let verts: Vec<usize> = metric.sorted_from(x).into_iter().map(|(_, y)| y).filter(|&y| interior.contains(y)).collect();
        let mut pos = vec![usize::MAX; g.len()];
        for (i, &y) in verts.iter().enumerate() {
            pos[y] = i;
        }
        let r2 = r * r;
        let two = T::of(2.0);
        let mass: Vec<T> = verts.iter().map(|&y| g.measure(y)).collect();
        let diag: Vec<T> = verts.iter().map(|&y| two * g.degrees()[y] + g.measure(y) / r2).collect();
        let off: Vec<Vec<(usize, T)>> = verts
            .iter()
            .map(|&y| g.neighbors(y).iter().filter(|&&(z, _)| pos[z] != usize::MAX).map(|&(z, b)| (pos[z], -two * b)).collect())
            .collect();
        let lower: Vec<Vec<(usize, T)>> = (0..verts.len())
            .map(|i| {
                let mut row: Vec<(usize, T)> = off[i].iter().copied().filter(|&(j, _)| j < i).collect();
                row.push((i, diag[i]));
                row
            })
            .collect();
        let chol = EnvelopeCholesky::factor(&lower)?;
        Ok(Energy { verts, mass, diag, off, chol, s })
    }

    fn len(&self) -> usize {
        self.verts.len()
    }

    fn apply(&self, u: &[T]) -> Vec<T> {
        (0..self.len()).map(|i| self.diag[i] * u[i] + self.off[i].iter().map(|&(j, a)| a * u[j]).sum::<T>()).collect()
    }

    fn power_sum(&self, u: &[T]) -> T {
        u.iter().zip(&self.mass).map(|(&v, &m)| m * v.abs().powf(self.s)).sum()
    }

    /// `‖u‖_s² / uᵀAu`.
    fn quotient(&self, u: &[T]) -> T {
        let au = self.apply(u);
        let q: T = u.iter().zip(&au).map(|(&a, &b)| a * b).sum();
        self.power_sum(u).powf(T::of(2.0) / self.s) / q
    }

    /// Nonlinear power iteration `u ← A^{−1}(m u^{s−1})`, normalized in `ℓ^s`;
    /// the quotient is nondecreasing along the iteration.
    fn ascend(&self, start: Vec<T>, max_iters: usize) -> (T, Vec<T>, bool) {
        let mut u: Vec<T> = start.into_iter().map(|v| v.abs()).collect();
        let mut converged = false;
        for _ in 0..max_iters {
            let scale = self.power_sum(&u).powf(self.s.recip());
            u.iter_mut().for_each(|v| *v /= scale);
            if self.stationarity(&u) < T::of(ASCENT_TOLERANCE) {
                converged = true;
                break;
            }
            let w: Vec<T> = u.iter().zip(&self.mass).map(|(&v, &m)| m * v.powf(self.s - T::one())).collect();
            u = self.chol.solve(&w).into_iter().map(|v| v.max(T::zero())).collect();
        }
        let scale = self.power_sum(&u).powf(self.s.recip());
        u.iter_mut().for_each(|v| *v /= scale);
        (self.quotient(&u), u, converged)
    }

    /// `‖∇ ln(‖u‖_s²/uᵀAu)‖·‖u‖`, scale invariant.
    fn stationarity(&self, u: &[T]) -> T {
        let two = T::of(2.0);
        let au = self.apply(u);
        let q: T = u.iter().zip(&au).map(|(&a, &b)| a * b).sum();
        let ps = self.power_sum(u);
        let mut g2 = T::zero();
        let mut u2 = T::zero();
        for i in 0..self.len() {
            let gi = two * self.mass[i] * u[i].powf(self.s - T::one()) / ps - two * au[i] / q;
            g2 += gi * gi;
            u2 += u[i] * u[i];
        }
        (g2 * u2).sqrt()
    }
}

/// Lower estimate of the best `C_S` at radius `R`: indicators in closed form,
/// then ascent from `1_{B(R)°}`, three cut-offs and seeded random starts.
pub fn sobolev_constant<T: Real>(
    g: &WeightedGraph<T>,
    metric: &IntrinsicMetric<T>,
    x: usize,
    r: T,
    n: T,
    budget: &SobolevBudget,
) -> Result<SobolevEstimate> {
    g.check_vertex(x)?;
    if !(n > T::of(2.0)) {
        return Err(Error::Precondition(format!("Sobolev dimension must exceed 2, got {n}")));
    }
    if !(r > T::zero()) {
        return Err(Error::Precondition(format!("Sobolev radius must be positive, got {r}")));
    }
    let ball = metric.ball(x, r);
    let interior = g.combinatorial_interior(&ball);
    if interior.is_empty() {
        return Err(Error::Precondition(format!("B(R)° is empty at R = {r}")));
    }
    let s = T::of(2.0) * n / (n - T::of(2.0));
    let energy = Energy::new(g, metric, x, &interior, r, s)?;
    let vol: T = ball.iter().map(|y| g.measure(y)).sum();
    let prefactor = vol.powf(T::of(2.0) / n) / (r * r);
    let k = energy.len();

    // Indicators: ‖1_y‖_s² = m(y)^{2/s}, energy 2deg(y) + m(y)/R².
    let (best_i, best_q) = (0..k)
        .map(|i| (i, energy.mass[i].powf(T::of(2.0) / s) / energy.diag[i]))
        .fold((0, T::neg_infinity()), |acc, c| if c.1 > acc.1 { c } else { acc });
    let mut best = (
        best_q,
        {
            let mut e = vec![T::zero(); k];
            e[best_i] = T::one();
            e
        },
        format!("indicator:{}", g.id(energy.verts[best_i])),
    );

    let mut starts: Vec<(String, Vec<T>)> = vec![("interior".into(), vec![T::one(); k])];
    for (label, frac) in [("cutoff-R/4", 0.25), ("cutoff-R/2", 0.5), ("cutoff-R", 1.0)] {
        let radius = r * T::of(frac);
        let u: Vec<T> = energy.verts.iter().map(|&y| (T::one() - metric.dist(x, y) / radius).max(T::zero())).collect();
        if u.iter().any(|&v| v > T::zero()) {
            starts.push((label.into(), u));
        }
    }
    for i in 0..budget.starts {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        rng.set_stream(i as u64);
        starts.push((format!("random:{i}"), (0..k).map(|_| T::of(rng.random::<f64>() + 1e-3)).collect()));
    }
    let results: Vec<(T, Vec<T>, bool)> = starts.par_iter().map(|(_, u)| energy.ascend(u.clone(), budget.max_iters)).collect();
    let mut converged = true;
    for ((label, _), (q, u, ok)) in starts.iter().zip(results) {
        converged &= ok;
        if q > best.0 {
            best = (q, u, format!("ascent:{label}"));
        }
    }
    let mut certificate = vec![0.0; g.len()];
    for (i, &y) in energy.verts.iter().enumerate() {
        certificate[y] = best.1[i].as_f64();
    }
    Ok(SobolevEstimate { radius: r.as_f64(), c_s: (prefactor * best.0).as_f64(), converged, source: best.2, interior_size: k, certificate })
}

/// Declared constants the estimates are compared against.
#[derive(Clone, Copy, Debug, Default, Serialize, serde::Deserialize)]
pub struct SobolevTargets {
    pub c_s: Option<f64>,
    pub c_d: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusEstimate {
    pub radius: f64,
    pub c_s: f64,
    pub converged: bool,
    pub source: String,
}

/// Certificate for `SV(R1, R2)` at one center.
#[derive(Clone, Debug, Serialize)]
pub struct SVEstimate {
    pub center: String,
    pub r1: f64,
    /// Requested upper radius; may be infinite.
    pub r2: f64,
    /// Radius up to which the estimate is computed; beyond it balls no
    /// longer change and both constants can only decrease.
    pub effective_r2: f64,
    pub n: f64,
    pub d: f64,
    pub c_d: f64,
    pub c_d_witness: (f64, f64),
    pub c_s: f64,
    pub c_s_radius: f64,
    pub converged: bool,
    pub radii: Vec<RadiusEstimate>,
    pub certificate: Vec<f64>,
    pub targets: SobolevTargets,
    pub sobolev_pass: Option<bool>,
    pub doubling_pass: Option<bool>,
    pub violating_radius: Option<f64>,
}

impl SVEstimate {
    /// Both constants within their targets; `true` when no targets were set.
    pub fn passed(&self) -> bool {
        self.sobolev_pass.unwrap_or(true) && self.doubling_pass.unwrap_or(true)
    }

    /// Sobolev constant fed into downstream bounds: the declared target when
    /// the estimate does not exceed it, otherwise the estimate.
    pub fn sobolev_constant(&self) -> f64 {
        match (self.targets.c_s, self.sobolev_pass) {
            (Some(t), Some(true)) => t,
            _ => self.c_s,
        }
    }

    pub fn doubling_constant(&self) -> f64 {
        match (self.targets.c_d, self.doubling_pass) {
            (Some(t), Some(true)) => t,
            _ => self.c_d,
        }
    }
}

/// Estimates `C_S` on the lossless radius grid (`R1` plus realized distances
/// in `(R1, R2]`) and `C_D` on `[R1, R2]`, then compares with `targets`.
/// `R2 = ∞` is accepted and truncated at the eccentricity of `x`.
#[allow(clippy::too_many_arguments)]
pub fn sv_check<T: Real>(
    g: &WeightedGraph<T>,
    metric: &IntrinsicMetric<T>,
    x: usize,
    r1: T,
    r2: T,
    n: T,
    d: T,
    targets: SobolevTargets,
    budget: &SobolevBudget,
) -> Result<SVEstimate> {
    g.check_vertex(x)?;
    if !(r2 >= r1) {
        return Err(Error::Precondition(format!("need R1 <= R2, got [{r1}, {r2}]")));
    }
    let eff = if r2.is_finite() { r2 } else { r1.max(metric.eccentricity(x)) };
    let mut radii = vec![r1];
    let mut realized: Vec<T> = metric.row(x).iter().copied().filter(|&v| v > r1 && v <= eff).collect();
    realized.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    realized.dedup();
    radii.extend(realized);
    let estimates: Vec<SobolevEstimate> = radii.iter().map(|&r| sobolev_constant(g, metric, x, r, n, budget)).collect::<Result<_>>()?;
    let doubling = doubling_constant(g, metric, x, r1, eff, d)?;
    let worst = estimates.iter().enumerate().fold(0, |b, (i, e)| if e.c_s > estimates[b].c_s { i } else { b });
    let sobolev_pass = targets.c_s.map(|t| estimates.iter().all(|e| e.c_s <= t));
    let violating_radius = targets.c_s.and_then(|t| estimates.iter().find(|e| e.c_s > t).map(|e| e.radius));
    Ok(SVEstimate {
        center: g.id(x).to_string(),
        r1: r1.as_f64(),
        r2: r2.as_f64(),
        effective_r2: eff.as_f64(),
        n: n.as_f64(),
        d: d.as_f64(),
        c_d: doubling.c_d,
        c_d_witness: doubling.witness,
        c_s: estimates[worst].c_s,
        c_s_radius: estimates[worst].radius,
        converged: estimates.iter().all(|e| e.converged),
        certificate: estimates[worst].certificate.clone(),
        radii: estimates
            .into_iter()
            .map(|e| RadiusEstimate { radius: e.radius, c_s: e.c_s, converged: e.converged, source: e.source })
            .collect(),
        targets,
        sobolev_pass,
        doubling_pass: targets.c_d.map(|t| doubling.c_d <= t),
        violating_radius,
    })
}
