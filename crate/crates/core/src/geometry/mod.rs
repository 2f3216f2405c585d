//! Ball volumes, degree and inverse-measure means, the error function Γ,
//! iteration counts, and estimators for the doubling and Sobolev constants.

mod doubling;
mod sobolev;

pub use doubling::{doubling_constant, star_doubling_constant, DoublingEstimate};
pub use sobolev::{sobolev_constant, sobolev_ratio, sv_check, SVEstimate, SobolevBudget, SobolevEstimate, SobolevTargets};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metric::IntrinsicMetric;
use crate::scalar::{le_slack, Real};

/// Integrability exponent `p ∈ (1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Exponent<T> {
    /// Hölder conjugate; exactly 1 for `p = ∞`.
    pub fn conjugate(self) -> T {
        match self {
            Exponent::Finite(p) => p / (p - T::one()),
            Exponent::Infinite => T::one(),
        }
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> T {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinite => T::zero(),
        }
    }
}

impl<T: Real> std::fmt::Display for Exponent<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

/// `(n, d, p)` and the derived exponents `q, α, β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimensionParams<T> {
    pub n: T,
    pub d: T,
    pub p: Exponent<T>,
}

impl<T: Real> DimensionParams<T> {
    pub fn new(n: T, d: T, p: Exponent<T>) -> Result<Self> {
        if !(n > T::of(2.0)) || !n.is_finite() {
            return Err(Error::Precondition(format!("n must exceed 2, got {n}")));
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::Precondition(format!("d must be positive, got {d}")));
        }
        if let Exponent::Finite(p) = p {
            if !(p > T::one()) || !p.is_finite() {
                return Err(Error::Precondition(format!("p must lie in (1, inf], got {p}")));
            }
        }
        Ok(DimensionParams { n, d, p })
    }

    pub fn q(&self) -> T {
        self.p.conjugate()
    }

    pub fn alpha(&self) -> T {
        T::one() + T::of(2.0) / self.n
    }

    pub fn beta(&self) -> T {
        T::one() + (self.n.max(T::of(2.0) * self.q())).recip()
    }

    /// Decay rate of θ: `ln β / √(4S)`.
    pub fn gamma(&self, s: T) -> T {
        self.beta().ln() / (T::of(4.0) * s).sqrt()
    }

    /// Sobolev exponent `2n/(n−2)`.
    pub fn sobolev_exponent(&self) -> T {
        T::of(2.0) * self.n / (self.n - T::of(2.0))
    }
}

/// `κ(r) = ⌊√(r/4S) − 2⌋` clamped at 0, and `θ(r) = 1/(2β^κ)`.
pub fn kappa_theta<T: Real>(r: T, s: T, beta: T) -> (u32, T) {
    let raw = ((r / (T::of(4.0) * s)).sqrt() - T::of(2.0)).floor();
    let kappa = if raw < T::zero() {
        log::debug!("kappa clamped to 0 at r = {r} (raw value {raw})");
        0
    } else {
        raw.to_u32().unwrap_or(u32::MAX)
    };
    (kappa, theta_of(kappa, beta))
}

fn theta_of<T: Real>(kappa: u32, beta: T) -> T {
    T::of(0.5) * (-(T::of(kappa as f64) * beta.ln())).exp()
}

/// Number of spatial Moser steps `K = ⌊√(R/8S) − 2⌋`; requires `R ≥ 32S`.
pub fn k_iterations<T: Real>(r: T, s: T) -> Result<u32> {
    if !(r >= T::of(32.0) * s) {
        return Err(Error::Precondition(format!("the Moser iteration needs R >= 32S, got R = {r}, S = {s}")));
    }
    Ok(((r / (T::of(8.0) * s)).sqrt() - T::of(2.0)).floor().max(T::zero()).to_u32().unwrap_or(u32::MAX))
}

/// Radius threshold `R₀ = 8S(ln q / ln(α/β) + 3)²` of the mean-value inequality.
pub fn r0<T: Real>(s: T, params: &DimensionParams<T>) -> T {
    let ratio = params.q().ln() / (params.alpha() / params.beta()).ln() + T::of(3.0);
    T::of(8.0) * s * ratio * ratio
}

/// `ln C(n)` with `C(n) = [(1+R²)(C_S^{n/2}(2R²+1)^{n/2})^q]^{θ(R)}`, the
/// Γ bound for the normalizing measure.
pub fn ln_normalized_gamma_bound<T: Real>(r: T, c_s: T, s: T, params: &DimensionParams<T>) -> T {
    let (_, theta) = kappa_theta(r, s, params.beta());
    let half_n = params.n / T::of(2.0);
    let inner = (T::one() + r * r).ln() + params.q() * half_n * (c_s.ln() + (T::of(2.0) * r * r + T::one()).ln());
    theta * inner
}

/// Radial view of a graph from one center: sorted distances with cumulative
/// measure, degree and inverse-measure aggregates.
#[derive(Clone, Debug)]
pub struct GeometryProfile<T> {
    center: usize,
    jump: T,
    params: DimensionParams<T>,
    dist: Vec<T>,
    volume: Vec<T>,
    degree_acc: Vec<T>,
    inverse_acc: Vec<T>,
}

/// One row of a profile dump.
#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    pub r: f64,
    pub volume: f64,
    pub d_p: f64,
    pub m_p: f64,
    pub mu: f64,
    pub theta: f64,
    pub kappa: u32,
    pub gamma: f64,
}

impl<T: Real> GeometryProfile<T> {
    pub fn new(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, x: usize, params: DimensionParams<T>) -> Result<Self> {
        g.check_vertex(x)?;
        let sorted = metric.sorted_from(x);
        let deg = g.weighted_degrees();
        let mut dist = Vec::with_capacity(sorted.len());
        let mut volume = Vec::with_capacity(sorted.len());
        let mut degree_acc = Vec::with_capacity(sorted.len());
        let mut inverse_acc = Vec::with_capacity(sorted.len());
        let (mut v, mut da, mut ia) = (T::zero(), T::zero(), T::zero());
        for (r, y) in sorted {
            let m = g.measure(y);
            v += m;
            match params.p {
                Exponent::Finite(p) => {
                    da += m * deg[y].powf(p);
                    ia += m * m.powf(-p);
                }
                Exponent::Infinite => {
                    da = da.max(deg[y]);
                    ia = ia.max(m.recip());
                }
            }
            dist.push(r);
            volume.push(v);
            degree_acc.push(da);
            inverse_acc.push(ia);
        }
        Ok(GeometryProfile { center: x, jump: metric.jump_size(), params, dist, volume, degree_acc, inverse_acc })
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn params(&self) -> &DimensionParams<T> {
        &self.params
    }

    pub fn jump_size(&self) -> T {
        self.jump
    }

    /// Realized distances from the center, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut out: Vec<T> = Vec::new();
        for &d in &self.dist {
            if out.last().map_or(true, |&l| !le_slack(d, l)) {
                out.push(d);
            }
        }
        out
    }

    fn last_in_ball(&self, r: T) -> usize {
        self.dist.partition_point(|&d| le_slack(d, r)).max(1) - 1
    }

    /// Number of vertices in `B(r)`.
    pub fn ball_size(&self, r: T) -> usize {
        self.last_in_ball(r) + 1
    }

    /// `m(B(r))`.
    pub fn volume(&self, r: T) -> T {
        self.volume[self.last_in_ball(r)]
    }

    /// `m(B(r⁻)) = m({y : ρ(x,y) < r})`, positive for `r > 0`.
    pub fn volume_below(&self, r: T) -> T {
        let k = self.dist.partition_point(|&d| d < r && !le_slack(r, d));
        self.volume[k.max(1) - 1]
    }

    /// Least-squares slope of `ln m(B(r))` against `ln r` over the realized
    /// distances in `[r_lo, r_hi]`; needs two distinct radii.
    pub fn volume_growth_exponent(&self, r_lo: T, r_hi: T) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .breakpoints()
            .into_iter()
            .filter(|&r| r >= r_lo && r <= r_hi && r > T::zero())
            .map(|r| (r.as_f64().ln(), self.volume(r).as_f64().ln()))
            .collect();
        if pts.len() < 2 {
            return Err(Error::Precondition(format!("fewer than two realized radii in [{r_lo}, {r_hi}]")));
        }
        let k = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Ok(sxy / sxx)
    }

    pub fn eccentricity(&self) -> T {
        *self.dist.last().expect("nonempty graph")
    }

    /// `D_p(r)`.
    pub fn degree_mean(&self, r: T) -> T {
        let k = self.last_in_ball(r);
        match self.params.p {
            Exponent::Finite(p) => (self.degree_acc[k] / self.volume[k]).powf(p.recip()),
            Exponent::Infinite => self.degree_acc[k],
        }
    }

    /// `M_p(r)`.
    pub fn inverse_measure_mean(&self, r: T) -> T {
        let k = self.last_in_ball(r);
        match self.params.p {
            Exponent::Finite(p) => (self.inverse_acc[k] / self.volume[k]).powf(p.recip()),
            Exponent::Infinite => self.inverse_acc[k],
        }
    }

    /// `ln μ(r)` with `μ(r) = 1 ∨ (m(B(r))/r^d)^q`; needs `r > 0`.
    pub fn ln_mu(&self, r: T) -> Result<T> {
        if !(r > T::zero()) {
            return Err(Error::Precondition(format!("mu needs r > 0, got {r}")));
        }
        Ok((self.params.q() * (self.volume(r).ln() - self.params.d * r.ln())).max(T::zero()))
    }

    pub fn mu(&self, r: T) -> Result<T> {
        self.ln_mu(r).map(T::exp)
    }

    pub fn kappa_theta(&self, r: T) -> (u32, T) {
        kappa_theta(r, self.jump, self.params.beta())
    }

    /// `ln Γ(r) = θ(r)·ln[(1 + r²D_p(r)) M_p(r)^q m(B(r))^q]`.
    pub fn ln_gamma(&self, r: T) -> T {
        let (_, theta) = self.kappa_theta(r);
        let q = self.params.q();
        theta * ((T::one() + r * r * self.degree_mean(r)).ln() + q * self.inverse_measure_mean(r).ln() + q * self.volume(r).ln())
    }

    pub fn gamma(&self, r: T) -> T {
        self.ln_gamma(r).exp()
    }

    pub fn row(&self, r: T) -> ProfileRow {
        let (kappa, theta) = self.kappa_theta(r);
        ProfileRow {
            r: r.as_f64(),
            volume: self.volume(r).as_f64(),
            d_p: self.degree_mean(r).as_f64(),
            m_p: self.inverse_measure_mean(r).as_f64(),
            mu: self.mu(r).map(|v| v.as_f64()).unwrap_or(f64::NAN),
            theta: theta.as_f64(),
            kappa,
            gamma: self.gamma(r).as_f64(),
        }
    }

    pub fn rows(&self, radii: &[T]) -> Vec<ProfileRow> {
        radii.iter().map(|&r| self.row(r)).collect()
    }
}

/// `m(B_x(R))`.
pub fn ball_volume<T: Real>(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, x: usize, r: T) -> T {
    metric.ball(x, r).iter().map(|y| g.measure(y)).sum()
}

fn p_mean<T: Real>(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, x: usize, r: T, p: Exponent<T>, value: impl Fn(usize) -> T) -> T {
    let ball = metric.ball(x, r);
    match p {
        Exponent::Infinite => ball.iter().map(&value).fold(T::zero(), T::max),
        Exponent::Finite(p) => {
            let vol: T = ball.iter().map(|y| g.measure(y)).sum();
            let acc: T = ball.iter().map(|y| g.measure(y) * value(y).powf(p)).sum();
            (acc / vol).powf(p.recip())
        }
    }
}

/// `D_p(x, R)`.
pub fn degree_mean<T: Real>(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, x: usize, r: T, p: Exponent<T>) -> T {
    let deg = g.weighted_degrees();
    p_mean(g, metric, x, r, p, |y| deg[y])
}

/// `M_p(x, R)`.
pub fn inverse_measure_mean<T: Real>(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, x: usize, r: T, p: Exponent<T>) -> T {
    p_mean(g, metric, x, r, p, |y| g.measure(y).recip())
}

/// `μ_x(R) = 1 ∨ (m(B_x(R))/R^d)^q`.
pub fn mu<T: Real>(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, x: usize, r: T, d: T, q: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::Precondition(format!("mu needs R > 0, got {r}")));
    }
    Ok(T::one().max((ball_volume(g, metric, x, r) / r.powf(d)).powf(q)))
}

/// `Γ_x(r)` evaluated directly from the ball.
pub fn gamma_error<T: Real>(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, x: usize, r: T, params: &DimensionParams<T>) -> T {
    let (_, theta) = kappa_theta(r, metric.jump_size(), params.beta());
    let q = params.q();
    let base = (T::one() + r * r * degree_mean(g, metric, x, r, params.p))
        * inverse_measure_mean(g, metric, x, r, params.p).powf(q)
        * ball_volume(g, metric, x, r).powf(q);
    base.powf(theta)
}
