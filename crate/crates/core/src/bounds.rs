//! Davies' graph Gaussian `ζ_S`, the polynomial correction, and log-space
//! assembly of the Gaussian heat kernel upper bounds.
//!
//! Every right-hand side is returned as a list of named log-factors whose sum
//! is the log of the bound; the explicit constants overflow `f64` otherwise.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{kappa_theta, ln_normalized_gamma_bound, r0, Exponent, GeometryProfile};
use crate::report::{Status, VACUOUS_LOG_MARGIN};
use crate::scalar::Real;
use crate::semigroup::HeatSystem;

/// Bound passes iff `lhs ≤ rhs·(1 + BOUND_TOLERANCE)`.
pub const BOUND_TOLERANCE: f64 = 1e-9;

fn positive_time<T: Real>(t: T) -> Result<()> {
    if !(t > T::zero()) {
        return Err(Error::NonPositiveTime(t.as_f64()));
    }
    Ok(())
}

/// `arsinh z` without cancellation near 0 or for negative `z`.
pub fn asinh<T: Real>(z: T) -> T {
    let a = z.abs();
    let v = if a < T::of(1e-4) {
        let a2 = a * a;
        a * (T::one() - a2 / T::of(6.0) + T::of(3.0) * a2 * a2 / T::of(40.0))
    } else {
        (a + a * a / (T::one() + (T::one() + a * a).sqrt())).ln_1p()
    };
    v.copysign(z)
}

/// `√(1+z²) − 1` in the cancellation-free form `z²/(1 + √(1+z²))`.
fn sqrt1p_m1<T: Real>(z: T) -> T {
    z * z / (T::one() + (T::one() + z * z).sqrt())
}

/// `ζ_S(r,t) = S^{−2}(rS·arsinh(rS/t) + t − √(t² + r²S²))`.
pub fn zeta<T: Real>(r: T, t: T, s: T) -> Result<T> {
    positive_time(t)?;
    let z = r * s / t;
    Ok(t / (s * s) * (z * asinh(z) - sqrt1p_m1(z)))
}

/// `σ(r,t) = 2S^{−2}(√(1 + r²S²/t²) − 1)`.
pub fn sigma<T: Real>(r: T, t: T, s: T) -> Result<T> {
    positive_time(t)?;
    Ok(T::of(2.0) / (s * s) * sqrt1p_m1(r * s / t))
}

/// `γ(η) = 2S^{−2}(cosh η − 1)`, the growth rate in the integrated maximum principle.
pub fn davies_rate<T: Real>(eta: T, s: T) -> T {
    let h = (eta / T::of(2.0)).sinh();
    T::of(4.0) * h * h / (s * s)
}

/// `ln (1 ∨ S^{−2}(√(t² + r²S²) − t))^{n/2}`.
pub fn ln_poly_correction<T: Real>(r: T, t: T, s: T, n: T) -> T {
    let rs = r * s;
    let inner = rs * rs / ((t * t + rs * rs).sqrt() + t) / (s * s);
    n / T::of(2.0) * inner.max(T::one()).ln()
}

pub fn poly_correction<T: Real>(r: T, t: T, s: T, n: T) -> T {
    ln_poly_correction(r, t, s, n).exp()
}

/// The manifold-type correction `(1 ∨ r²/t)^{n/2}`.
pub fn manifold_poly_correction<T: Real>(r: T, t: T, n: T) -> T {
    (r * r / t).max(T::one()).powf(n / T::of(2.0))
}

/// `f(η, θ) = −η + (cosh η − 1)/θ`, minimized at `η = arsinh θ`.
pub fn davies_objective<T: Real>(eta: T, theta: T) -> T {
    let h = (eta / T::of(2.0)).sinh();
    -eta + T::of(2.0) * h * h / theta
}

/// `(η*, F(θ))` at `θ = rS/t` with `η* = arsinh θ` and
/// `F(θ) = (√(1+θ²) − 1)/θ − arsinh θ`; `(r/S)F(θ) = −ζ_S(r, t)`.
pub fn davies_exponent_optimizer<T: Real>(r: T, t: T, s: T) -> Result<(T, T)> {
    positive_time(t)?;
    if r == T::zero() {
        return Ok((T::zero(), T::zero()));
    }
    let theta = r * s / t;
    let eta = asinh(theta);
    Ok((eta, theta / (T::one() + (T::one() + theta * theta).sqrt()) - eta))
}

/// `ln C_β`, `C_β = 4^{((4 + 1/ln β) + β/(β−1))/(β−1)}`.
pub fn ln_c_beta<T: Real>(beta: T) -> T {
    let b1 = beta - T::one();
    ((T::of(4.0) + beta.ln().recip()) + beta / b1) / b1 * T::of(4.0).ln()
}

/// `ln C_{d,n}`, `C_{d,n} = (1∨C_D)(1∨C_D^{n/2+1}C_S^{n/2})·10^{8((n+2)(d+1)+n²+n)+1}`.
pub fn ln_c_dn<T: Real>(n: T, d: T, c_d: T, c_s: T) -> T {
    let half = n / T::of(2.0);
    let ln_cd = c_d.ln();
    let tail = T::of(8.0) * ((n + T::of(2.0)) * (d + T::one()) + n * n + n) + T::one();
    ln_cd.max(T::zero()) + ((half + T::one()) * ln_cd + half * c_s.ln()).max(T::zero()) + tail * T::of(10.0).ln()
}

/// One center of a two-point bound with its certified constants.
#[derive(Clone, Debug)]
pub struct CenterData<T> {
    pub profile: Arc<GeometryProfile<T>>,
    pub r: T,
    /// Outer radius; `None` stands for `R = ∞`.
    pub big_r: Option<T>,
    pub c_d: T,
    pub c_s: T,
}

impl<T: Real> CenterData<T> {
    pub fn vertex(&self) -> usize {
        self.profile.center()
    }

    fn n(&self) -> T {
        self.profile.params().n
    }

    fn d(&self) -> T {
        self.profile.params().d
    }

    /// `ln C_{d,n,β} = ln C_β + ln C_{d,n}`.
    pub fn ln_c_dnb(&self) -> T {
        let p = self.profile.params();
        ln_c_beta(p.beta()) + ln_c_dn(p.n, p.d, self.c_d, self.c_s)
    }

    /// `a ∧ R` with `R = ∞` allowed.
    fn cap(&self, a: T) -> T {
        self.big_r.map_or(a, |r| a.min(r))
    }

    fn validate(&self) -> Result<()> {
        if !(self.r > T::zero()) {
            return Err(Error::Precondition(format!("inner radius must be positive, got {}", self.r)));
        }
        if let Some(big) = self.big_r {
            if !(big >= T::of(2.0) * self.r) {
                return Err(Error::Precondition(format!("need R >= 2r, got R = {big}, r = {}", self.r)));
            }
        }
        if !(self.c_d > T::zero()) || !(self.c_s > T::zero()) {
            return Err(Error::Precondition("doubling and Sobolev constants must be positive".into()));
        }
        Ok(())
    }
}

/// A pair `(x, y)`, a time `t`, and everything the bounds depend on.
#[derive(Clone, Debug)]
pub struct BoundInputs<T> {
    pub x: CenterData<T>,
    pub y: CenterData<T>,
    pub rho: T,
    pub t: T,
    pub jump: T,
    pub lambda: T,
}

impl<T: Real> BoundInputs<T> {
    fn validate(&self) -> Result<()> {
        positive_time(self.t)?;
        if !(self.rho >= T::zero()) {
            return Err(Error::Precondition(format!("distance must be nonnegative, got {}", self.rho)));
        }
        if !(self.jump > T::zero()) {
            return Err(Error::Precondition("jump size must be positive".into()));
        }
        self.x.validate()?;
        self.y.validate()
    }

    /// `t ≥ 8 max{r_i², r_j²}`.
    fn check_time_threshold(&self) -> Result<()> {
        let r = self.x.r.max(self.y.r);
        if !(self.t >= T::of(8.0) * r * r) {
            return Err(Error::Precondition(format!(
                "the bound needs t >= 8 max(r_i^2, r_j^2) = {}, got t = {}",
                T::of(8.0) * r * r,
                self.t
            )));
        }
        Ok(())
    }

    /// Mean-value radii `r' ≥ 2r` must reach `R₀`.
    fn check_r0(&self) -> Result<()> {
        for c in [&self.x, &self.y] {
            let threshold = r0(self.jump, c.profile.params());
            if !(T::of(2.0) * c.r >= threshold) {
                return Err(Error::Precondition(format!("the mean-value step needs 2r >= R0 = {threshold}, got r = {}", c.r)));
            }
        }
        Ok(())
    }
}

/// Named log-factors of a right-hand side.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Breakdown(pub BTreeMap<String, f64>);

impl Breakdown {
    fn put<T: Real>(&mut self, name: &str, v: T) {
        self.0.insert(name.to_string(), v.as_f64());
    }

    /// Sum of the log-factors, accumulated in a fixed (sorted) order.
    pub fn log_total(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }
}

/// How the Γ factors are bounded.
#[derive(Clone, Debug)]
pub enum Rule<T> {
    /// Γ from the profile, as in the general bound.
    Main,
    /// Davies' two-point bound with the mean-value φ (proof form).
    Davies,
    /// `m = deg`, `p = ∞`: Γ replaced by the Sobolev-controlled constant.
    Normalized,
    /// `inf m > 0`: `Γ(τ) ≤ [μ(r)(1+τ²D_p(τ))]^θ (C_D τ^d/inf m)^{qθ}`.
    PositiveMeasure { inf_m: T },
    /// `R = ∞` and `M_p, D_p ≤ C exp(exp(γ√r))` beyond `R1`; `mu1 = sup μ_z(R1)`.
    Degenerating { growth: T, mu1: T },
}

impl<T: Real> Rule<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Main => "main",
            Rule::Davies => "davies",
            Rule::Normalized => "normalized",
            Rule::PositiveMeasure { .. } => "positive-measure",
            Rule::Degenerating { .. } => "degenerating",
        }
    }
}

/// Variants with a simplified Γ.
#[derive(Clone, Debug)]
pub enum Variant<T> {
    Normalized,
    PositiveMeasure { inf_m: T },
    Degenerating { growth: T, mu1: T },
}

fn ln_gamma_bound<T: Real>(rule: &Rule<T>, c: &CenterData<T>, tau: T) -> Result<T> {
    let prof = &c.profile;
    let params = prof.params();
    let s = prof.jump_size();
    let (_, theta) = kappa_theta(tau, s, params.beta());
    let q = params.q();
    match rule {
        Rule::Main | Rule::Davies => Ok(prof.ln_gamma(tau)),
        Rule::Normalized => Ok(ln_normalized_gamma_bound(tau, c.c_s, s, params)),
        Rule::PositiveMeasure { inf_m } => {
            let ln_mu = prof.ln_mu(c.r)?;
            let local = (T::one() + tau * tau * prof.degree_mean(tau)).ln();
            Ok(theta * (ln_mu + local) + q * theta * (c.c_d.ln() + params.d * tau.ln() - inf_m.ln()))
        }
        Rule::Degenerating { growth, mu1 } => {
            let ln_e = (params.gamma(s) * tau.sqrt()).exp();
            let ln_ce = growth.ln() + ln_e;
            let local = ln1p_exp(two_ln(tau) + ln_ce);
            Ok(theta * (mu1.ln() + local + q * ln_ce + q * (c.c_d.ln() + params.d * tau.ln())))
        }
    }
}

fn two_ln<T: Real>(v: T) -> T {
    T::of(2.0) * v.ln()
}

/// `ln(1 + e^x)` without overflow.
fn ln1p_exp<T: Real>(x: T) -> T {
    if x > T::of(30.0) {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn check_rule<T: Real>(rule: &Rule<T>, inputs: &BoundInputs<T>) -> Result<()> {
    match rule {
        Rule::Normalized => {
            if (inputs.jump - T::one()).abs() > T::of(1e-12) {
                return Err(Error::Uncertified(format!(
                    "normalized variant needs the combinatorial metric (S = 1), got S = {}",
                    inputs.jump
                )));
            }
            for c in [&inputs.x, &inputs.y] {
                if c.profile.params().p != Exponent::Infinite {
                    return Err(Error::Uncertified("normalized variant uses p = inf".into()));
                }
                let ecc = c.profile.eccentricity();
                let dmax = c.profile.degree_mean(ecc);
                if (dmax - T::one()).abs() > T::of(1e-12) {
                    return Err(Error::Uncertified(format!("normalized variant needs m = deg, found sup Deg = {dmax}")));
                }
            }
        }
        Rule::PositiveMeasure { inf_m } => {
            if !(*inf_m > T::zero()) {
                return Err(Error::Uncertified("positive-measure variant needs inf m > 0".into()));
            }
        }
        Rule::Degenerating { growth, mu1 } => {
            if !(*growth > T::zero()) || !(*mu1 >= T::one()) {
                return Err(Error::Uncertified("degenerating variant needs a growth constant and mu1 >= 1".into()));
            }
            for c in [&inputs.x, &inputs.y] {
                if c.big_r.is_some() {
                    return Err(Error::Uncertified("degenerating variant needs SV(R1, inf)".into()));
                }
                certify_growth(&c.profile, c.r, *growth)?;
                if c.profile.ln_mu(c.r)? > mu1.ln() + T::of(1e-12) {
                    return Err(Error::Uncertified("mu1 is below mu_z(R1) at a center".into()));
                }
            }
        }
        Rule::Main | Rule::Davies => {}
    }
    Ok(())
}

/// Checks `M_p(ρ), D_p(ρ) ≤ C exp(exp(γ√ρ))` for all `ρ ≥ R1`. Both sides
/// are monotone step/continuous functions, so the realized distances suffice.
pub fn certify_growth<T: Real>(profile: &GeometryProfile<T>, r1: T, growth: T) -> Result<()> {
    let gamma = profile.params().gamma(profile.jump_size());
    let mut radii = vec![r1];
    radii.extend(profile.breakpoints().into_iter().filter(|&r| r > r1));
    for r in radii {
        let ln_cap = growth.ln() + (gamma * r.sqrt()).exp();
        let worst = profile.degree_mean(r).max(profile.inverse_measure_mean(r)).ln();
        if worst > ln_cap {
            return Err(Error::Uncertified(format!("growth bound fails at radius {r}")));
        }
    }
    Ok(())
}

/// Smallest growth constant `C` with `M_p, D_p ≤ C exp(exp(γ√ρ))` beyond `R1`.
pub fn growth_constant<T: Real>(profile: &GeometryProfile<T>, r1: T) -> T {
    let gamma = profile.params().gamma(profile.jump_size());
    let mut radii = vec![r1];
    radii.extend(profile.breakpoints().into_iter().filter(|&r| r > r1));
    radii
        .into_iter()
        .map(|r| profile.degree_mean(r).max(profile.inverse_measure_mean(r)).ln() - (gamma * r.sqrt()).exp())
        .fold(T::neg_infinity(), T::max)
        .exp()
}

/// General right-hand side as log-factors.
pub fn main_bound_rhs<T: Real>(inputs: &BoundInputs<T>) -> Result<Breakdown> {
    assemble(&Rule::Main, inputs)
}

pub fn special_case_rhs<T: Real>(variant: &Variant<T>, inputs: &BoundInputs<T>) -> Result<Breakdown> {
    let rule = match *variant {
        Variant::Normalized => Rule::Normalized,
        Variant::PositiveMeasure { inf_m } => Rule::PositiveMeasure { inf_m },
        Variant::Degenerating { growth, mu1 } => Rule::Degenerating { growth, mu1 },
    };
    assemble(&rule, inputs)
}

/// Right-hand side for any rule.
pub fn assemble<T: Real>(rule: &Rule<T>, inputs: &BoundInputs<T>) -> Result<Breakdown> {
    inputs.validate()?;
    inputs.check_time_threshold()?;
    inputs.check_r0()?;
    check_rule(rule, inputs)?;
    if let Rule::Davies = rule {
        return davies_gaussian_rhs(inputs);
    }
    let (x, y, t) = (&inputs.x, &inputs.y, inputs.t);
    let two = T::of(2.0);
    let n_ij = (x.n() + y.n()) / two;
    let mut out = Breakdown::default();
    let ln_c = (T::of(3.0) + n_ij + x.d() + y.d()) * two.ln() + T::one() + x.c_d.ln() + y.c_d.ln() + (x.ln_c_dnb() + y.ln_c_dnb()) / two;
    out.put("constant", ln_c);
    let tau = |c: &CenterData<T>| {
        let base = (t / T::of(8.0)).sqrt();
        c.big_r.map_or(base, |r| base.min(r / two))
    };
    out.put("gamma_x", ln_gamma_bound(rule, x, tau(x))?);
    out.put("gamma_y", ln_gamma_bound(rule, y, tau(y))?);
    out.put("poly", ln_poly_correction(inputs.rho, t, inputs.jump, n_ij));
    let vol = |c: &CenterData<T>| c.profile.volume(c.cap(t.sqrt())).ln();
    out.put("volume", -(vol(x) + vol(y)) / two);
    let spectral = match rule {
        Rule::Degenerating { .. } => T::zero(),
        _ => -inputs.lambda * (t - (x.cap(t.sqrt()).powi(2) + y.cap(t.sqrt()).powi(2)) / two),
    };
    out.put("spectral", spectral);
    out.put("gaussian", -zeta(inputs.rho, t, inputs.jump)?);
    Ok(out)
}

/// Two-point Davies bound with the mean-value φ, with the proof's choices
/// `δ = ½ ∧ 1/(tσ)`, `r' = (√T ∧ R) ∨ 2r`, `a, b = T ∓ δr'²`, `t = 2T`.
pub fn davies_gaussian_rhs<T: Real>(inputs: &BoundInputs<T>) -> Result<Breakdown> {
    inputs.validate()?;
    inputs.check_time_threshold()?;
    inputs.check_r0()?;
    let t = inputs.t;
    let two = T::of(2.0);
    let half_t = t / two;
    let sig = sigma(inputs.rho, t, inputs.jump)?;
    let delta = if sig > T::zero() { (t * sig).recip().min(T::of(0.5)) } else { T::of(0.5) };
    let mut out = Breakdown::default();
    let mut a_sum = T::zero();
    let mut b_sum = T::zero();
    for (tag, c) in [("x", &inputs.x), ("y", &inputs.y)] {
        let rp = c.cap(half_t.sqrt()).max(two * c.r);
        let a = half_t - delta * rp * rp;
        let b = half_t + delta * rp * rp;
        if a < T::zero() {
            return Err(Error::Precondition(format!("mean-value window starts before 0 at center {tag}")));
        }
        a_sum += a;
        b_sum += b;
        let exponent = c.n() / two + T::one();
        let ln_phi_inv_sq = c.ln_c_dnb() + two * c.profile.ln_gamma(rp / two) + exponent * (T::one() + delta * rp * rp * sig).ln()
            - exponent * delta.ln()
            - two * rp.ln()
            - c.profile.volume(rp).ln();
        out.put(&format!("window_{tag}"), (b - a).ln() / two);
        out.put(&format!("phi_{tag}"), ln_phi_inv_sq / two);
    }
    out.put("sigma_shift", (b_sum - t) / two * sig);
    out.put("spectral", -inputs.lambda * a_sum);
    out.put("gaussian", -zeta(inputs.rho, t, inputs.jump)?);
    Ok(out)
}

/// Exact kernel value against an assembled bound.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub x: usize,
    pub y: usize,
    pub rho: f64,
    pub t: f64,
    pub rule: String,
    pub lhs: f64,
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub log_margin: f64,
    pub status: Status,
    pub breakdown: Breakdown,
}

impl BoundReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(x: usize, y: usize, rho: f64, t: f64, rule: &str, lhs: f64, breakdown: Breakdown, ln_adjust: f64) -> Self {
        let log_rhs = breakdown.log_total() + ln_adjust;
        let log_lhs = lhs.ln();
        let log_margin = if lhs <= 0.0 { f64::INFINITY } else { log_rhs - log_lhs };
        let status = if log_margin > VACUOUS_LOG_MARGIN {
            Status::VacuousPass
        } else if log_margin >= -BOUND_TOLERANCE.ln_1p() {
            Status::Pass
        } else {
            Status::Fail
        };
        BoundReport { x, y, rho, t, rule: rule.to_string(), lhs, log_lhs, log_rhs, log_margin, status, breakdown }
    }

    pub fn passed(&self) -> bool {
        self.status.is_ok()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BoundSummary {
    pub total: usize,
    pub pass: usize,
    pub vacuous_pass: usize,
    pub fail: usize,
    pub min_log_margin: f64,
    pub worst: Option<(usize, usize, f64)>,
}

impl BoundSummary {
    pub fn of(reports: &[BoundReport]) -> Self {
        let mut s = BoundSummary { min_log_margin: f64::INFINITY, ..Default::default() };
        for r in reports {
            s.total += 1;
            match r.status {
                Status::Pass => s.pass += 1,
                Status::VacuousPass => s.vacuous_pass += 1,
                _ => s.fail += 1,
            }
            if r.log_margin < s.min_log_margin {
                s.min_log_margin = r.log_margin;
                s.worst = Some((r.x, r.y, r.t));
            }
        }
        s
    }

    pub fn all_passed(&self) -> bool {
        self.fail == 0
    }
}

/// Compares `p_t(x, y)` with the bound of `rule` for every case; `ln_adjust`
/// is added to each log-rhs (zero except for negative controls).
pub fn verify_bound<T: Real>(
    hs: &HeatSystem<T>,
    cases: &[BoundInputs<T>],
    rule: &Rule<T>,
    ln_adjust: f64,
) -> Result<(Vec<BoundReport>, BoundSummary)> {
    let mut reports = Vec::with_capacity(cases.len());
    for c in cases {
        let breakdown = assemble(rule, c)?;
        let slice = hs.heat_kernel(c.t)?;
        let (x, y) = (c.x.vertex(), c.y.vertex());
        reports.push(BoundReport::new(x, y, c.rho.as_f64(), c.t.as_f64(), rule.name(), slice.get(x, y).as_f64(), breakdown, ln_adjust));
    }
    let summary = BoundSummary::of(&reports);
    Ok((reports, summary))
}
