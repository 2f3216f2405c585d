// Oracle values are pasted at full mpmath precision.
#![allow(clippy::excessive_precision)]

mod common;

use std::sync::Arc;

use common::{cycle, metric};
use hklab::bounds::{
    asinh, assemble, certify_growth, davies_exponent_optimizer, davies_objective, davies_rate, growth_constant, ln_c_beta, ln_c_dn,
    ln_poly_correction, main_bound_rhs, manifold_poly_correction, poly_correction, sigma, special_case_rhs, verify_bound, zeta,
    BoundInputs, BoundReport, Breakdown, CenterData, Rule, Variant,
};
use hklab::geometry::{kappa_theta, DimensionParams, Exponent, GeometryProfile};
use hklab::semigroup::HeatSystem;
use hklab::zoo::MeasureChoice;
use hklab::{Error, Graph, Status};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn gaussian_oracles() {
    // mpmath, 40 digits.
    assert!(rel(zeta(3.0, 0.7, 0.5).unwrap(), 5.213362601879369492921456195) < 1e-14);
    assert!(rel(zeta(1e-3, 10.0, 1.0).unwrap(), 4.999999995833333345833333e-8) < 1e-12);
    assert!(rel(zeta(500.0, 3.0, 0.25).unwrap(), 6893.409279120293246256157306) < 1e-14);
    assert!(rel(zeta(1.0, 100.0, 1.0).unwrap() * 200.0, 0.9999916669166555065599825568) < 1e-13);
    assert!((zeta(1.0f64, 100.0, 1.0).unwrap() * 200.0 - 1.0).abs() <= 0.01);
    for t in [1e-3, 1.0, 1e6] {
        assert_eq!(zeta(0.0, t, 0.7).unwrap(), 0.0);
    }
    assert!(matches!(zeta(1.0, 0.0, 1.0), Err(Error::NonPositiveTime(_))));
    assert!(rel(sigma(2.0, 1.0, 1.0).unwrap(), 2.0 * (5f64.sqrt() - 1.0)) < 1e-15);
}

#[test]
fn hyperbolic_helpers() {
    for z in [-30.0, -1.0, -1e-6, 0.0, 1e-9, 3e-5, 0.5, 2.0, 1e8] {
        assert!((asinh(z) - f64::asinh(z)).abs() <= 1e-15 * (1.0 + z.abs().ln_1p()));
    }
    for eta in [0.0, 0.3, 2.0] {
        assert!(rel(davies_rate(eta, 0.5) + 1e-300, 8.0 * (eta.cosh() - 1.0) + 1e-300) < 1e-12);
    }
}

#[test]
fn constant_oracles() {
    assert!(rel(ln_c_beta(4.0 / 3.0), 47.72758970479662887952156781) < 1e-14);
    assert!(rel(ln_c_dn(3.0, 1.0, 2.5, 0.8), 410.4298636945343141656773901) < 1e-14);
}

#[test]
fn polynomial_correction() {
    assert_eq!(poly_correction(0.0, 5.0, 1.0, 3.0), 1.0);
    assert!(rel(ln_poly_correction(50.0, 10.0, 1.0, 3.0), 5.569999342618356978216170808) < 1e-14);
    // Large t: the correction is 1 for r² ≪ t.
    assert_eq!(poly_correction(100.0, 1e6, 1.0, 4.0), 1.0);
    for n in [3.0, 4.0] {
        for i in 0..100 {
            for j in 0..100 {
                let r = 0.5 * i as f64;
                let t = 0.05 + 0.3 * j as f64;
                assert!(poly_correction(r, t, 1.0, n) <= manifold_poly_correction(r, t, n) * (1.0 + 1e-12));
            }
        }
    }
}

/// Root of an increasing function by bisection.
fn bisect_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let c = 0.5 * (a + b);
        if f(c) < 0.0 {
            a = c;
        } else {
            b = c;
        }
    }
    0.5 * (a + b)
}

#[test]
fn davies_exponent_is_the_minimizer() {
    for theta in [0.1, 1.0, 10.0] {
        let (eta, _) = davies_exponent_optimizer(theta, 1.0, 1.0).unwrap();
        assert!((eta - f64::asinh(theta)).abs() <= 1e-14);
        // f'(η) = sinh η/θ − 1 is increasing, so its root is the argmin.
        let found = bisect_root(|e| e.sinh() / theta - 1.0, 0.0, 10.0);
        let f_best = davies_objective(eta, theta);
        assert!(f_best <= davies_objective(eta - 1e-3, theta) && f_best <= davies_objective(eta + 1e-3, theta));
        assert!((found - eta).abs() <= 1e-8, "{found} vs {eta}");
    }
    for (r, t, s) in [(1.0f64, 100.0f64, 1.0f64), (40.0, 3.0, 0.5), (7.0, 7.0, 2.0)] {
        let (_, big_f) = davies_exponent_optimizer(r, 2.0 * t, s).unwrap();
        assert!((r / s * big_f + zeta(r, 2.0 * t, s).unwrap()).abs() <= 1e-10);
    }
    assert_eq!(davies_exponent_optimizer(0.0, 1.0, 1.0).unwrap(), (0.0, 0.0));
    // θ → 0: F(θ) ≈ −θ/2.
    let (_, f) = davies_exponent_optimizer(1e-7, 1.0, 1.0).unwrap();
    assert!(rel(f, -0.5e-7) < 1e-6);
}

struct Setup {
    g: Graph,
    profiles: Vec<Arc<GeometryProfile<f64>>>,
}

fn setup(n_cycle: usize, centers: &[usize]) -> Setup {
    let g = cycle(n_cycle, MeasureChoice::Normalizing);
    let m = metric(&g);
    let par = DimensionParams::new(3.0, 1.0, Exponent::Infinite).unwrap();
    let profiles = centers.iter().map(|&x| Arc::new(GeometryProfile::new(&g, &m, x, par).unwrap())).collect();
    Setup { g, profiles }
}

fn center(p: &Arc<GeometryProfile<f64>>, r: f64, big_r: Option<f64>) -> CenterData<f64> {
    CenterData { profile: p.clone(), r, big_r, c_d: 2.0, c_s: 1.5 }
}

fn inputs(s: &Setup, rho: f64, t: f64, r: f64) -> BoundInputs<f64> {
    BoundInputs { x: center(&s.profiles[0], r, None), y: center(&s.profiles[1], r, None), rho, t, jump: 1.0, lambda: 0.0 }
}

#[test]
fn main_breakdown_recombines() {
    let s = setup(300, &[0, 10]);
    let inp = inputs(&s, 10.0, 14112.0, 42.0);
    let b = main_bound_rhs(&inp).unwrap();
    let keys: Vec<&str> = b.0.keys().map(String::as_str).collect();
    assert_eq!(keys, ["constant", "gamma_x", "gamma_y", "gaussian", "poly", "spectral", "volume"]);
    let sum: f64 = b.0.values().sum();
    assert_eq!(b.log_total(), sum);

    // Independent evaluation of each factor.
    let (n, d, t) = (3.0, 1.0, 14112.0f64);
    let beta: f64 = 4.0 / 3.0;
    let ln_cdnb = ln_c_beta(beta) + ln_c_dn(n, d, 2.0, 1.5);
    let constant = (3.0 + n + 2.0 * d) * 2f64.ln() + 1.0 + 2.0 * 2f64.ln() + ln_cdnb;
    assert!(rel(b.get("constant").unwrap(), constant) < 1e-14);
    let tau = (t / 8.0).sqrt();
    let (_, theta) = kappa_theta(tau, 1.0, beta);
    // p = ∞ on the normalized cycle: D = 1, M = 1/2, volume 2(2⌊τ⌋+1).
    let vol_tau = 2.0 * (2.0 * tau.floor() + 1.0);
    let gamma = theta * ((1.0 + tau * tau) * 0.5 * vol_tau).ln();
    assert!(rel(b.get("gamma_x").unwrap(), gamma) < 1e-12);
    assert!(rel(b.get("gamma_y").unwrap(), gamma) < 1e-12);
    let vol_t = 2.0 * (2.0 * t.sqrt().floor() + 1.0);
    assert!(rel(b.get("volume").unwrap(), -vol_t.ln()) < 1e-14);
    assert_eq!(b.get("spectral").unwrap(), 0.0);
    assert!(rel(b.get("gaussian").unwrap(), -zeta(10.0, t, 1.0).unwrap()) < 1e-14);
    assert_eq!(b.get("poly").unwrap(), 0.0);
}

#[test]
fn diagonal_pairs_have_no_distance_factors() {
    let s = setup(300, &[5, 5]);
    let b = main_bound_rhs(&inputs(&s, 0.0, 2e4, 40.0)).unwrap();
    assert_eq!(b.get("gaussian"), Some(0.0));
    assert_eq!(b.get("poly"), Some(0.0));
    assert_eq!(b.get("gamma_x"), b.get("gamma_y"));
}

#[test]
fn preconditions() {
    let s = setup(300, &[0, 10]);
    assert!(matches!(main_bound_rhs(&inputs(&s, 10.0, 14111.0, 42.0)), Err(Error::Precondition(_))));
    // 2r below R₀ = 72.
    assert!(matches!(main_bound_rhs(&inputs(&s, 10.0, 1e5, 35.0)), Err(Error::Precondition(_))));
    let mut bad = inputs(&s, 10.0, 14112.0, 42.0);
    bad.x.big_r = Some(80.0);
    assert!(matches!(main_bound_rhs(&bad), Err(Error::Precondition(_))));
    let mut neg = inputs(&s, -1.0, 14112.0, 42.0);
    assert!(main_bound_rhs(&neg).is_err());
    neg.rho = 1.0;
    neg.t = -1.0;
    assert!(main_bound_rhs(&neg).is_err());
}

#[test]
fn special_cases() {
    let s = setup(300, &[0, 10]);
    let inp = inputs(&s, 10.0, 14112.0, 42.0);
    let a = special_case_rhs(&Variant::Normalized, &inp).unwrap();
    let b = assemble(&Rule::Normalized, &inp).unwrap();
    assert_eq!(a.log_total(), b.log_total());
    let pm = special_case_rhs(&Variant::PositiveMeasure { inf_m: 2.0 }, &inp).unwrap();
    assert!(pm.log_total().is_finite());
    assert!(matches!(assemble(&Rule::PositiveMeasure { inf_m: 0.0 }, &inp), Err(Error::Uncertified(_))));
    let growth = growth_constant(&s.profiles[0], 42.0).max(growth_constant(&s.profiles[1], 42.0));
    certify_growth(&s.profiles[0], 42.0, growth).unwrap();
    let mu1 = s.profiles.iter().map(|p| p.mu(42.0).unwrap()).fold(1.0, f64::max);
    let deg = assemble(&Rule::Degenerating { growth, mu1 }, &inp).unwrap();
    assert_eq!(deg.get("spectral"), Some(0.0));
    assert!(matches!(assemble(&Rule::Degenerating { growth, mu1: 0.5 }, &inp), Err(Error::Uncertified(_))));
    let mut finite = inp.clone();
    finite.x.big_r = Some(1e4);
    assert!(matches!(assemble(&Rule::Degenerating { growth, mu1 }, &finite), Err(Error::Uncertified(_))));

    // Counting measure is not normalizing.
    let g = cycle(300, MeasureChoice::Counting);
    let m = metric(&g);
    let par = DimensionParams::new(3.0, 1.0, Exponent::Infinite).unwrap();
    let p: Vec<_> = [0, 10].iter().map(|&x| Arc::new(GeometryProfile::new(&g, &m, x, par).unwrap())).collect();
    let counting = BoundInputs {
        x: center(&p[0], 42.0 * m.jump_size(), None),
        y: center(&p[1], 42.0 * m.jump_size(), None),
        rho: m.dist(0, 10),
        t: 2e4,
        jump: m.jump_size(),
        lambda: 0.0,
    };
    assert!(matches!(assemble(&Rule::Normalized, &counting), Err(Error::Uncertified(_))));
}

#[test]
fn verification_statuses() {
    let s = setup(300, &[0, 10]);
    let hs = HeatSystem::build(&s.g).unwrap();
    let cases = vec![inputs(&s, 10.0, 14112.0, 42.0), inputs(&s, 10.0, 1e5, 42.0)];
    for rule in [Rule::Main, Rule::Normalized, Rule::Davies] {
        let (reports, summary) = verify_bound(&hs, &cases, &rule, 0.0).unwrap();
        assert_eq!(summary.total, 2);
        assert!(summary.all_passed(), "{rule:?}: {summary:?}");
        assert!(reports.iter().all(|r| r.lhs > 0.0 && r.log_margin == r.log_rhs - r.log_lhs));
    }
    let (_, bad) = verify_bound(&hs, &cases, &Rule::Main, -1e4).unwrap();
    assert_eq!(bad.fail, 2);
    assert!(bad.min_log_margin < 0.0);

    let mut b = Breakdown::default();
    b.0.insert("only".into(), 1.0);
    assert_eq!(BoundReport::new(0, 1, 0.0, 1.0, "main", 0.0, b.clone(), 0.0).status, Status::VacuousPass);
    assert_eq!(BoundReport::new(0, 1, 0.0, 1.0, "main", 1.0f64.exp(), b.clone(), 0.0).status, Status::Pass);
    assert_eq!(BoundReport::new(0, 1, 0.0, 1.0, "main", 1.1f64.exp(), b.clone(), 0.0).status, Status::Fail);
    assert_eq!(BoundReport::new(0, 1, 0.0, 1.0, "main", (-600.0f64).exp(), b, 0.0).status, Status::VacuousPass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn zeta_shape(r in 0.0f64..100.0, dr in 0.0f64..10.0, t in 0.01f64..100.0, s in 0.1f64..3.0) {
        let (a, b, c) = (zeta(r, t, s).unwrap(), zeta(r + dr, t, s).unwrap(), zeta(r + 2.0 * dr, t, s).unwrap());
        prop_assert!(a >= 0.0 && a <= b * (1.0 + 1e-12) + 1e-300);
        prop_assert!(b <= 0.5 * (a + c) * (1.0 + 1e-10) + 1e-300);
        prop_assert!(zeta(r, t * 1.5, s).unwrap() <= a * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn davies_identity(r in 0.0f64..200.0, t in 0.01f64..100.0, s in 0.1f64..3.0) {
        let (_, f) = davies_exponent_optimizer(r, 2.0 * t, s).unwrap();
        let z = zeta(r, 2.0 * t, s).unwrap();
        prop_assert!((r / s * f + z).abs() <= 1e-10 * (1.0 + z));
    }

    #[test]
    fn optimizer_minimizes(theta in 0.01f64..50.0, eta in 0.0f64..8.0) {
        let (best, _) = davies_exponent_optimizer(theta, 1.0, 1.0).unwrap();
        prop_assert!(davies_objective(best, theta) <= davies_objective(eta, theta) + 1e-12);
    }

    #[test]
    fn poly_below_manifold(r in 0.0f64..1e3, t in 1e-3f64..1e4, n in 2.5f64..6.0) {
        prop_assert!(poly_correction(r, t, 1.0, n) <= manifold_poly_correction(r, t, n) * (1.0 + 1e-12));
    }
}
