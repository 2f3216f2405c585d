//! The assembled Gaussian bound against exact kernels, the suite runner's
//! determinism, and conditional soundness of the harness.

mod common;

use common::{certify, cycle_params, delta, normalized_cycle, zero};
use hklab::bounds::Rule;
use hklab::geometry::{DimensionParams, Exponent, SobolevBudget, SobolevTargets};
use hklab::metric::default_intrinsic_metric;
use hklab::semigroup::HeatSystem;
use hklab::zoo::{antitree_dimension, Family, GeneratorSpec, MeasureChoice};
use hklab::{Graph, Status};
use hklab_lab::davies::{certify_center, check_gaussian_bound, CenterCertificate};
use hklab_lab::hypothesis::Hypothesis;
use hklab_lab::sample::{Recipe, SolutionSample};
use hklab_lab::statements;
use hklab_lab::subsolution::{check_parabolic_step, check_spacetime_iteration};
use hklab_lab::suite::{run_statement, RandomBudget, ScenarioContext};
use proptest::prelude::*;

fn cycle_centers(g: &Graph, metric: &hklab::Metric, xs: &[usize]) -> Vec<CenterCertificate> {
    xs.iter().map(|&x| certify(g, metric, x, 42.0, 150.0)).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| match k {
            0 => a,
            k if k == n - 1 => b,
            k => a * (b / a).powf(k as f64 / (n - 1) as f64),
        })
        .collect()
}

#[test]
fn normalized_cycle_end_to_end() {
    let (g, metric) = normalized_cycle(300);
    let hs = HeatSystem::build(&g).unwrap();
    let centers = cycle_centers(&g, &metric, &[0, 75, 150]);
    assert!(centers.iter().all(|c| c.sv.passed()));
    let pairs = [(0, 0), (0, 1), (0, 2), (1, 2)];
    let times = logspace(8.0 * 42.0 * 42.0, 800.0 * 42.0 * 42.0, 5);
    for rule in [Rule::Normalized, Rule::Main, Rule::Davies] {
        let (reports, bounds, summary) = check_gaussian_bound(&g, &hs, &metric, &centers, &pairs, &times, &rule, 0.0).unwrap();
        assert_eq!(reports.len(), 20);
        assert_eq!(bounds.len(), 20);
        assert_eq!(summary.fail, 0, "{summary:?}");
        assert!(reports.iter().all(|r| r.passed()));
    }
}

#[test]
fn corrupted_constant_fails() {
    let (g, metric) = normalized_cycle(300);
    let hs = HeatSystem::build(&g).unwrap();
    let centers = cycle_centers(&g, &metric, &[0, 150]);
    let times = [14112.0, 100000.0];
    let (reports, _, summary) = check_gaussian_bound(&g, &hs, &metric, &centers, &[(0, 1)], &times, &Rule::Normalized, -1e4).unwrap();
    assert_eq!(summary.fail, 2);
    assert!(reports.iter().all(|r| r.status == Status::Fail));
}

#[test]
fn truncated_antitree_reports() {
    let spec = GeneratorSpec::new(Family::Antitree { gamma: 1.0, spheres: 42, truncate: true }, MeasureChoice::Normalizing);
    let g: Graph = spec.generate().unwrap();
    let metric = default_intrinsic_metric(&g, 1.0).unwrap();
    let hs = HeatSystem::build(&g).unwrap();
    let params = DimensionParams::new(3.0, antitree_dimension(1.0), Exponent::Infinite).unwrap();
    let center = certify_center(&g, &metric, 0, params, 36.0, None, SobolevTargets::default(), &SobolevBudget::default()).unwrap();
    let times = [8.0 * 36.0 * 36.0, 4e4];
    let (reports, _, summary) = check_gaussian_bound(&g, &hs, &metric, &[center], &[(0, 0)], &times, &Rule::Main, 0.0).unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(summary.fail, 0, "{summary:?}");
    assert!(reports.iter().all(|r| r.status != Status::Fail));
}

fn context<'a>(
    g: &'a Graph,
    metric: &'a hklab::Metric,
    hs: &'a HeatSystem<f64>,
    certs: &'a [CenterCertificate],
    seed: u64,
) -> ScenarioContext<'a> {
    ScenarioContext {
        graph: g,
        metric,
        heat: hs,
        params: cycle_params(),
        certificates: certs,
        pairs: vec![(0, 0)],
        times: vec![14112.0],
        rule: Rule::Normalized,
        seed,
        budget: RandomBudget { instances: 3, max_vertices: 16, elementary_draws: 2000, interpolation_draws: 500, claim_draws: 500 },
    }
}

#[test]
fn suite_is_deterministic() {
    let (g, metric) = normalized_cycle(300);
    let hs = HeatSystem::build(&g).unwrap();
    let certs = cycle_centers(&g, &metric, &[0]);
    let random_ids = [
        statements::ELEMENTARY_SUM,
        statements::CACCIOPPOLI,
        statements::POINTWISE_CLAIM,
        statements::SUBSOLUTION_MAXIMAL,
        statements::SUPERSOLUTION_MAXIMAL,
        statements::INTERPOLATION,
        statements::INTEGRATED_MAX_PRINCIPLE,
        statements::DAVIES_ABSTRACT,
        statements::GAUSSIAN_BOUND,
    ];
    for id in random_ids {
        let a = run_statement(id, &context(&g, &metric, &hs, &certs, 11)).unwrap();
        let b = run_statement(id, &context(&g, &metric, &hs, &certs, 11)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.lhs.to_bits(), y.lhs.to_bits(), "{id}");
            assert_eq!(x.rhs.to_bits(), y.rhs.to_bits(), "{id}");
            assert_eq!(x.instance, y.instance);
            assert_eq!(x.seed, y.seed);
        }
        assert!(a.iter().all(|r| r.status != Status::Fail), "{id}: {a:?}");
    }
}

#[test]
fn every_statement_runs_on_the_scenario() {
    let (g, metric) = normalized_cycle(300);
    let hs = HeatSystem::build(&g).unwrap();
    let certs = cycle_centers(&g, &metric, &[0]);
    let ctx = context(&g, &metric, &hs, &certs, 3);
    for id in statements::ALL {
        let reports = run_statement(id, &ctx).unwrap();
        assert!(!reports.is_empty(), "{id}");
        for r in &reports {
            assert_eq!(r.statement, *id);
            assert!(matches!(r.status, Status::Pass | Status::VacuousPass | Status::Skipped), "{id}: {r:?}");
        }
    }
    assert!(run_statement("no-such-statement", &ctx).is_err());
}

#[test]
fn uncertified_geometry_never_passes() {
    let (g, metric) = normalized_cycle(300);
    let hs = HeatSystem::build(&g).unwrap();
    let targets = SobolevTargets { c_s: Some(1e-9), c_d: None };
    let cert = certify_center(&g, &metric, 0, cycle_params(), 42.0, Some(150.0), targets, &SobolevBudget::default()).unwrap();
    assert!(!cert.sv.passed());
    let (reports, _, _) =
        check_gaussian_bound(&g, &hs, &metric, std::slice::from_ref(&cert), &[(0, 0)], &[14112.0], &Rule::Normalized, 0.0).unwrap();
    assert!(reports.iter().all(|r| r.status != Status::Pass && r.status != Status::VacuousPass));
    let sample = SolutionSample::new(&hs, &zero(300), &delta(300, 0), 0.0, (0.0, 2.0 * 150.0 * 150.0), Recipe::Exact).unwrap();
    let err = check_spacetime_iteration(&g, &metric, &sample, 0, 150.0, 22500.0, 1.0, &cycle_params(), &Hypothesis::Certified(&cert.sv));
    assert!(err.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn declared_constants_never_pass(c_s in 1e-3f64..1e3, c_d in 1.0f64..1e3) {
        let (g, metric) = normalized_cycle(40);
        let hs = HeatSystem::build(&g).unwrap();
        let sample = SolutionSample::new(&hs, &zero(40), &delta(40, 0), 0.0, (0.0, 100.0), Recipe::Exact).unwrap();
        let h = Hypothesis::Declared { c_s, c_d };
        let r = check_parabolic_step(&g, &metric, &sample, 0, [3.0, 8.0, 14.0], [10.0, 50.0, 100.0], 1.5, 3.0, &h).unwrap();
        prop_assert!(r.status != Status::Pass && r.status != Status::VacuousPass);
    }

    #[test]
    fn larger_constants_never_shrink_the_rhs(c_s in 1e-3f64..1e3, c_d in 1.0f64..1e3, factor in 1.0f64..100.0) {
        let (g, metric) = normalized_cycle(120);
        let hs = HeatSystem::build(&g).unwrap();
        let sample = SolutionSample::new(&hs, &zero(120), &delta(120, 0), 0.0, (0.0, 2048.0), Recipe::Exact).unwrap();
        let parabolic = |c_s: f64, c_d: f64| {
            let h = Hypothesis::Declared { c_s, c_d };
            check_parabolic_step(&g, &metric, &sample, 0, [3.0, 8.0, 14.0], [10.0, 50.0, 100.0], 1.0, 3.0, &h).unwrap().rhs
        };
        let spacetime = |c_s: f64, c_d: f64| {
            let h = Hypothesis::Declared { c_s, c_d };
            check_spacetime_iteration(&g, &metric, &sample, 0, 32.0, 1024.0, 1.0, &cycle_params(), &h).unwrap().rhs
        };
        prop_assert!(parabolic(c_s * factor, c_d) >= parabolic(c_s, c_d));
        prop_assert!(spacetime(c_s * factor, c_d) >= spacetime(c_s, c_d));
        prop_assert!(spacetime(c_s, c_d * factor) >= spacetime(c_s, c_d));
    }
}
