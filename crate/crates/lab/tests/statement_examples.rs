//! Worked examples for every lab statement: trivial data, edge cases of the
//! preconditions, and the negative controls.

mod common;

use common::{cycle_params, delta, normalized_cycle, zero};
use hklab::geometry::Exponent;
use hklab::graph::{VertexFunction, VertexSet};
use hklab::metric::cutoff;
use hklab::semigroup::HeatSystem;
use hklab::{Error, Status};
use hklab_lab::davies::{check_davies_abstract, PhiChoice};
use hklab_lab::hypothesis::Hypothesis;
use hklab_lab::instances::{random_lipschitz, rng_for};
use hklab_lab::norms::normalized;
use hklab_lab::sample::{Recipe, SolutionSample};
use hklab_lab::subsolution::{
    check_caccioppoli, check_maximal_subsolution, check_parabolic_step, check_pointwise_claim, check_spacetime_iteration,
};
use hklab_lab::supersolution::{check_supersolution_maximal, check_time_iteration, check_time_iteration_step, MeasureSpace};

fn passes(r: &hklab::CheckReport) -> bool {
    matches!(r.status, Status::Pass | Status::VacuousPass)
}

#[test]
fn caccioppoli_vanishing_solution() {
    let (g, metric) = normalized_cycle(40);
    let hs = HeatSystem::build(&g).unwrap();
    let sample = SolutionSample::new(&hs, &zero(40), &zero(40), 0.0, (0.0, 5.0), Recipe::Exact).unwrap();
    let set = metric.ball(0, 8.0);
    let phi = cutoff(&g, &metric, &metric.ball(0, 3.0), 3.0).unwrap().phi;
    for r in check_caccioppoli(&g, &sample, &phi, &set, 2.0, &[0.5, 2.0, 5.0]).unwrap() {
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.passed());
    }
}

#[test]
fn caccioppoli_interior_cutoff_on_the_cycle() {
    let (g, metric) = normalized_cycle(40);
    let hs = HeatSystem::build(&g).unwrap();
    let sample = SolutionSample::new(&hs, &zero(40), &delta(40, 2), 0.0, (0.0, 5.0), Recipe::Damped { rate: 0.3 }).unwrap();
    let set = metric.ball(0, 8.0);
    let phi = cutoff(&g, &metric, &metric.ball(0, 3.0), 3.0).unwrap().phi;
    for p in [1.0, 2.0, 3.0] {
        for r in check_caccioppoli(&g, &sample, &phi, &set, p, &[0.1, 1.0, 4.0]).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
    }
}

#[test]
fn caccioppoli_rejects_cutoff_reaching_the_boundary() {
    let (g, metric) = normalized_cycle(40);
    let hs = HeatSystem::build(&g).unwrap();
    let sample = SolutionSample::new(&hs, &zero(40), &delta(40, 0), 0.0, (0.0, 5.0), Recipe::Exact).unwrap();
    let set = metric.ball(0, 4.0);
    let phi = VertexFunction::indicator_of(&set);
    let err = check_caccioppoli(&g, &sample, &phi, &set, 1.0, &[1.0]).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn caccioppoli_rejects_supersolutions() {
    let (g, metric) = normalized_cycle(20);
    let hs = HeatSystem::build(&g).unwrap();
    let sample = SolutionSample::new(&hs, &zero(20), &delta(20, 0), 0.0, (0.0, 5.0), Recipe::Ramp { slope: 0.1 }).unwrap();
    let set = metric.ball(0, 6.0);
    let phi = cutoff(&g, &metric, &metric.ball(0, 2.0), 2.0).unwrap().phi;
    assert!(check_caccioppoli(&g, &sample, &phi, &set, 1.0, &[1.0]).is_err());
}

#[test]
fn pointwise_claim_constant_solution() {
    let (g, _) = normalized_cycle(12);
    let hs = HeatSystem::build(&g).unwrap();
    let ones = VertexFunction::from_fn(12, |_| 1.0);
    let sample = SolutionSample::new(&hs, &zero(12), &ones, 0.0, (0.0, 1.0), Recipe::Exact).unwrap();
    let phi = VertexFunction::from_fn(12, |x| (x as f64 / 11.0).min(1.0));
    let pairs: Vec<(usize, usize)> = (0..12).map(|x| (x, (x + 1) % 12)).collect();
    for p in [1.0, 2.0] {
        let r = check_pointwise_claim(&sample, &phi, p, 0.5, &pairs).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn maximal_subsolution_on_cycle_60() {
    let (g, metric) = normalized_cycle(60);
    let hs = HeatSystem::build(&g).unwrap();
    for k in 0..20u64 {
        let mut rng = rng_for(1000 + k);
        let weight = random_lipschitz(&mut rng, &metric, 0.5).unwrap();
        let sample = SolutionSample::new(&hs, weight.omega(), &delta(60, (3 * k) as usize), 0.0, (0.0, 20.0), Recipe::Exact).unwrap();
        let r = check_maximal_subsolution(&g, &metric, &sample, 0, (4.0, 10.0), [1.0, 3.0, 12.0], 1.0 + (k % 3) as f64).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn maximal_subsolution_vanishing_and_degenerate_gap() {
    let (g, metric) = normalized_cycle(60);
    let hs = HeatSystem::build(&g).unwrap();
    let zero_sample = SolutionSample::new(&hs, &zero(60), &zero(60), 0.0, (0.0, 4.0), Recipe::Exact).unwrap();
    let r = check_maximal_subsolution(&g, &metric, &zero_sample, 0, (3.0, 6.0), [0.0, 1.0, 4.0], 1.0).unwrap();
    assert_eq!((r.lhs, r.rhs, r.status), (0.0, 0.0, Status::Pass));

    let sample = SolutionSample::new(&hs, &zero(60), &delta(60, 0), 0.0, (0.0, 4.0), Recipe::Exact).unwrap();
    let r = check_maximal_subsolution(&g, &metric, &sample, 0, (3.0, 4.0 + 1e-5), [0.0, 1.0, 4.0], 1.0).unwrap();
    assert!(r.passed());
    assert!(r.note.as_deref().unwrap_or("").contains("low-information"), "{r:?}");

    let err = check_maximal_subsolution(&g, &metric, &sample, 0, (3.0, 4.0), [0.0, 1.0, 4.0], 1.0).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
    let err = check_maximal_subsolution(&g, &metric, &sample, 0, (3.0, 6.0), [2.0, 1.0, 4.0], 1.0).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn parabolic_and_spacetime_vanishing_solution() {
    let (g, metric) = normalized_cycle(120);
    let hs = HeatSystem::build(&g).unwrap();
    let h = Hypothesis::Declared { c_s: 1.0, c_d: 2.0 };
    let sample = SolutionSample::new(&hs, &zero(120), &zero(120), 0.0, (0.0, 2048.0), Recipe::Exact).unwrap();
    let r = check_parabolic_step(&g, &metric, &sample, 0, [3.0, 8.0, 14.0], [10.0, 50.0, 100.0], 1.0, 3.0, &h).unwrap();
    assert_ne!(r.status, Status::Fail);
    assert_ne!(r.status, Status::Pass, "declared constants never pass");
    let r = check_spacetime_iteration(&g, &metric, &sample, 0, 32.0, 1024.0, 1.0, &cycle_params(), &h).unwrap();
    assert_ne!(r.status, Status::Fail);
    assert_ne!(r.status, Status::Pass);
}

fn cycle_space(n: usize) -> (hklab::Graph, VertexSet, Vec<f64>) {
    let (g, metric) = normalized_cycle(n);
    let set = metric.ball(0, 5.0);
    let mu = normalized(g.measures(), &set);
    (g, set, mu)
}

#[test]
fn supersolution_maximal_constant_function() {
    let (g, set, mu) = cycle_space(30);
    let hs = HeatSystem::build(&g).unwrap();
    let c = VertexFunction::from_fn(30, |_| 1.7);
    let sample = SolutionSample::new(&hs, &zero(30), &c, 0.0, (0.0, 4.0), Recipe::Exact).unwrap();
    let space = MeasureSpace { set: &set, mu: &mu };
    for s in [1.0, 2.5] {
        for p in [Exponent::Finite(2.0), Exponent::Infinite] {
            let r = check_supersolution_maximal(&g, &sample, &space, [0.5, 1.0, 2.0, 4.0], s, p).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!((r.lhs - 1.7f64.powf(s)).abs() < 1e-10 * r.lhs);
        }
    }
}

#[test]
fn supersolution_statements_reject_subsolutions() {
    let (g, set, mu) = cycle_space(30);
    let hs = HeatSystem::build(&g).unwrap();
    let sample = SolutionSample::new(&hs, &zero(30), &delta(30, 0), 0.0, (0.0, 4.0), Recipe::Damped { rate: 1.0 }).unwrap();
    let space = MeasureSpace { set: &set, mu: &mu };
    assert!(check_supersolution_maximal(&g, &sample, &space, [0.5, 1.0, 2.0, 4.0], 1.0, Exponent::Infinite).is_err());
    assert!(check_time_iteration(&g, &sample, &space, 0.5, 2.0, Exponent::Infinite, 1.5, 1).is_err());
}

#[test]
fn time_iteration_infinite_exponent() {
    let (g, set, mu) = cycle_space(60);
    let hs = HeatSystem::build(&g).unwrap();
    let space = MeasureSpace { set: &set, mu: &mu };
    for recipe in [Recipe::Exact, Recipe::Ramp { slope: 0.05 }] {
        let sample = SolutionSample::new(&hs, &zero(60), &delta(60, 1), 0.0, (0.0, 40.0), recipe).unwrap();
        let step = check_time_iteration_step(&g, &sample, &space, [5.0, 8.0, 12.0, 16.0], 1.0, Exponent::Infinite, 1.5).unwrap();
        assert!(passes(&step), "{step:?}");
        for k in 0..4 {
            let r = check_time_iteration(&g, &sample, &space, 0.5, 20.0, Exponent::Infinite, 1.5, k).unwrap();
            assert!(passes(&r), "{r:?}");
        }
    }
    let zero_sample = SolutionSample::new(&hs, &zero(60), &zero(60), 0.0, (0.0, 40.0), Recipe::Exact).unwrap();
    let r = check_time_iteration(&g, &zero_sample, &space, 0.5, 20.0, Exponent::Infinite, 1.5, 2).unwrap();
    assert!(passes(&r));
}

#[test]
fn time_iteration_rejects_beta_out_of_range() {
    let (g, set, mu) = cycle_space(30);
    let hs = HeatSystem::build(&g).unwrap();
    let space = MeasureSpace { set: &set, mu: &mu };
    let sample = SolutionSample::new(&hs, &zero(30), &delta(30, 0), 0.0, (0.0, 40.0), Recipe::Exact).unwrap();
    for (p, beta) in [(Exponent::Infinite, 2.0), (Exponent::Finite(2.0), 1.5), (Exponent::Infinite, 1.0)] {
        let err = check_time_iteration(&g, &sample, &space, 0.5, 20.0, p, beta, 1).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}

#[test]
fn davies_zero_weight_member() {
    let (g, metric) = normalized_cycle(16);
    let hs = HeatSystem::build(&g).unwrap();
    let phi = PhiChoice::Exact { windows: [(0.5, 1.5), (0.5, 1.5)] };
    let r = check_davies_abstract(&g, &hs, &metric, [0, 5], 1.0, &phi, &[0.0]).unwrap();
    assert!(r.passed(), "{r:?}");
}

#[test]
fn davies_kappa_search_beats_zero_weight() {
    let (g, metric) = normalized_cycle(30);
    let hs = HeatSystem::build(&g).unwrap();
    let phi = PhiChoice::Exact { windows: [(0.5, 1.5), (0.5, 1.5)] };
    let zero_only = check_davies_abstract(&g, &hs, &metric, [0, 10], 1.0, &phi, &[0.0]).unwrap();
    let grid = check_davies_abstract(&g, &hs, &metric, [0, 10], 1.0, &phi, &[0.0, 0.5, 1.0, 2.0, 4.0]).unwrap();
    assert!(grid.passed());
    assert!(grid.rhs < zero_only.rhs - 1.0, "{} vs {}", grid.rhs, zero_only.rhs);
    assert!(!grid.note.as_deref().unwrap_or("").starts_with("best kappa 0,"), "{:?}", grid.note);
}

#[test]
fn davies_rejects_negative_kappa() {
    let (g, metric) = normalized_cycle(10);
    let hs = HeatSystem::build(&g).unwrap();
    let phi = PhiChoice::Exact { windows: [(0.5, 1.5), (0.5, 1.5)] };
    assert!(check_davies_abstract(&g, &hs, &metric, [0, 3], 1.0, &phi, &[-1.0]).is_err());
    assert!(check_davies_abstract(&g, &hs, &metric, [0, 3], 1.0, &phi, &[]).is_err());
}
