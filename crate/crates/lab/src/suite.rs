//! Suite runner: dispatches statement ids to their checks.
//!
//! Statements that hold for all admissible data run on seeded random zoo
//! instances. Statements with geometric hypotheses run on the scenario graph
//! at its certified centers. Jobs are independent and run on the ambient
//! rayon pool; results come back in statement order.

use hklab::bounds::Rule;
use hklab::geometry::{kappa_theta, DimensionParams, Exponent};
use hklab::graph::VertexFunction;
use hklab::metric::{ball_interior_inclusion, is_intrinsic};
use hklab::semigroup::HeatSystem;
use hklab::{CheckReport, Error, Graph, Metric, Result, Status};
use rand::Rng;
use rayon::prelude::*;

use crate::davies::{check_davies_abstract, check_gaussian_bound, CenterCertificate, PhiChoice};
use crate::elementary::check_elementary;
use crate::hypothesis::Hypothesis;
use crate::instances::{self, rng_for};
use crate::mean_value::{check_mv2, pivot_grid};
use crate::norms::normalized;
use crate::sample::{Recipe, SolutionSample};
use crate::statements as st;
use crate::subsolution::{check_parabolic_step, check_spacetime_iteration};
use crate::supersolution::{check_time_iteration, check_time_iteration_step, random_interpolation, MeasureSpace};

/// Sizes of the randomized statements.
#[derive(Clone, Debug)]
pub struct RandomBudget {
    pub instances: usize,
    pub max_vertices: usize,
    pub elementary_draws: usize,
    pub interpolation_draws: usize,
    pub claim_draws: usize,
}

impl Default for RandomBudget {
    fn default() -> Self {
        RandomBudget { instances: 20, max_vertices: 30, elementary_draws: 100_000, interpolation_draws: 10_000, claim_draws: 10_000 }
    }
}

/// The scenario graph with its certified centers.
pub struct ScenarioContext<'a> {
    pub graph: &'a Graph,
    pub metric: &'a Metric,
    pub heat: &'a HeatSystem<f64>,
    pub params: DimensionParams<f64>,
    pub certificates: &'a [CenterCertificate],
    pub pairs: Vec<(usize, usize)>,
    pub times: Vec<f64>,
    pub rule: Rule<f64>,
    pub seed: u64,
    pub budget: RandomBudget,
}

/// Seed of instance `k` of a statement: FNV-1a of the id mixed with the base
/// seed, then offset by `k`.
pub fn instance_seed(base: u64, statement: &str, k: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in statement.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    (h ^ base).wrapping_add((k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// A random instance that could not be built becomes a failing report.
fn absorb(statement: &str, seed: u64, result: Result<Vec<CheckReport>>) -> Vec<CheckReport> {
    match result {
        Ok(r) => r,
        Err(e) => vec![CheckReport {
            status: Status::Fail,
            ..CheckReport::skipped(statement, format!("seed {seed}"), format!("instance error: {e}"))
        }
        .with_seed(seed)],
    }
}

fn seeded(statement: &str, ctx: &ScenarioContext<'_>, run: impl Fn(u64) -> Result<Vec<CheckReport>> + Sync) -> Vec<CheckReport> {
    (0..ctx.budget.instances)
        .into_par_iter()
        .map(|k| {
            let seed = instance_seed(ctx.seed, statement, k);
            absorb(statement, seed, run(seed))
        })
        .flatten()
        .collect()
}

/// Largest certified outer radius at each center.
fn outer_radius(c: &CenterCertificate) -> f64 {
    c.data.big_r.unwrap_or(c.sv.effective_r2)
}

/// Point-mass solution `P_t^ω δ_x` on `[0, 2R²]` with `ω ≡ 0`.
fn point_sample<'h>(hs: &'h HeatSystem<f64>, g: &Graph, x: usize, horizon: f64) -> Result<SolutionSample<'h>> {
    let zero = VertexFunction::zeros(g.len());
    SolutionSample::new(hs, &zero, &VertexFunction::indicator(g.len(), x), 0.0, (0.0, horizon), Recipe::Exact)
}

fn per_center(
    ctx: &ScenarioContext<'_>,
    statement: &str,
    run: impl Fn(&CenterCertificate) -> Result<CheckReport> + Sync,
) -> Result<Vec<CheckReport>> {
    if ctx.certificates.is_empty() {
        return Ok(vec![CheckReport::skipped(statement, "scenario", "no certified centers")]);
    }
    ctx.certificates.par_iter().map(&run).collect()
}

/// Runs one statement. Errors are configuration or hypothesis failures of
/// the scenario; random instances never abort the run.
pub fn run_statement(id: &str, ctx: &ScenarioContext<'_>) -> Result<Vec<CheckReport>> {
    let g = ctx.graph;
    let metric = ctx.metric;
    let b = &ctx.budget;
    let mv = b.max_vertices;
    let reports = match id {
        st::ELEMENTARY_CONVEXITY | st::ELEMENTARY_CROSS | st::ELEMENTARY_SUM => {
            check_elementary(&[0.6, 1.0, 2.0, 7.5], b.elementary_draws, ctx.seed).into_iter().filter(|r| r.statement == id).collect()
        }
        st::BALL_INTERIOR => {
            let s = metric.jump_size();
            let mut out = Vec::new();
            for c in ctx.certificates {
                let x = c.data.vertex();
                for k in 1..=8 {
                    out.push(ball_interior_inclusion(g, metric, x, s * k as f64 * 1.5));
                }
            }
            out
        }
        st::INTRINSIC_INEQUALITY => is_intrinsic(g, metric.matrix()),
        st::CACCIOPPOLI => seeded(id, ctx, |seed| instances::random_caccioppoli(seed, mv, 1.0 + (seed % 3) as f64)),
        st::POINTWISE_CLAIM => {
            let mut out = instances::random_pointwise_claims(b.claim_draws, ctx.seed, &[1.0, 1.5, 2.0, 3.0]);
            out.extend(seeded(id, ctx, |seed| Ok(vec![instances::random_pointwise_on_graph(seed, mv, 1.0 + (seed % 3) as f64)?])));
            out
        }
        st::SUBSOLUTION_MAXIMAL => seeded(id, ctx, |seed| instances::random_maximal_subsolution(seed, mv, 1.0 + (seed % 3) as f64)),
        st::SUPERSOLUTION_MAXIMAL => seeded(id, ctx, |seed| instances::random_supersolution_maximal(seed, mv)),
        st::INTERPOLATION => vec![random_interpolation(b.interpolation_draws, ctx.seed)],
        st::INTEGRATED_MAX_PRINCIPLE => seeded(id, ctx, |seed| Ok(vec![instances::random_max_principle(seed, mv)?])),
        st::MEAN_VALUE_PIVOT => pivot_grid(
            metric.jump_size(),
            &[ctx.params.n, 3.0, 4.0, 10.0],
            &[ctx.params.p, Exponent::Infinite, Exponent::Finite(2.0)],
            &[1.0, 1.5, 2.0, 4.0, 10.0],
        )?,
        st::DAVIES_ABSTRACT => seeded(id, ctx, |seed| random_davies_abstract(seed, mv.min(16))),
        st::PARABOLIC_STEP => per_center(ctx, id, |c| {
            let x = c.data.vertex();
            let (r, big) = (c.data.r, outer_radius(c));
            let s = metric.jump_size();
            let r2 = (r + big) / 2.0;
            let radii = [(r2 - s) / 2.0, r2, big];
            let horizon = big * big;
            let sample = point_sample(ctx.heat, g, x, horizon)?;
            let times = [0.25 * horizon, 0.5 * horizon, horizon];
            check_parabolic_step(g, metric, &sample, x, radii, times, 1.0, ctx.params.n, &Hypothesis::Certified(&c.sv))
        })?,
        st::SPACETIME_ITERATION => per_center(ctx, id, |c| {
            let x = c.data.vertex();
            let big = outer_radius(c);
            let sample = point_sample(ctx.heat, g, x, 2.0 * big * big)?;
            check_spacetime_iteration(g, metric, &sample, x, big, big * big, 1.0, &ctx.params, &Hypothesis::Certified(&c.sv))
        })?,
        st::MEAN_VALUE => per_center(ctx, id, |c| {
            let x = c.data.vertex();
            let big = outer_radius(c);
            let sample = point_sample(ctx.heat, g, x, 2.0 * big * big)?;
            check_mv2(g, metric, &sample, x, big, 1.0, big * big, &ctx.params, &Hypothesis::Certified(&c.sv))
        })?,
        st::TIME_ITERATION_STEP | st::TIME_ITERATION => per_center(ctx, id, |c| {
            let x = c.data.vertex();
            let big = outer_radius(c);
            let set = metric.ball(x, big / 2.0);
            let mu = normalized(g.measures(), &set);
            let space = MeasureSpace { set: &set, mu: &mu };
            let t = big * big;
            let sample = point_sample(ctx.heat, g, x, 2.0 * t)?;
            let beta = ctx.params.beta();
            if id == st::TIME_ITERATION {
                let (k, _) = kappa_theta(big / 2.0, metric.jump_size(), beta);
                check_time_iteration(g, &sample, &space, 0.5, t, ctx.params.p, beta, k)
            } else {
                check_time_iteration_step(g, &sample, &space, [0.5 * t, 0.75 * t, 1.25 * t, 1.5 * t], 2.0, ctx.params.p, beta)
            }
        })?,
        st::DAVIES_GAUSSIAN | st::GAUSSIAN_BOUND => {
            if ctx.certificates.is_empty() || ctx.times.is_empty() {
                vec![CheckReport::skipped(id, "scenario", "no certified centers or times")]
            } else {
                let rule = if id == st::DAVIES_GAUSSIAN { Rule::Davies } else { ctx.rule.clone() };
                check_gaussian_bound(g, ctx.heat, metric, ctx.certificates, &ctx.pairs, &ctx.times, &rule, 0.0)?.0
            }
        }
        other => return Err(Error::Precondition(format!("unknown statement `{other}`"))),
    };
    Ok(reports)
}

/// Exact-φ Davies lemma on a small random instance with a random window.
pub fn random_davies_abstract(seed: u64, max_vertices: usize) -> Result<Vec<CheckReport>> {
    let mut rng = rng_for(seed);
    let inst = instances::random_instance(&mut rng, max_vertices)?;
    let (g, metric) = (&inst.graph, &inst.metric);
    let hs = HeatSystem::build(g)?;
    let active = hs.active();
    let x1 = active[rng.random_range(0..active.len())];
    let x2 = active[rng.random_range(0..active.len())];
    let t = rng.random_range(0.2..5.0);
    let w = rng.random_range(0.05..1.0) * t;
    let phi = PhiChoice::Exact { windows: [(t - w, t + w), (t - w, t + w)] };
    Ok(vec![check_davies_abstract(g, &hs, metric, [x1, x2], t, &phi, &[0.0, 0.25, 0.5, 1.0, 2.0])?.with_seed(seed)])
}

/// Runs `ids` in parallel; results keep the order of `ids`.
pub fn run_suite(ids: &[String], ctx: &ScenarioContext<'_>) -> Vec<(String, Result<Vec<CheckReport>>)> {
    ids.par_iter().map(|id| (id.clone(), run_statement(id, ctx))).collect()
}
