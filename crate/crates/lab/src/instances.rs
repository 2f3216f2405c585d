//! Seeded random instances for the lab statements. Each runner draws one
//! complete instance from its seed, audits the sample, and returns the
//! reports; equal seeds give bit-identical reports.

use hklab::geometry::Exponent;
use hklab::graph::{VertexFunction, VertexSet};
use hklab::metric::{cutoff, default_intrinsic_metric};
use hklab::semigroup::{phi_monotone, HeatSystem};
use hklab::zoo::{Family, GeneratorSpec, MeasureChoice, WeightDist};
use hklab::{CheckReport, Graph, Metric, Result, Status, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sample::{Recipe, SolutionSample};
use crate::statements::POINTWISE_CLAIM;
use crate::subsolution::{check_caccioppoli, check_maximal_subsolution, check_pointwise_claim, pointwise_claim_sides, tightest};
use crate::supersolution::{check_supersolution_maximal, MeasureSpace};

/// Time points per sample audit.
pub const AUDIT_POINTS: usize = 9;

/// A graph with its default intrinsic metric.
pub struct Instance {
    pub spec: GeneratorSpec,
    pub graph: Graph,
    pub metric: Metric,
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws a zoo graph with at most `max_vertices` vertices (at least 4).
pub fn random_spec(rng: &mut ChaCha8Rng, max_vertices: usize) -> GeneratorSpec {
    let max = max_vertices.max(4);
    let family = match rng.random_range(0..6) {
        0 => Family::Path { n: rng.random_range(4..=max), dirichlet_ends: rng.random_bool(0.3) },
        1 => Family::Cycle { n: rng.random_range(3..=max) },
        2 => {
            let w = rng.random_range(2..=(max / 2).max(2));
            let h = rng.random_range(2..=(max / w).max(2));
            Family::LatticeBox { w, h, dirichlet_frame: w >= 3 && h >= 3 && rng.random_bool(0.3) }
        }
        3 => Family::Complete { n: rng.random_range(2..=max.min(12)) },
        4 => {
            let gamma = rng.random_range(0.3..1.7);
            let mut spheres = 2;
            while spheres < 40 && hklab::zoo::antitree_sphere_sizes(gamma, spheres + 1).iter().sum::<usize>() <= max {
                spheres += 1;
            }
            Family::Antitree { gamma, spheres, truncate: spheres >= 3 && rng.random_bool(0.3) }
        }
        _ => Family::RandomWeighted {
            n: rng.random_range(4..=max),
            edge_prob: rng.random_range(0.2..0.6),
            weight: WeightDist::Uniform { lo: 0.2, hi: 2.0 },
        },
    };
    let measure = match rng.random_range(0..3) {
        0 => MeasureChoice::Counting,
        1 => MeasureChoice::Normalizing,
        _ => MeasureChoice::Uniform { lo: 0.5, hi: 2.0 },
    };
    GeneratorSpec::new(family, measure).with_seed(rng.random())
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_vertices: usize) -> Result<Instance> {
    let spec = random_spec(rng, max_vertices);
    let graph: Graph = spec.generate()?;
    let metric = default_intrinsic_metric(&graph, 1.0)?;
    Ok(Instance { spec, graph, metric })
}

/// `ω = κ(ρ(z₁,·) − ρ(z₂,·))/2`, which is κ-Lipschitz.
pub fn random_lipschitz(rng: &mut ChaCha8Rng, metric: &Metric, kappa_max: f64) -> Result<Weight> {
    let n = metric.len();
    let (z1, z2) = (rng.random_range(0..n), rng.random_range(0..n));
    let kappa = rng.random_range(0.0..=kappa_max);
    let omega = VertexFunction::from_fn(n, |y| kappa * (metric.dist(z1, y) - metric.dist(z2, y)) / 2.0);
    Weight::new(metric, omega, kappa)
}

/// Nonnegative datum: a point mass, a ball indicator, or random values.
pub fn random_datum(rng: &mut ChaCha8Rng, metric: &Metric) -> VertexFunction<f64> {
    let n = metric.len();
    let z = rng.random_range(0..n);
    match rng.random_range(0..3) {
        0 => VertexFunction::indicator(n, z),
        1 => {
            let r = rng.random_range(0.0..=metric.eccentricity(z));
            VertexFunction::indicator_of(&metric.ball(z, r))
        }
        _ => VertexFunction::from_fn(n, |_| if rng.random_bool(0.3) { 0.0 } else { rng.random::<f64>() }),
    }
}

/// Datum for which the solution starts at sup-norm about one on active
/// vertices; keeps absolute tolerances meaningful under large `e^ω`.
fn normalized_datum(hs: &HeatSystem<f64>, omega: &VertexFunction<f64>, f: VertexFunction<f64>, t0: f64) -> Result<VertexFunction<f64>> {
    let v = hs.evolution(Some(omega), &f)?.at(t0);
    let scale = hs.active().iter().map(|&x| v[x].abs()).fold(0.0, f64::max);
    Ok(if scale > 0.0 { f.scale(scale.recip()) } else { f })
}

/// Sorted uniform draws in `[a, b]`.
fn sorted_times<const N: usize>(rng: &mut ChaCha8Rng, a: f64, b: f64) -> [f64; N] {
    let mut t = [0.0; N];
    for v in &mut t {
        *v = rng.random_range(a..b);
    }
    t.sort_by(f64::total_cmp);
    t
}

fn failed_audit(audit: CheckReport) -> Option<Vec<CheckReport>> {
    (audit.status == Status::Fail).then(|| vec![audit])
}

/// One random Caccioppoli instance on a graph with at most `max_vertices`.
pub fn random_caccioppoli(seed: u64, max_vertices: usize, p: f64) -> Result<Vec<CheckReport>> {
    let mut rng = rng_for(seed);
    let inst = random_instance(&mut rng, max_vertices)?;
    let (g, metric) = (&inst.graph, &inst.metric);
    let hs = HeatSystem::build(g)?;
    let weight = random_lipschitz(&mut rng, metric, 1.0)?;
    let s = metric.jump_size();
    let x = rng.random_range(0..g.len());
    let r2 = rng.random_range(1.5 * s..=(metric.eccentricity(x) + 2.0 * s));
    let r1 = rng.random_range(0.0..=0.7) * (r2 - s);
    let set = metric.ball(x, r2);
    let cut = cutoff(g, metric, &metric.ball(x, r1), r2 - r1 - s)?;
    let shift = rng.random_range(0.0..1.0);
    let f = normalized_datum(&hs, weight.omega(), random_datum(&mut rng, metric), shift)?;
    let recipe = if rng.random_bool(0.5) { Recipe::Exact } else { Recipe::Damped { rate: rng.random_range(0.0..1.0) } };
    let sample = SolutionSample::new(&hs, weight.omega(), &f, shift, (0.0, 2.0), recipe)?;
    if let Some(r) = failed_audit(sample.audit(g, &VertexSet::full(g.len()), AUDIT_POINTS)) {
        return Ok(r);
    }
    let times: [f64; 5] = sorted_times(&mut rng, 0.0, 2.0);
    let reports = check_caccioppoli(g, &sample, &cut.phi, &set, p, &times)?;
    Ok(reports.into_iter().map(|r| r.with_seed(seed)).collect())
}

/// `count` draws of `(ψ, φ, v)` per pair, with `ψ > 0`, `φ ∈ [0, 1]`, `v ≥ 0`.
pub fn random_pointwise_claims(count: usize, seed: u64, p_grid: &[f64]) -> Vec<CheckReport> {
    p_grid
        .iter()
        .map(|&p| {
            let mut rng = rng_for(seed);
            rng.set_stream(p.to_bits());
            let triples = (0..count).map(|_| {
                let pos = |rng: &mut ChaCha8Rng| 10f64.powf(rng.random_range(-2.0..2.0));
                let psi = (pos(&mut rng), pos(&mut rng));
                let phi = (rng.random::<f64>(), rng.random::<f64>());
                let v = if rng.random_bool(0.1) {
                    let c = pos(&mut rng);
                    (c, c)
                } else {
                    (pos(&mut rng), pos(&mut rng))
                };
                pointwise_claim_sides(psi, phi, v, p)
            });
            tightest(POINTWISE_CLAIM, format!("random draws={count} p={p}"), triples).with_seed(seed)
        })
        .collect()
}

/// The pointwise claim on every edge of a random instance.
pub fn random_pointwise_on_graph(seed: u64, max_vertices: usize, p: f64) -> Result<CheckReport> {
    let mut rng = rng_for(seed);
    let inst = random_instance(&mut rng, max_vertices)?;
    let (g, metric) = (&inst.graph, &inst.metric);
    let hs = HeatSystem::build(g)?;
    let weight = random_lipschitz(&mut rng, metric, 1.0)?;
    let f = random_datum(&mut rng, metric);
    let sample = SolutionSample::new(&hs, weight.omega(), &f, 0.0, (0.0, 1.0), Recipe::Exact)?;
    let x = rng.random_range(0..g.len());
    let cut = cutoff(g, metric, &metric.ball(x, 0.0), metric.eccentricity(x).max(metric.jump_size()))?;
    let pairs: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    Ok(check_pointwise_claim(&sample, &cut.phi, p, rng.random_range(0.05..1.0), &pairs)?.with_seed(seed))
}

/// One random instance of the maximal inequality for subsolutions.
pub fn random_maximal_subsolution(seed: u64, max_vertices: usize, p: f64) -> Result<Vec<CheckReport>> {
    let mut rng = rng_for(seed);
    let inst = random_instance(&mut rng, max_vertices)?;
    let (g, metric) = (&inst.graph, &inst.metric);
    let hs = HeatSystem::build(g)?;
    let weight = random_lipschitz(&mut rng, metric, 1.0)?;
    let s = metric.jump_size();
    let x = rng.random_range(0..g.len());
    let r2 = rng.random_range(1.5 * s..=(metric.eccentricity(x) + 2.0 * s));
    let r1 = rng.random_range(0.0..=0.7) * (r2 - s);
    let shift = rng.random_range(0.0..0.5);
    let f = normalized_datum(&hs, weight.omega(), random_datum(&mut rng, metric), shift)?;
    let recipe = if rng.random_bool(0.5) { Recipe::Exact } else { Recipe::Damped { rate: rng.random_range(0.0..1.0) } };
    let sample = SolutionSample::new(&hs, weight.omega(), &f, shift, (0.0, 3.0), recipe)?;
    if let Some(r) = failed_audit(sample.audit(g, &VertexSet::full(g.len()), AUDIT_POINTS)) {
        return Ok(r);
    }
    let times: [f64; 3] = sorted_times(&mut rng, 0.0, 3.0);
    Ok(vec![check_maximal_subsolution(g, metric, &sample, x, (r1, r2), times, p)?.with_seed(seed)])
}

fn random_exponent(rng: &mut ChaCha8Rng) -> Exponent<f64> {
    match rng.random_range(0..4) {
        0 => Exponent::Infinite,
        1 => Exponent::Finite(1.0),
        2 => Exponent::Finite(2.0),
        _ => Exponent::Finite(rng.random_range(1.1..6.0)),
    }
}

/// One random instance of the supersolution maximal inequality on a ball
/// with a random positive `μ`.
pub fn random_supersolution_maximal(seed: u64, max_vertices: usize) -> Result<Vec<CheckReport>> {
    let mut rng = rng_for(seed);
    let inst = random_instance(&mut rng, max_vertices)?;
    let (g, metric) = (&inst.graph, &inst.metric);
    let hs = HeatSystem::build(g)?;
    let weight = random_lipschitz(&mut rng, metric, 1.0)?;
    let x = rng.random_range(0..g.len());
    let set = metric.ball(x, rng.random_range(0.0..=metric.eccentricity(x)));
    let mu: Vec<f64> = match rng.random_range(0..3) {
        0 => g.measures().to_vec(),
        1 => crate::norms::normalized(g.measures(), &set),
        _ => (0..g.len()).map(|_| 10f64.powf(rng.random_range(-1.0..1.0))).collect(),
    };
    let shift = rng.random_range(0.0..0.5);
    let f = normalized_datum(&hs, weight.omega(), random_datum(&mut rng, metric), shift)?;
    let recipe = if rng.random_bool(0.5) { Recipe::Exact } else { Recipe::Ramp { slope: rng.random_range(0.0..1.0) } };
    let sample = SolutionSample::new(&hs, weight.omega(), &f, shift, (0.0, 3.0), recipe)?;
    if let Some(r) = failed_audit(sample.audit(g, &VertexSet::full(g.len()), AUDIT_POINTS)) {
        return Ok(r);
    }
    let mut times: [f64; 4] = sorted_times(&mut rng, 0.0, 3.0);
    if times[3] == times[2] {
        times[3] = 3.0;
    }
    let s = if rng.random_bool(0.2) { 1.0 } else { rng.random_range(1.0..4.0) };
    let p = random_exponent(&mut rng);
    let space = MeasureSpace { set: &set, mu: &mu };
    Ok(vec![check_supersolution_maximal(g, &sample, &space, times, s, p)?.with_seed(seed)])
}

/// Monotonicity of the weighted `ℓ²` energy on a 50-point grid.
pub fn random_max_principle(seed: u64, max_vertices: usize) -> Result<CheckReport> {
    let mut rng = rng_for(seed);
    let inst = random_instance(&mut rng, max_vertices)?;
    let (g, metric) = (&inst.graph, &inst.metric);
    let hs = HeatSystem::build(g)?;
    let weight = random_lipschitz(&mut rng, metric, 2.0)?;
    let f = random_datum(&mut rng, metric);
    let horizon = rng.random_range(1.0..10.0);
    let grid: Vec<f64> = (1..=50).map(|k| horizon * k as f64 / 50.0).collect();
    Ok(phi_monotone(&hs, metric, &weight, &f, &grid)?.with_seed(seed))
}
