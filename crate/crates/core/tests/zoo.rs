use hklab::graph::RawGraph;
use hklab::semigroup::HeatSystem;
use hklab::zoo::{antitree, antitree_dimension, antitree_sphere_sizes, Family, GeneratorSpec, MeasureChoice, WeightDist};
use hklab::{Error, Graph};
use proptest::prelude::*;

fn generate(family: Family, measure: MeasureChoice) -> Graph {
    GeneratorSpec::new(family, measure).generate().unwrap()
}

/// Rebuilds the graph through the validating raw builder.
fn revalidate(g: &Graph) {
    let mut raw = RawGraph::new();
    for x in 0..g.len() {
        raw.add_vertex(g.id(x), g.measure(x));
        if g.is_dirichlet(x) {
            raw.set_dirichlet(x);
        }
    }
    for e in g.edges() {
        raw.add_edge(e.u, e.v, e.weight);
    }
    assert!(raw.validate().is_empty(), "{:?}", raw.validate());
}

#[test]
fn antitree_structure() {
    assert_eq!(antitree_sphere_sizes(1.0, 6), vec![1, 1, 2, 3, 4, 5]);
    assert_eq!(antitree_sphere_sizes(0.5, 10), vec![1, 1, 1, 1, 2, 2, 2, 2, 2, 3]);
    assert_eq!(antitree_dimension(1.0), 4.0);
    let sizes = antitree_sphere_sizes(1.0, 8);
    let g: Graph = antitree(1.0, 8, MeasureChoice::Counting, false).unwrap();
    assert_eq!(g.len(), sizes.iter().sum::<usize>());
    let mut offset = 0;
    for (k, &s) in sizes.iter().enumerate() {
        let below = if k > 0 { sizes[k - 1] } else { 0 };
        let above = sizes.get(k + 1).copied().unwrap_or(0);
        for j in 0..s {
            let x = offset + j;
            assert_eq!(g.id(x), format!("{k}.{j}"));
            assert_eq!(g.deg(x).unwrap(), (below + above) as f64);
        }
        offset += s;
    }
    for gamma in [0.0, 2.0, -1.0] {
        assert!(matches!(antitree::<f64>(gamma, 5, MeasureChoice::Counting, false), Err(Error::Precondition(_))));
    }
    let truncated: Graph = antitree(1.0, 8, MeasureChoice::Normalizing, true).unwrap();
    let last = truncated.len() - sizes[7];
    assert!((last..truncated.len()).all(|x| truncated.is_dirichlet(x)));
    assert!((0..last).all(|x| !truncated.is_dirichlet(x)));
}

#[test]
fn simple_families() {
    let c = generate(Family::Cycle { n: 5 }, MeasureChoice::Counting);
    assert!((0..5).all(|x| c.deg(x).unwrap() == 2.0));
    let k = generate(Family::Complete { n: 6 }, MeasureChoice::Counting);
    assert_eq!(k.edges().len(), 15);
    let l = generate(Family::LatticeBox { w: 4, h: 3, dirichlet_frame: true }, MeasureChoice::Counting);
    assert_eq!(l.edges().len(), 3 * 3 + 4 * 2);
    assert_eq!((0..12).filter(|&x| l.is_dirichlet(x)).count(), 10);
    assert_eq!(l.id(5), "1,1");
    let p = generate(Family::Path { n: 300, dirichlet_ends: true }, MeasureChoice::Normalizing);
    assert!(p.is_dirichlet(0) && p.is_dirichlet(299));
    assert!(HeatSystem::build(&p).unwrap().lambda_bottom() > 0.0);
    assert!(GeneratorSpec::new(Family::Cycle { n: 2 }, MeasureChoice::Counting).generate::<f64>().is_err());
    assert!(GeneratorSpec::new(Family::Path { n: 4, dirichlet_ends: false }, MeasureChoice::Custom { values: vec![1.0; 3] })
        .generate::<f64>()
        .is_err());
}

#[test]
fn dirichlet_beyond_hops() {
    let mut spec = GeneratorSpec::new(Family::Path { n: 10, dirichlet_ends: false }, MeasureChoice::Counting);
    spec.dirichlet_beyond = Some(7);
    let g: Graph = spec.generate().unwrap();
    assert_eq!((0..10).filter(|&x| g.is_dirichlet(x)).collect::<Vec<_>>(), vec![7, 8, 9]);
}

#[test]
fn seeded_generation_is_reproducible() {
    let spec = GeneratorSpec::new(
        Family::RandomWeighted { n: 30, edge_prob: 0.15, weight: WeightDist::Uniform { lo: 0.5, hi: 1.5 } },
        MeasureChoice::Uniform { lo: 0.1, hi: 1.0 },
    );
    let a: Graph = spec.clone().with_seed(17).generate().unwrap();
    let b: Graph = spec.clone().with_seed(17).generate().unwrap();
    let c: Graph = spec.with_seed(18).generate().unwrap();
    let key = |g: &Graph| (g.measures().to_vec(), g.edges().iter().map(|e| (e.u, e.v, e.weight)).collect::<Vec<_>>());
    assert_eq!(key(&a), key(&b));
    assert_ne!(key(&a), key(&c));
    assert!(a.measures().iter().all(|&m| (0.1..=1.0).contains(&m)));
    assert!(a.edges().iter().all(|e| (0.5..=1.5).contains(&e.weight)));
}

#[test]
fn spec_json_round_trip() {
    let json = r#"{"family":"antitree","gamma":1.0,"spheres":40,"measure":{"kind":"normalizing"},"seed":3}"#;
    let spec: GeneratorSpec = serde_json::from_str(json).unwrap();
    assert_eq!(spec.family, Family::Antitree { gamma: 1.0, spheres: 40, truncate: false });
    let back: GeneratorSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(back, spec);
    let cycle: GeneratorSpec = serde_json::from_str(r#"{"family":"cycle","n":7}"#).unwrap();
    assert_eq!(cycle.measure, MeasureChoice::Counting);
}

fn any_spec() -> impl Strategy<Value = GeneratorSpec> {
    let family = prop_oneof![
        (2usize..30, any::<bool>()).prop_map(|(n, d)| Family::Path { n: n.max(if d { 3 } else { 2 }), dirichlet_ends: d }),
        (3usize..30).prop_map(|n| Family::Cycle { n }),
        (2usize..7, 2usize..7, any::<bool>()).prop_map(|(w, h, f)| Family::LatticeBox {
            w: w.max(if f { 3 } else { 2 }),
            h: h.max(if f { 3 } else { 2 }),
            dirichlet_frame: f
        }),
        (2usize..10).prop_map(|n| Family::Complete { n }),
        (0.2f64..1.8, 3usize..12, any::<bool>()).prop_map(|(gamma, spheres, truncate)| Family::Antitree { gamma, spheres, truncate }),
        (2usize..25, 0.2f64..1.0).prop_map(|(n, edge_prob)| Family::RandomWeighted { n, edge_prob, weight: WeightDist::default() }),
    ];
    let measure = prop_oneof![
        Just(MeasureChoice::Counting),
        Just(MeasureChoice::Normalizing),
        (0.1f64..1.0, 1.0f64..3.0).prop_map(|(lo, hi)| MeasureChoice::Uniform { lo, hi }),
    ];
    (family, measure, any::<u64>()).prop_map(|(f, m, seed)| GeneratorSpec::new(f, m).with_seed(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_graphs_validate(spec in any_spec()) {
        let g: Graph = spec.generate().unwrap();
        revalidate(&g);
        if spec.measure == MeasureChoice::Normalizing {
            prop_assert!(g.is_normalizing());
            for x in 0..g.len() {
                prop_assert!((g.weighted_degree(x).unwrap() - 1.0).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn truncation_sensitivity_settles_on_a_long_path() {
    use hklab::zoo::truncation_sensitivity;
    let spec = GeneratorSpec::new(Family::Path { n: 200, dirichlet_ends: false }, MeasureChoice::Counting);
    let steps = truncation_sensitivity(&spec, &[10, 20, 40, 80], "0", "1", 5.0).unwrap();
    assert_eq!(steps.len(), 4);
    assert!(steps[0].change.is_none());
    assert_eq!(steps[1].active, 20);
    let changes: Vec<f64> = steps[1..].iter().map(|s| s.change.unwrap()).collect();
    // Killing far away matters less and less at fixed time.
    assert!(changes.windows(2).all(|w| w[1] <= w[0]), "{changes:?}");
    assert!(changes[2] < 1e-12);
    // Dirichlet truncation only removes mass, so the kernel grows with the radius.
    assert!(steps.windows(2).all(|w| w[1].kernel >= w[0].kernel - 1e-15));
    assert!(truncation_sensitivity(&spec, &[20, 10], "0", "1", 5.0).is_err());
    assert!(truncation_sensitivity(&spec, &[1, 5], "0", "3", 5.0).is_err());
}
