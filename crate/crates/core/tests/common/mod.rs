#![allow(dead_code)]

use hklab::graph::RawGraph;
use hklab::metric::default_intrinsic_metric;
use hklab::zoo::{Family, GeneratorSpec, MeasureChoice, WeightDist};
use hklab::{Graph, Metric};

pub fn two_vertex() -> Graph {
    let mut raw = RawGraph::new();
    raw.add_vertex("1", 1.0);
    raw.add_vertex("2", 1.0);
    raw.add_edge(0, 1, 1.0);
    raw.build().unwrap()
}

pub fn cycle(n: usize, measure: MeasureChoice) -> Graph {
    GeneratorSpec::new(Family::Cycle { n }, measure).generate().unwrap()
}

pub fn path(n: usize) -> Graph {
    GeneratorSpec::new(Family::Path { n, dirichlet_ends: false }, MeasureChoice::Counting).generate().unwrap()
}

pub fn metric(g: &Graph) -> Metric {
    default_intrinsic_metric(g, 1.0).unwrap()
}

/// A mixed bag of small graphs covering every family and measure choice.
pub fn zoo() -> Vec<Graph> {
    let specs = vec![
        GeneratorSpec::new(Family::Path { n: 9, dirichlet_ends: false }, MeasureChoice::Counting),
        GeneratorSpec::new(Family::Path { n: 12, dirichlet_ends: true }, MeasureChoice::Normalizing),
        GeneratorSpec::new(Family::Cycle { n: 11 }, MeasureChoice::Normalizing),
        GeneratorSpec::new(Family::Cycle { n: 7 }, MeasureChoice::Uniform { lo: 0.5, hi: 3.0 }).with_seed(4),
        GeneratorSpec::new(Family::LatticeBox { w: 4, h: 5, dirichlet_frame: false }, MeasureChoice::Counting),
        GeneratorSpec::new(Family::LatticeBox { w: 5, h: 5, dirichlet_frame: true }, MeasureChoice::Normalizing),
        GeneratorSpec::new(Family::Complete { n: 6 }, MeasureChoice::Counting),
        GeneratorSpec::new(Family::Antitree { gamma: 1.0, spheres: 6, truncate: false }, MeasureChoice::Counting),
        GeneratorSpec::new(Family::Antitree { gamma: 0.5, spheres: 8, truncate: true }, MeasureChoice::Normalizing),
        GeneratorSpec::new(
            Family::RandomWeighted { n: 15, edge_prob: 0.3, weight: WeightDist::Uniform { lo: 0.1, hi: 2.0 } },
            MeasureChoice::Uniform { lo: 0.2, hi: 2.0 },
        )
        .with_seed(9),
    ];
    specs.iter().map(|s| s.generate().unwrap()).collect()
}
