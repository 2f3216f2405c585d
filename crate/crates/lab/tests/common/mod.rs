#![allow(dead_code)]

use hklab::geometry::{DimensionParams, Exponent, SobolevBudget, SobolevTargets};
use hklab::graph::VertexFunction;
use hklab::metric::default_intrinsic_metric;
use hklab::zoo::{Family, GeneratorSpec, MeasureChoice};
use hklab::{Graph, Metric};
use hklab_lab::davies::{certify_center, CenterCertificate};

pub fn normalized_cycle(n: usize) -> (Graph, Metric) {
    let g: Graph = GeneratorSpec::new(Family::Cycle { n }, MeasureChoice::Normalizing).generate().unwrap();
    let metric = default_intrinsic_metric(&g, 1.0).unwrap();
    (g, metric)
}

pub fn cycle_params() -> DimensionParams<f64> {
    DimensionParams::new(3.0, 1.0, Exponent::Infinite).unwrap()
}

pub fn certify(g: &Graph, metric: &Metric, x: usize, r: f64, big_r: f64) -> CenterCertificate {
    certify_center(g, metric, x, cycle_params(), r, Some(big_r), SobolevTargets::default(), &SobolevBudget::default()).unwrap()
}

pub fn zero(n: usize) -> VertexFunction<f64> {
    VertexFunction::zeros(n)
}

pub fn delta(n: usize, x: usize) -> VertexFunction<f64> {
    VertexFunction::indicator(n, x)
}
