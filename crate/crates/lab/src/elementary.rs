//! The three scalar inequalities behind the Caccioppoli estimate, checked on
//! random pairs `a, b ≥ 0`.

use hklab::CheckReport;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::norms::pow_diff;
use crate::statements::{ELEMENTARY_CONVEXITY, ELEMENTARY_CROSS, ELEMENTARY_SUM};

pub const ELEMENTARY_TOLERANCE: f64 = 1e-12;

/// `(smaller, larger)` sides of one inequality at `(a, b, p)`.
type Sides = fn(f64, f64, f64) -> (f64, f64);

/// `((2p−1)/p²)(a^p − b^p)² ≤ (a^{2p−1} − b^{2p−1})(a − b)`, `p > 1/2`.
pub fn convexity_sides(a: f64, b: f64, p: f64) -> (f64, f64) {
    let small = (2.0 * p - 1.0) / (p * p) * pow_diff(a, b, p).powi(2);
    let large = pow_diff(a, b, 2.0 * p - 1.0) * (a - b);
    (small, large)
}

/// `|a^{2p−1}b − b^{2p−1}a| ≤ ((p−1)/p)|a^{2p} − b^{2p}|`, `p ≥ 1`.
pub fn cross_sides(a: f64, b: f64, p: f64) -> (f64, f64) {
    let small = if p == 1.0 { 0.0 } else { a * b * pow_diff(a, b, 2.0 * p - 2.0).abs() };
    let large = (p - 1.0) / p * pow_diff(a, b, 2.0 * p).abs();
    (small, large)
}

/// `(a^{2p−1} + b^{2p−1})|a − b| ≤ 4|a^p − b^p|(a^p + b^p)`, `p ≥ 1/2`.
pub fn sum_sides(a: f64, b: f64, p: f64) -> (f64, f64) {
    let e = 2.0 * p - 1.0;
    let small = (a.powf(e) + b.powf(e)) * (a - b).abs();
    let large = 4.0 * pow_diff(a, b, p).abs() * (a.powf(p) + b.powf(p));
    (small, large)
}

fn draw(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let one = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.5) {
            rng.random::<f64>()
        } else {
            10f64.powf(rng.random_range(-3.0..3.0))
        }
    };
    match rng.random_range(0..20) {
        0 => (0.0, one(rng)),
        1 => {
            let a = one(rng);
            (a, a)
        }
        2 => {
            // Nearly equal pairs probe the first-order equality cases.
            let a = one(rng);
            (a, a * (1.0 + rng.random_range(-1e-6..1e-6)))
        }
        _ => (one(rng), one(rng)),
    }
}

fn check_one(id: &str, sides: Sides, p: f64, samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p.to_bits());
    let mut worst = (f64::INFINITY, 0.0, 0.0, 0.0, 0.0);
    let mut violations = 0usize;
    for _ in 0..samples {
        let (a, b) = draw(&mut rng);
        let (small, large) = sides(a, b, p);
        let scale = small.abs().max(large.abs()).max(f64::MIN_POSITIVE);
        let rel = (large - small) / scale;
        if rel < -ELEMENTARY_TOLERANCE {
            violations += 1;
        }
        if rel < worst.0 {
            worst = (rel, small, large, a, b);
        }
    }
    let (_, small, large, a, b) = worst;
    let tol = ELEMENTARY_TOLERANCE * small.abs().max(large.abs());
    CheckReport::linear(id, format!("p={p} samples={samples}"), small, large, tol)
        .with_seed(seed)
        .with_note(format!("violations={violations}, tightest pair a={a:e} b={b:e}"))
}

/// One report per `(inequality, p)`; `p` outside an inequality's range is
/// reported as skipped.
pub fn check_elementary(p_grid: &[f64], samples: usize, seed: u64) -> Vec<CheckReport> {
    type Admissible = fn(f64) -> bool;
    let table: [(&str, Sides, Admissible); 3] = [
        (ELEMENTARY_CONVEXITY, convexity_sides, |p| p > 0.5),
        (ELEMENTARY_CROSS, cross_sides, |p| p >= 1.0),
        (ELEMENTARY_SUM, sum_sides, |p| p >= 0.5),
    ];
    let mut out = Vec::new();
    for &(id, sides, admissible) in &table {
        for &p in p_grid {
            if admissible(p) {
                out.push(check_one(id, sides, p, samples, seed));
            } else {
                out.push(CheckReport::skipped(id, format!("p={p}"), "p outside the inequality's range"));
            }
        }
    }
    out
}
