use std::sync::OnceLock;

use crate::scalar::Real;

/// Relative stability demanded from successive panel refinements.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

const RULE_POINTS: usize = 64;
const MAX_PANELS: usize = 256;
const UNIFORM_PANELS: usize = 32;
/// Halvings toward the left endpoint in the graded fallback.
const GRADED_PIECES: usize = 24;

/// Gauss–Legendre nodes and weights on `[-1, 1]` via Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(RULE_POINTS))
}

fn composite<T: Real>(f: &mut impl FnMut(T) -> T, a: T, b: T, panels: usize) -> T {
    let (nodes, weights) = rule();
    let width = (b - a) / T::of_usize(panels);
    let half = width / T::of(2.0);
    let mut total = T::zero();
    for p in 0..panels {
        let mid = a + width * (T::of_usize(p) + T::of(0.5));
        let s: T = nodes.iter().zip(weights).map(|(&x, &w)| T::of(w) * f(mid + half * T::of(x))).sum();
        total += s * half;
    }
    total
}

/// Doubles the panel count from one until two successive values agree to
/// `rel_tol` or `max_panels` is reached; returns the value and whether it
/// settled.
fn refine<T: Real>(f: &mut impl FnMut(T) -> T, a: T, b: T, rel_tol: f64, max_panels: usize) -> (T, bool) {
    let mut panels = 1;
    let mut prev = composite(f, a, b, panels);
    loop {
        panels *= 2;
        let next = composite(f, a, b, panels);
        let settled = (next - prev).abs() <= T::of(rel_tol) * next.abs() || next.abs() <= T::min_positive_value();
        if settled || panels >= max_panels {
            return (next, settled);
        }
        prev = next;
    }
}

/// `∫_a^b f` by a 64-point composite Gauss–Legendre rule, doubling the
/// panel count until two successive values agree to `rel_tol`.
///
/// Integrands that do not settle quickly are redone on pieces graded
/// geometrically toward `a`, where solutions started from rough data are
/// least regular.
pub fn integrate<T: Real>(mut f: impl FnMut(T) -> T, a: T, b: T, rel_tol: f64) -> T {
    if a == b {
        return T::zero();
    }
    let (value, settled) = refine(&mut f, a, b, rel_tol, UNIFORM_PANELS);
    if settled {
        return value;
    }
    let mut total = T::zero();
    let mut all_settled = true;
    let mut hi = b;
    for k in 0..GRADED_PIECES {
        let lo = if k + 1 == GRADED_PIECES { a } else { a + (hi - a) / T::of(2.0) };
        let (piece, ok) = refine(&mut f, lo, hi, rel_tol, MAX_PANELS);
        total += piece;
        all_settled &= ok;
        hi = lo;
    }
    if !all_settled {
        log::warn!("quadrature did not stabilise on [{a}, {b}] with {MAX_PANELS} panels per graded piece");
    }
    total
}

/// Maximum of a continuous function on `[a, b]`: dense sampling followed by
/// golden-section refinement around the best sample.
pub fn maximize<T: Real>(mut f: impl FnMut(T) -> T, a: T, b: T) -> (T, T) {
    const SAMPLES: usize = 128;
    if a == b {
        return (a, f(a));
    }
    let step = (b - a) / T::of_usize(SAMPLES);
    let mut best = (a, f(a));
    let mut best_k = 0;
    for k in 1..=SAMPLES {
        let t = if k == SAMPLES { b } else { a + step * T::of_usize(k) };
        let v = f(t);
        if v > best.1 {
            best = (t, v);
            best_k = k;
        }
    }
    let mut lo = a + step * T::of_usize(best_k.saturating_sub(1));
    let mut hi = if best_k + 1 >= SAMPLES { b } else { a + step * T::of_usize(best_k + 1) };
    let ratio = T::of(0.618_033_988_749_894_9);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 > best.1 {
            best = (x1, f1);
        }
        if f2 > best.1 {
            best = (x2, f2);
        }
        if (hi - lo).abs() <= T::epsilon() * (T::one() + hi.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    best
}
