use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metric::IntrinsicMetric;
use crate::scalar::{le_slack, Real};

/// Right-continuous step function `r ↦ m(B_x(r))`.
pub(crate) struct RadialVolume<T> {
    dist: Vec<T>,
    cum: Vec<T>,
}

impl<T: Real> RadialVolume<T> {
    pub(crate) fn new(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, x: usize) -> Self {
        let sorted = metric.sorted_from(x);
        let mut acc = T::zero();
        let cum = sorted
            .iter()
            .map(|&(_, y)| {
                acc += g.measure(y);
                acc
            })
            .collect();
        RadialVolume { dist: sorted.into_iter().map(|(d, _)| d).collect(), cum }
    }

    pub(crate) fn at(&self, r: T) -> T {
        let k = self.dist.partition_point(|&d| le_slack(d, r));
        self.cum[k.max(1) - 1]
    }

    pub(crate) fn below(&self, r: T) -> T {
        let k = self.dist.partition_point(|&d| !le_slack(r, d));
        self.cum[k.max(1) - 1]
    }

    /// `R1`, the realized distances strictly inside `(R1, R2)`, and `R2`.
    pub(crate) fn breakpoints(&self, r1: T, r2: T) -> Vec<T> {
        let mut pts = vec![r1];
        for &d in &self.dist {
            let last = *pts.last().expect("nonempty");
            if d > last && !le_slack(d, last) && !le_slack(r2, d) {
                pts.push(d);
            }
        }
        if r2 > r1 {
            pts.push(r2);
        }
        pts
    }
}

/// Smallest `C_D` with `m(B(r₂)) ≤ C_D (r₂/r₁)^d m(B(r₁))` on `[R1, R2]`.
#[derive(Clone, Debug, Serialize)]
pub struct DoublingEstimate {
    pub r1: f64,
    pub r2: f64,
    pub d: f64,
    pub c_d: f64,
    /// Radii attaining the supremum; `r1` is approached from below.
    pub witness: (f64, f64),
    pub breakpoints: usize,
}

fn check_interval<T: Real>(r1: T, r2: T) -> Result<()> {
    if !(r1 > T::zero()) || !(r2 >= r1) || !r2.is_finite() {
        return Err(Error::Precondition(format!("need 0 < R1 <= R2 < inf, got [{r1}, {r2}]")));
    }
    Ok(())
}

/// Exact doubling constant over `[R1, R2]`.
///
/// Between consecutive breakpoints `P_i < P_{i+1}` the volume is constant, so
/// the supremum is `max_{i<j} (P_{i+1}/P_j)^d V(P_j)/V(P_i)` (and 1).
pub fn doubling_constant<T: Real>(
    g: &WeightedGraph<T>,
    metric: &IntrinsicMetric<T>,
    x: usize,
    r1: T,
    r2: T,
    d: T,
) -> Result<DoublingEstimate> {
    check_interval(r1, r2)?;
    g.check_vertex(x)?;
    let radial = RadialVolume::new(g, metric, x);
    let pts: Vec<f64> = radial.breakpoints(r1, r2).into_iter().map(Real::as_f64).collect();
    let vols: Vec<f64> = pts.iter().map(|&p| radial.at(T::of(p)).as_f64().ln()).collect();
    let df = d.as_f64();
    let mut best = 0.0f64;
    let mut witness = (r1.as_f64(), r1.as_f64());
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let v = df * (pts[i + 1] / pts[j]).ln() + vols[j] - vols[i];
            if v > best {
                best = v;
                witness = (pts[i + 1], pts[j]);
            }
        }
    }
    Ok(DoublingEstimate { r1: r1.as_f64(), r2: r2.as_f64(), d: df, c_d: best.exp(), witness, breakpoints: pts.len() })
}

/// `C_D* = sup_{r ∈ [R1, R2]} m(B(2r))/m(B(r))`.
pub fn star_doubling_constant<T: Real>(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, x: usize, r1: T, r2: T) -> Result<f64> {
    check_interval(r1, r2)?;
    g.check_vertex(x)?;
    let radial = RadialVolume::new(g, metric, x);
    let pts = radial.breakpoints(r1, r2);
    let two = T::of(2.0);
    let mut best = (radial.at(two * r2) / radial.at(r2)).as_f64();
    for w in pts.windows(2) {
        best = best.max((radial.below(two * w[1]) / radial.at(w[0])).as_f64());
    }
    Ok(best)
}
