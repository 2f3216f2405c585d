//! Intrinsic pseudo-metrics, jump size, balls and cut-off functions.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{VertexFunction, VertexSet, WeightedGraph};
use crate::report::CheckReport;
use crate::scalar::{le_slack, Real};

/// Witness `(x, y, z)` of a triangle-inequality excess.
type Triple = (usize, usize, usize);

/// Tolerance for the intrinsic inequality and the triangle inequality.
pub const METRIC_TOLERANCE: f64 = 1e-12;

/// Dense symmetric `n × n` distance table.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> DistanceMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        let data: Vec<T> = rows
            .into_iter()
            .flat_map(|r| {
                assert_eq!(r.len(), n, "distance rows must be square");
                r
            })
            .collect();
        DistanceMatrix { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        DistanceMatrix { n, data: vec![T::zero(); n * n] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[x * self.n + y]
    }

    pub fn set(&mut self, x: usize, y: usize, v: T) {
        self.data[x * self.n + y] = v;
    }

    pub fn row(&self, x: usize) -> &[T] {
        &self.data[x * self.n..(x + 1) * self.n]
    }

    /// Largest triangle-inequality excess `ρ(x,z) − ρ(x,y) − ρ(y,z)` and its witness.
    pub fn worst_triangle(&self) -> (T, Option<Triple>) {
        let n = self.n;
        let results: Vec<(T, Option<Triple>)> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut worst = (T::zero(), None);
                for y in 0..n {
                    let dxy = self.get(x, y);
                    let ry = self.row(y);
                    for z in 0..n {
                        let excess = self.get(x, z) - dxy - ry[z];
                        if excess > worst.0 {
                            worst = (excess, Some((x, y, z)));
                        }
                    }
                }
                worst
            })
            .collect();
        results.into_iter().fold((T::zero(), None), |a, b| if b.0 > a.0 { b } else { a })
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier<T>(T, usize);

impl<T: Real> Eq for Frontier<T> {}

impl<T: Real> Ord for Frontier<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal).then_with(|| other.1.cmp(&self.1))
    }
}

impl<T: Real> PartialOrd for Frontier<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra<T: Real>(adj: &[Vec<(usize, T)>], source: usize) -> Vec<T> {
    let mut dist = vec![T::infinity(); adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = T::zero();
    heap.push(Frontier(T::zero(), source));
    while let Some(Frontier(d, x)) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &(y, len) in &adj[x] {
            let nd = d + len;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(Frontier(nd, y));
            }
        }
    }
    dist
}

/// Hop-count distances.
pub fn combinatorial_distances<T: Real>(g: &WeightedGraph<T>) -> DistanceMatrix<T> {
    let n = g.len();
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut d = vec![T::infinity(); n];
            let mut queue = VecDeque::from([s]);
            d[s] = T::zero();
            while let Some(x) = queue.pop_front() {
                for &(y, _) in g.neighbors(x) {
                    if d[y].is_infinite() {
                        d[y] = d[x] + T::one();
                        queue.push_back(y);
                    }
                }
            }
            d
        })
        .collect();
    DistanceMatrix::from_rows(rows)
}

/// Per-vertex intrinsic-inequality reports: `Σ_y b(x,y)ρ(x,y)² ≤ m(x)`.
pub fn is_intrinsic<T: Real>(g: &WeightedGraph<T>, rho: &DistanceMatrix<T>) -> Vec<CheckReport> {
    (0..g.len())
        .map(|x| {
            let lhs: T = g.neighbors(x).iter().map(|&(y, b)| b * rho.get(x, y).powi(2)).sum();
            CheckReport::linear(
                "intrinsic-inequality",
                format!("vertex {}", g.id(x)),
                lhs.as_f64(),
                g.measure(x).as_f64(),
                METRIC_TOLERANCE,
            )
        })
        .collect()
}

/// Intrinsic pseudo-metric with its jump size and per-vertex slack certificate.
#[derive(Clone, Debug)]
pub struct IntrinsicMetric<T> {
    rho: DistanceMatrix<T>,
    jump_size: T,
    slack: Vec<T>,
}

impl<T: Real> IntrinsicMetric<T> {
    /// Validates symmetry, zero diagonal, the intrinsic inequality and `S > 0`.
    ///
    /// The triangle inequality is checked separately by [`IntrinsicMetric::check_triangle`],
    /// since shortest-path constructions satisfy it by design and the scan is cubic.
    pub fn new(g: &WeightedGraph<T>, rho: DistanceMatrix<T>) -> Result<Self> {
        let n = g.len();
        if rho.len() != n {
            return Err(Error::InvalidMetric(format!("distance matrix has size {} for {} vertices", rho.len(), n)));
        }
        let tol = T::of(METRIC_TOLERANCE);
        for x in 0..n {
            if rho.get(x, x) != T::zero() {
                return Err(Error::InvalidMetric(format!("rho({0},{0}) != 0", g.id(x))));
            }
            for y in 0..x {
                let (a, b) = (rho.get(x, y), rho.get(y, x));
                if !(a >= T::zero()) || !a.is_finite() {
                    return Err(Error::InvalidMetric(format!("rho({},{}) = {a} is not a finite nonnegative number", g.id(x), g.id(y))));
                }
                if (a - b).abs() > tol * (T::one() + a.abs()) {
                    return Err(Error::InvalidMetric(format!("rho not symmetric at ({},{})", g.id(x), g.id(y))));
                }
            }
        }
        let slack: Vec<T> =
            (0..n).map(|x| g.measure(x) - g.neighbors(x).iter().map(|&(y, b)| b * rho.get(x, y).powi(2)).sum::<T>()).collect();
        if let Some(x) = (0..n).find(|&x| slack[x] < -tol * g.measure(x).max(T::one())) {
            return Err(Error::InvalidMetric(format!("intrinsic inequality fails at {} (slack {})", g.id(x), slack[x])));
        }
        let jump_size = g.edges().iter().map(|e| rho.get(e.u, e.v)).fold(T::zero(), T::max);
        if !(jump_size > T::zero()) {
            return Err(Error::InvalidMetric("jump size must be positive".into()));
        }
        Ok(IntrinsicMetric { rho, jump_size, slack })
    }

    /// Loads `(u, v, rho)` rows; every unordered pair must appear at least once.
    pub fn from_csv(g: &WeightedGraph<T>, path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_path(path)?;
        let n = g.len();
        let mut given: HashMap<(usize, usize), f64> = HashMap::new();
        for record in reader.deserialize::<(String, String, f64)>() {
            let (u, v, r) = record?;
            let (x, y) = (g.index_of(&u)?, g.index_of(&v)?);
            if x == y {
                if r != 0.0 {
                    return Err(Error::InvalidMetric(format!("rho({u},{u}) = {r} must be 0")));
                }
                continue;
            }
            let key = (x.min(y), x.max(y));
            if let Some(&old) = given.get(&key) {
                if (old - r).abs() > METRIC_TOLERANCE * (1.0 + old.abs()) {
                    return Err(Error::InvalidMetric(format!("conflicting values for rho({u},{v}): {old} and {r}")));
                }
            }
            given.insert(key, r);
        }
        let mut rho = DistanceMatrix::zeros(n);
        for x in 0..n {
            for y in x + 1..n {
                let r = given
                    .get(&(x, y))
                    .ok_or_else(|| Error::InvalidMetric(format!("missing distance for pair ({},{})", g.id(x), g.id(y))))?;
                rho.set(x, y, T::of(*r));
                rho.set(y, x, T::of(*r));
            }
        }
        let metric = Self::new(g, rho)?;
        metric.check_triangle()?;
        Ok(metric)
    }

    pub fn check_triangle(&self) -> Result<()> {
        let (excess, witness) = self.rho.worst_triangle();
        if excess > T::of(METRIC_TOLERANCE) {
            let (x, y, z) = witness.expect("witness for positive excess");
            return Err(Error::InvalidMetric(format!("triangle inequality fails for ({x},{y},{z}) by {excess}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    #[inline]
    pub fn dist(&self, x: usize, y: usize) -> T {
        self.rho.get(x, y)
    }

    pub fn row(&self, x: usize) -> &[T] {
        self.rho.row(x)
    }

    pub fn matrix(&self) -> &DistanceMatrix<T> {
        &self.rho
    }

    /// `S = max{ρ(x,y) : b(x,y) > 0}`.
    pub fn jump_size(&self) -> T {
        self.jump_size
    }

    /// `m(x) − Σ_y b(x,y)ρ(x,y)²` per vertex.
    pub fn slack(&self) -> &[T] {
        &self.slack
    }

    pub fn eccentricity(&self, x: usize) -> T {
        self.rho.row(x).iter().copied().fold(T::zero(), T::max)
    }

    /// Closed ball `B_x(R) = {y : ρ(x,y) ≤ R}` (with a few ulps of slack).
    pub fn ball(&self, x: usize, r: T) -> VertexSet {
        VertexSet::from_mask(self.rho.row(x).iter().map(|&d| le_slack(d, r)).collect())
    }

    /// `ρ(·, A) = min_{a ∈ A} ρ(·, a)`.
    pub fn distance_to_set(&self, a: &VertexSet) -> VertexFunction<T> {
        let n = self.len();
        let mut d = vec![T::infinity(); n];
        for s in a.iter() {
            for (y, &r) in self.rho.row(s).iter().enumerate() {
                if r < d[y] {
                    d[y] = r;
                }
            }
        }
        d.into()
    }

    /// Distances from `x` with vertex indices, sorted ascending.
    pub fn sorted_from(&self, x: usize) -> Vec<(T, usize)> {
        let mut v: Vec<(T, usize)> = self.rho.row(x).iter().copied().zip(0..).collect();
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        v
    }
}

/// Path metric with edge length `(1/Deg(x) ∧ 1/Deg(y))^{1/2} ∧ cap`.
pub fn default_intrinsic_metric<T: Real>(g: &WeightedGraph<T>, cap: T) -> Result<IntrinsicMetric<T>> {
    if !(cap > T::zero()) {
        return Err(Error::Precondition(format!("metric cap must be positive, got {cap}")));
    }
    let deg = g.weighted_degrees();
    let adj: Vec<Vec<(usize, T)>> = (0..g.len())
        .map(|x| {
            g.neighbors(x)
                .iter()
                .map(|&(y, _)| {
                    let len = (T::one() / deg[x]).min(T::one() / deg[y]).sqrt().min(cap);
                    (y, len)
                })
                .collect()
        })
        .collect();
    let rows: Vec<Vec<T>> = (0..g.len()).into_par_iter().map(|s| dijkstra(&adj, s)).collect();
    if rows.iter().any(|r| r.iter().any(|d| d.is_infinite())) {
        return Err(Error::Disconnected(2));
    }
    let mut rho = DistanceMatrix::from_rows(rows);
    // Dijkstra is exact up to summation order; force bitwise symmetry.
    for x in 0..rho.len() {
        for y in 0..x {
            let v = rho.get(x, y).min(rho.get(y, x));
            rho.set(x, y, v);
            rho.set(y, x, v);
        }
    }
    IntrinsicMetric::new(g, rho)
}

/// Checks `B(R − S) ⊆ B(R)°` as sets.
pub fn ball_interior_inclusion<T: Real>(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, x: usize, r: T) -> CheckReport {
    let s = metric.jump_size();
    let instance = format!("center {} R={}", g.id(x), r);
    if r < s {
        return CheckReport::skipped("ball-interior", instance, format!("R < S = {s}"));
    }
    let inner = metric.ball(x, r - s);
    let interior = g.combinatorial_interior(&metric.ball(x, r));
    let missing = inner.difference(&interior).len();
    CheckReport::linear("ball-interior", instance, missing as f64, 0.0, 0.0)
}

/// `φ_{A,R} = (1 − ρ(·,A)/R)_+` together with `‖|∇φ|‖²_∞`.
#[derive(Clone, Debug)]
pub struct Cutoff<T> {
    pub phi: VertexFunction<T>,
    pub grad_sup_sq: T,
}

pub fn cutoff<T: Real>(g: &WeightedGraph<T>, metric: &IntrinsicMetric<T>, a: &VertexSet, r: T) -> Result<Cutoff<T>> {
    if !(r > T::zero()) {
        return Err(Error::Precondition(format!("cut-off radius must be positive, got {r}")));
    }
    if a.is_empty() {
        return Err(Error::Precondition("cut-off set must be nonempty".into()));
    }
    let d = metric.distance_to_set(a);
    let phi = d.map(|v| (T::one() - v / r).max(T::zero()));
    let grad_sup_sq = (0..g.len()).map(|x| g.gradient_norm_sq(&phi, x)).fold(T::zero(), T::max);
    let bound = T::one() / (r * r);
    if grad_sup_sq > bound * (T::one() + T::of(1e-10)) {
        return Err(Error::Postcondition(format!("cut-off gradient {grad_sup_sq} exceeds 1/R^2 = {bound}; metric is not intrinsic")));
    }
    Ok(Cutoff { phi, grad_sup_sq })
}

/// Weight `ω` with a verified Lipschitz constant `κ` for a given metric.
#[derive(Clone, Debug)]
pub struct LipschitzWeight<T> {
    omega: VertexFunction<T>,
    kappa: T,
}

impl<T: Real> LipschitzWeight<T> {
    pub fn zero(n: usize) -> Self {
        LipschitzWeight { omega: VertexFunction::zeros(n), kappa: T::zero() }
    }

    /// Verifies `|ω(x) − ω(y)| ≤ κ ρ(x,y)` over all pairs.
    pub fn new(metric: &IntrinsicMetric<T>, omega: VertexFunction<T>, kappa: T) -> Result<Self> {
        let minimal = Self::minimal_constant(metric, &omega)?;
        if minimal > kappa * (T::one() + T::of(1e-12)) + T::of(1e-12) {
            return Err(Error::Precondition(format!("omega is not {kappa}-Lipschitz (smallest constant {minimal})")));
        }
        Ok(LipschitzWeight { omega, kappa })
    }

    /// Uses the smallest admissible constant.
    pub fn tight(metric: &IntrinsicMetric<T>, omega: VertexFunction<T>) -> Result<Self> {
        let kappa = Self::minimal_constant(metric, &omega)?;
        Ok(LipschitzWeight { omega, kappa })
    }

    /// `ω = −κ min(ρ(x, ·), ρ(x, y))`, which is κ-Lipschitz by construction.
    pub fn davies(metric: &IntrinsicMetric<T>, x: usize, y: usize, kappa: T) -> Self {
        let cap = metric.dist(x, y);
        let omega = VertexFunction::from(metric.row(x).iter().map(|&d| -kappa * d.min(cap)).collect::<Vec<_>>());
        LipschitzWeight { omega, kappa }
    }

    fn minimal_constant(metric: &IntrinsicMetric<T>, omega: &VertexFunction<T>) -> Result<T> {
        let n = metric.len();
        assert_eq!(omega.len(), n);
        let mut best = T::zero();
        for x in 0..n {
            for y in 0..x {
                let diff = (omega[x] - omega[y]).abs();
                let d = metric.dist(x, y);
                if d > T::zero() {
                    best = best.max(diff / d);
                } else if diff > T::zero() {
                    return Err(Error::Precondition(format!("omega separates vertices {x} and {y} at distance zero")));
                }
            }
        }
        Ok(best)
    }

    pub fn omega(&self) -> &VertexFunction<T> {
        &self.omega
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn negated(&self) -> Self {
        LipschitzWeight { omega: self.omega.map(|v| -v), kappa: self.kappa }
    }
}
