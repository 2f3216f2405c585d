//! Weighted graphs `(b, m)` over a finite vertex set and the difference
//! operators built on them.
//!
//! A [`RawGraph`] holds directed weight entries exactly as supplied and can
//! report every invariant violation. [`WeightedGraph`] is the validated,
//! immutable form: each undirected edge is stored once, so symmetry cannot
//! be broken after construction.
//!
//! Dirichlet vertices are flagged, not removed. The semigroup vanishes on
//! them; the plain operators here act on whatever values a function carries.

mod function;
pub mod io;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use function::{VertexFunction, VertexSet};

/// Undirected edge with `u < v` and positive weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge<T> {
    pub u: usize,
    pub v: usize,
    pub weight: T,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Asymmetric { x: String, y: String, forward: f64, backward: f64 },
    SelfLoop { x: String, weight: f64 },
    NegativeWeight { x: String, y: String, weight: f64 },
    NonFiniteWeight { x: String, y: String },
    DuplicateEntry { x: String, y: String },
    NonPositiveMeasure { x: String, m: f64 },
    DuplicateVertex { x: String },
    NeighborMismatch { x: String, y: String },
    UnknownDirichletVertex { index: usize },
    Disconnected { components: usize },
    Empty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Asymmetric { x, y, forward, backward } => {
                write!(f, "symmetry violated at ({x},{y}): b(x,y)={forward} but b(y,x)={backward}")
            }
            Violation::SelfLoop { x, weight } => write!(f, "self-loop at {x} with b(x,x)={weight}"),
            Violation::NegativeWeight { x, y, weight } => {
                write!(f, "negative weight b({x},{y})={weight}")
            }
            Violation::NonFiniteWeight { x, y } => write!(f, "non-finite weight b({x},{y})"),
            Violation::DuplicateEntry { x, y } => write!(f, "duplicate weight entry for ({x},{y})"),
            Violation::NonPositiveMeasure { x, m } => {
                write!(f, "measure positivity violated at {x}: m={m}")
            }
            Violation::DuplicateVertex { x } => write!(f, "duplicate vertex id {x}"),
            Violation::NeighborMismatch { x, y } => {
                write!(f, "neighbor lists of {x} and {y} disagree with b")
            }
            Violation::UnknownDirichletVertex { index } => {
                write!(f, "Dirichlet flag on unknown vertex index {index}")
            }
            Violation::Disconnected { components } => {
                write!(f, "graph is disconnected ({components} components)")
            }
            Violation::Empty => write!(f, "graph has no vertices"),
        }
    }
}

/// Unvalidated graph data: vertex ids, measures and directed weight entries.
#[derive(Clone, Debug, Default)]
pub struct RawGraph<T> {
    ids: Vec<String>,
    measure: Vec<T>,
    entries: Vec<(usize, usize, T)>,
    dirichlet: Vec<usize>,
}

impl<T: Real> RawGraph<T> {
    pub fn new() -> Self {
        RawGraph { ids: Vec::new(), measure: Vec::new(), entries: Vec::new(), dirichlet: Vec::new() }
    }

    pub fn add_vertex(&mut self, id: impl Into<String>, m: T) -> usize {
        self.ids.push(id.into());
        self.measure.push(m);
        self.ids.len() - 1
    }

    /// Adds a single directed entry `b(x, y) = w`.
    pub fn add_entry(&mut self, x: usize, y: usize, w: T) {
        self.entries.push((x, y, w));
    }

    /// Adds `b(x, y) = b(y, x) = w`.
    pub fn add_edge(&mut self, x: usize, y: usize, w: T) {
        self.entries.push((x, y, w));
        self.entries.push((y, x, w));
    }

    pub fn set_dirichlet(&mut self, x: usize) {
        self.dirichlet.push(x);
    }

    /// Directed weight entries added so far.
    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    pub fn set_measure(&mut self, x: usize, m: T) {
        self.measure[x] = m;
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Every violated invariant; empty iff [`RawGraph::build`] succeeds.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.ids.len();
        let mut out = Vec::new();
        if n == 0 {
            out.push(Violation::Empty);
            return out;
        }
        let name = |i: usize| self.ids.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
        let mut seen_ids = HashMap::new();
        for (i, id) in self.ids.iter().enumerate() {
            if seen_ids.insert(id.as_str(), i).is_some() {
                out.push(Violation::DuplicateVertex { x: id.clone() });
            }
        }
        for (i, &m) in self.measure.iter().enumerate() {
            if !(m > T::zero()) || !m.is_finite() {
                out.push(Violation::NonPositiveMeasure { x: name(i), m: m.as_f64() });
            }
        }
        let mut table: HashMap<(usize, usize), T> = HashMap::new();
        for &(x, y, w) in &self.entries {
            if x >= n || y >= n {
                out.push(Violation::NeighborMismatch { x: name(x), y: name(y) });
                continue;
            }
            if !w.is_finite() {
                out.push(Violation::NonFiniteWeight { x: name(x), y: name(y) });
                continue;
            }
            if table.insert((x, y), w).is_some() {
                out.push(Violation::DuplicateEntry { x: name(x), y: name(y) });
            }
        }
        let mut keys: Vec<_> = table.keys().copied().collect();
        keys.sort_unstable();
        for (x, y) in keys {
            let w = table[&(x, y)];
            if x == y {
                if w != T::zero() {
                    out.push(Violation::SelfLoop { x: name(x), weight: w.as_f64() });
                }
                continue;
            }
            if w < T::zero() {
                out.push(Violation::NegativeWeight { x: name(x), y: name(y), weight: w.as_f64() });
            }
            let back = table.get(&(y, x)).copied().unwrap_or(T::zero());
            if back != w && (x < y || !table.contains_key(&(y, x))) {
                out.push(Violation::Asymmetric { x: name(x), y: name(y), forward: w.as_f64(), backward: back.as_f64() });
            }
        }
        for &d in &self.dirichlet {
            if d >= n {
                out.push(Violation::UnknownDirichletVertex { index: d });
            }
        }
        let adjacency = {
            let mut adj = vec![Vec::new(); n];
            for (&(x, y), &w) in &table {
                if x != y && w > T::zero() {
                    adj[x].push(y);
                    adj[y].push(x);
                }
            }
            adj
        };
        let components = count_components(&adjacency);
        if components > 1 {
            out.push(Violation::Disconnected { components });
        }
        out
    }

    pub fn build(self) -> Result<WeightedGraph<T>> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidGraph(violations.iter().map(|v| v.to_string()).collect()));
        }
        let n = self.ids.len();
        let mut edges = Vec::new();
        for &(x, y, w) in &self.entries {
            if x < y && w > T::zero() {
                edges.push(Edge { u: x, v: y, weight: w });
            }
        }
        edges.sort_by_key(|e| (e.u, e.v));
        let mut dirichlet = vec![false; n];
        for &d in &self.dirichlet {
            dirichlet[d] = true;
        }
        Ok(WeightedGraph::assemble(self.ids, self.measure, edges, dirichlet))
    }
}

fn count_components(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        components += 1;
        seen[s] = true;
        stack.push(s);
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    components
}

/// Validated, immutable weighted graph.
#[derive(Clone, Debug)]
pub struct WeightedGraph<T> {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    measure: Vec<T>,
    degree: Vec<T>,
    neighbors: Vec<Vec<(usize, T)>>,
    edges: Vec<Edge<T>>,
    dirichlet: Vec<bool>,
}

impl<T: Real> WeightedGraph<T> {
    fn assemble(ids: Vec<String>, measure: Vec<T>, edges: Vec<Edge<T>>, dirichlet: Vec<bool>) -> Self {
        let n = ids.len();
        let mut neighbors = vec![Vec::new(); n];
        let mut degree = vec![T::zero(); n];
        for e in &edges {
            neighbors[e.u].push((e.v, e.weight));
            neighbors[e.v].push((e.u, e.weight));
            degree[e.u] += e.weight;
            degree[e.v] += e.weight;
        }
        for list in &mut neighbors {
            list.sort_by_key(|&(y, _)| y);
        }
        let index = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        WeightedGraph { ids, index, measure, degree, neighbors, edges, dirichlet }
    }

    /// Builds a graph from a symmetric dense weight matrix (row-major) and measures.
    pub fn from_dense(weights: &[T], measure: Vec<T>) -> Result<Self> {
        let n = measure.len();
        assert_eq!(weights.len(), n * n, "weight matrix must be n x n");
        let mut raw = RawGraph::new();
        for (i, &m) in measure.iter().enumerate() {
            raw.add_vertex(i.to_string(), m);
        }
        for x in 0..n {
            for y in 0..n {
                let w = weights[x * n + y];
                if w != T::zero() {
                    raw.add_entry(x, y, w);
                }
            }
        }
        raw.build()
    }

    /// Re-checks the stored data; always empty for graphs built through [`RawGraph`].
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, &m) in self.measure.iter().enumerate() {
            if !(m > T::zero()) {
                out.push(Violation::NonPositiveMeasure { x: self.ids[i].clone(), m: m.as_f64() });
            }
        }
        for e in &self.edges {
            let fwd = self.neighbors[e.u].iter().any(|&(y, w)| y == e.v && w == e.weight);
            let bwd = self.neighbors[e.v].iter().any(|&(y, w)| y == e.u && w == e.weight);
            if !(fwd && bwd) {
                out.push(Violation::NeighborMismatch { x: self.ids[e.u].clone(), y: self.ids[e.v].clone() });
            }
        }
        let adj: Vec<Vec<usize>> = self.neighbors.iter().map(|l| l.iter().map(|&(y, _)| y).collect()).collect();
        let components = count_components(&adj);
        if components > 1 {
            out.push(Violation::Disconnected { components });
        }
        out
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_owned()))
    }

    pub fn check_vertex(&self, x: usize) -> Result<usize> {
        if x < self.len() {
            Ok(x)
        } else {
            Err(Error::VertexIndex(x))
        }
    }

    pub fn measure(&self, x: usize) -> T {
        self.measure[x]
    }

    pub fn measures(&self) -> &[T] {
        &self.measure
    }

    pub fn total_measure(&self) -> T {
        self.measure.iter().copied().sum()
    }

    pub fn min_measure(&self) -> T {
        self.measure.iter().fold(T::infinity(), |a, &b| a.min(b))
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, T)] {
        &self.neighbors[x]
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn weight(&self, x: usize, y: usize) -> T {
        self.neighbors[x].binary_search_by_key(&y, |&(z, _)| z).map(|k| self.neighbors[x][k].1).unwrap_or(T::zero())
    }

    /// `deg(x) = Σ_y b(x, y)`.
    pub fn deg(&self, x: usize) -> Result<T> {
        self.check_vertex(x).map(|x| self.degree[x])
    }

    /// `Deg(x) = deg(x) / m(x)`.
    pub fn weighted_degree(&self, x: usize) -> Result<T> {
        self.check_vertex(x).map(|x| self.degree[x] / self.measure[x])
    }

    pub fn degrees(&self) -> &[T] {
        &self.degree
    }

    pub fn weighted_degrees(&self) -> Vec<T> {
        self.degree.iter().zip(&self.measure).map(|(&d, &m)| d / m).collect()
    }

    /// True when `m = deg` up to 1e-12 relative, i.e. `Deg ≡ 1`.
    pub fn is_normalizing(&self) -> bool {
        self.degree.iter().zip(&self.measure).all(|(&d, &m)| (d - m).abs() <= T::of(1e-12) * m.max(T::one()))
    }

    pub fn is_dirichlet(&self, x: usize) -> bool {
        self.dirichlet[x]
    }

    pub fn dirichlet_mask(&self) -> &[bool] {
        &self.dirichlet
    }

    pub fn has_dirichlet(&self) -> bool {
        self.dirichlet.iter().any(|&b| b)
    }

    /// Vertices not flagged as Dirichlet boundary.
    pub fn active_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| !self.dirichlet[x]).collect()
    }

    /// Sets values on Dirichlet vertices to zero.
    pub fn zero_extend(&self, f: &VertexFunction<T>) -> VertexFunction<T> {
        VertexFunction::from_fn(self.len(), |x| if self.dirichlet[x] { T::zero() } else { f[x] })
    }

    fn check_len(&self, f: &[T]) {
        assert_eq!(f.len(), self.len(), "vertex function length does not match the graph");
    }

    /// `Δf(x) = (1/m(x)) Σ_y b(x,y)(f(x) − f(y))`.
    pub fn laplacian_apply(&self, f: &VertexFunction<T>) -> VertexFunction<T> {
        self.check_len(f);
        VertexFunction::from_fn(self.len(), |x| {
            let fx = f[x];
            let s: T = self.neighbors[x].iter().map(|&(y, b)| b * (fx - f[y])).sum();
            s / self.measure[x]
        })
    }

    /// `|∇f|(x) = ((1/m(x)) Σ_y b(x,y)(f(x) − f(y))²)^{1/2}`.
    pub fn gradient_norm(&self, f: &VertexFunction<T>, x: usize) -> T {
        self.gradient_norm_sq(f, x).sqrt()
    }

    pub fn gradient_norm_sq(&self, f: &[T], x: usize) -> T {
        let fx = f[x];
        let s: T = self.neighbors[x].iter().map(|&(y, b)| b * (fx - f[y]).powi(2)).sum();
        s / self.measure[x]
    }

    /// `‖|∇f|‖²₂ = Σ_x Σ_y b(x,y)(f(x) − f(y))²`, i.e. twice the energy over edges.
    pub fn gradient_energy(&self, f: &[T]) -> T {
        self.check_len(f);
        self.edges.iter().map(|e| T::of(2.0) * e.weight * (f[e.u] - f[e.v]).powi(2)).sum()
    }

    /// `Σ_x m(x) f(x) g(x)`.
    pub fn inner(&self, f: &[T], g: &[T]) -> T {
        self.check_len(f);
        self.check_len(g);
        f.iter().zip(g).zip(&self.measure).map(|((&a, &b), &m)| m * a * b).sum()
    }

    /// `A° = {x ∈ A : b(x, y) = 0 for all y ∉ A}`.
    pub fn combinatorial_interior(&self, a: &VertexSet) -> VertexSet {
        assert_eq!(a.universe(), self.len());
        VertexSet::from_indices(self.len(), a.iter().filter(|&x| self.neighbors[x].iter().all(|&(y, _)| a.contains(y))))
    }

    /// `Δ_ω v = e^ω Δ(e^{−ω} v)`.
    pub fn sandwiched_apply(&self, omega: &VertexFunction<T>, v: &VertexFunction<T>) -> VertexFunction<T> {
        self.check_len(omega);
        self.check_len(v);
        VertexFunction::from_fn(self.len(), |x| {
            let wx = omega[x];
            let s: T = self.neighbors[x].iter().map(|&(y, b)| b * (v[x] - (wx - omega[y]).exp() * v[y])).sum();
            s / self.measure[x]
        })
    }

    /// `h(ω) = sup_x Σ_y (b(x,y)/m(x)) |∇e^ω ∇e^{−ω}|`.
    ///
    /// Uses `|∇e^ω ∇e^{−ω}| = 2(cosh(ω(x) − ω(y)) − 1)`.
    pub fn h_omega(&self, omega: &VertexFunction<T>) -> T {
        self.check_len(omega);
        let two = T::of(2.0);
        (0..self.len())
            .map(|x| {
                let s: T = self.neighbors[x].iter().map(|&(y, b)| b * two * ((omega[x] - omega[y]).cosh() - T::one())).sum();
                s / self.measure[x]
            })
            .fold(T::zero(), T::max)
    }

    /// Converts the scalar type, e.g. for `f32` experiments.
    pub fn cast<U: Real>(&self) -> WeightedGraph<U> {
        let conv = |v: T| U::of(v.as_f64());
        WeightedGraph::assemble(
            self.ids.clone(),
            self.measure.iter().map(|&m| conv(m)).collect(),
            self.edges.iter().map(|e| Edge { u: e.u, v: e.v, weight: conv(e.weight) }).collect(),
            self.dirichlet.clone(),
        )
    }

    /// Copy with a different measure; the weights and boundary are kept.
    pub fn with_measure(&self, measure: Vec<T>) -> Result<Self> {
        assert_eq!(measure.len(), self.len());
        let mut raw = RawGraph::new();
        for (id, &m) in self.ids.iter().zip(&measure) {
            raw.add_vertex(id.clone(), m);
        }
        for e in &self.edges {
            raw.add_edge(e.u, e.v, e.weight);
        }
        for x in 0..self.len() {
            if self.dirichlet[x] {
                raw.set_dirichlet(x);
            }
        }
        raw.build()
    }
}
