//! Graph generators: paths, cycles, lattice boxes, complete graphs, antitrees
//! and seeded random weighted graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{RawGraph, WeightedGraph};
use crate::scalar::Real;

/// Redraws allowed before a disconnected random graph is reported.
pub const RANDOM_RETRIES: u64 = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Path {
        n: usize,
        #[serde(default)]
        dirichlet_ends: bool,
    },
    Cycle {
        n: usize,
    },
    LatticeBox {
        w: usize,
        h: usize,
        #[serde(default)]
        dirichlet_frame: bool,
    },
    Complete {
        n: usize,
    },
    Antitree {
        gamma: f64,
        spheres: usize,
        #[serde(default)]
        truncate: bool,
    },
    RandomWeighted {
        n: usize,
        edge_prob: f64,
        #[serde(default)]
        weight: WeightDist,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightDist {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl Default for WeightDist {
    fn default() -> Self {
        WeightDist::Uniform { lo: 0.1, hi: 2.0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureChoice {
    /// `m ≡ 1`.
    #[default]
    Counting,
    /// `m = deg`.
    Normalizing,
    Custom {
        values: Vec<f64>,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub measure: MeasureChoice,
    /// Flags vertices at hop distance `≥ k` from the first vertex as Dirichlet.
    #[serde(default)]
    pub dirichlet_beyond: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, measure: MeasureChoice) -> Self {
        GeneratorSpec { family, measure, dirichlet_beyond: None, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn generate<T: Real>(&self) -> Result<WeightedGraph<T>> {
        let mut raw = match &self.family {
            Family::Path { n, dirichlet_ends } => path_topology(*n, *dirichlet_ends)?,
            Family::Cycle { n } => cycle_topology(*n)?,
            Family::LatticeBox { w, h, dirichlet_frame } => lattice_topology(*w, *h, *dirichlet_frame)?,
            Family::Complete { n } => complete_topology(*n)?,
            Family::Antitree { gamma, spheres, truncate } => antitree_topology(*gamma, *spheres, *truncate)?,
            Family::RandomWeighted { n, edge_prob, weight } => random_topology(*n, *edge_prob, weight, self.seed)?,
        };
        if let Some(k) = self.dirichlet_beyond {
            for x in hops_at_least(&raw, k) {
                raw.set_dirichlet(x);
            }
        }
        let g = raw.build()?;
        let measure = match &self.measure {
            MeasureChoice::Counting => return Ok(g.cast()),
            MeasureChoice::Normalizing => g.degrees().to_vec(),
            MeasureChoice::Custom { values } => {
                if values.len() != g.len() {
                    return Err(Error::Precondition(format!("custom measure has {} values for {} vertices", values.len(), g.len())));
                }
                values.clone()
            }
            MeasureChoice::Uniform { lo, hi } => {
                check_range(*lo, *hi, "measure")?;
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(u64::MAX);
                (0..g.len()).map(|_| rng.random_range(*lo..=*hi)).collect()
            }
        };
        Ok(g.with_measure(measure)?.cast())
    }
}

fn check_size(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::Precondition(format!("{what} needs at least {min}, got {n}")));
    }
    Ok(())
}

fn check_range(lo: f64, hi: f64, what: &str) -> Result<()> {
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(Error::Precondition(format!("{what} range must satisfy 0 < lo <= hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

fn unit_vertices(n: usize, id: impl Fn(usize) -> String) -> RawGraph<f64> {
    let mut raw = RawGraph::new();
    for i in 0..n {
        raw.add_vertex(id(i), 1.0);
    }
    raw
}

fn path_topology(n: usize, dirichlet_ends: bool) -> Result<RawGraph<f64>> {
    check_size(n, 2, "path")?;
    let mut raw = unit_vertices(n, |i| i.to_string());
    for i in 1..n {
        raw.add_edge(i - 1, i, 1.0);
    }
    if dirichlet_ends {
        raw.set_dirichlet(0);
        raw.set_dirichlet(n - 1);
    }
    Ok(raw)
}

fn cycle_topology(n: usize) -> Result<RawGraph<f64>> {
    check_size(n, 3, "cycle")?;
    let mut raw = unit_vertices(n, |i| i.to_string());
    for i in 0..n {
        raw.add_edge(i, (i + 1) % n, 1.0);
    }
    Ok(raw)
}

fn lattice_topology(w: usize, h: usize, dirichlet_frame: bool) -> Result<RawGraph<f64>> {
    check_size(w, 2, "lattice width")?;
    check_size(h, 2, "lattice height")?;
    let mut raw = unit_vertices(w * h, |k| format!("{},{}", k % w, k / w));
    for j in 0..h {
        for i in 0..w {
            let k = j * w + i;
            if i + 1 < w {
                raw.add_edge(k, k + 1, 1.0);
            }
            if j + 1 < h {
                raw.add_edge(k, k + w, 1.0);
            }
            if dirichlet_frame && (i == 0 || j == 0 || i + 1 == w || j + 1 == h) {
                raw.set_dirichlet(k);
            }
        }
    }
    Ok(raw)
}

fn complete_topology(n: usize) -> Result<RawGraph<f64>> {
    check_size(n, 2, "complete graph")?;
    let mut raw = unit_vertices(n, |i| i.to_string());
    for i in 0..n {
        for j in i + 1..n {
            raw.add_edge(i, j, 1.0);
        }
    }
    Ok(raw)
}

/// Sphere sizes `s_0 = 1`, `s_k = ⌊k^γ⌋`.
pub fn antitree_sphere_sizes(gamma: f64, spheres: usize) -> Vec<usize> {
    (0..spheres).map(|k| if k == 0 { 1 } else { ((k as f64).powf(gamma) + 1e-9).floor() as usize }).collect()
}

/// Antitree with spheres `S_0, …, S_{K−1}` and complete bipartite joins
/// between consecutive spheres; `truncate` flags `S_{K−1}` as Dirichlet.
pub fn antitree<T: Real>(gamma: f64, spheres: usize, measure: MeasureChoice, truncate: bool) -> Result<WeightedGraph<T>> {
    GeneratorSpec::new(Family::Antitree { gamma, spheres, truncate }, measure).generate()
}

fn antitree_topology(gamma: f64, spheres: usize, truncate: bool) -> Result<RawGraph<f64>> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(Error::Precondition(format!("antitree exponent must lie in (0, 2), got {gamma}")));
    }
    check_size(spheres, 2, "antitree sphere count")?;
    let sizes = antitree_sphere_sizes(gamma, spheres);
    let mut raw = RawGraph::new();
    let mut layers: Vec<Vec<usize>> = Vec::with_capacity(spheres);
    for (k, &s) in sizes.iter().enumerate() {
        layers.push((0..s).map(|j| raw.add_vertex(format!("{k}.{j}"), 1.0)).collect());
    }
    for k in 1..spheres {
        for &a in &layers[k - 1] {
            for &b in &layers[k] {
                raw.add_edge(a, b, 1.0);
            }
        }
    }
    if truncate {
        for &x in &layers[spheres - 1] {
            raw.set_dirichlet(x);
        }
    }
    Ok(raw)
}

fn random_topology(n: usize, p: f64, weight: &WeightDist, seed: u64) -> Result<RawGraph<f64>> {
    check_size(n, 2, "random graph")?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Precondition(format!("edge probability must lie in (0, 1], got {p}")));
    }
    if let WeightDist::Uniform { lo, hi } = weight {
        check_range(*lo, *hi, "weight")?;
    }
    for attempt in 0..RANDOM_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let mut raw = unit_vertices(n, |i| i.to_string());
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    let w = match weight {
                        WeightDist::Constant { value } => *value,
                        WeightDist::Uniform { lo, hi } => rng.random_range(*lo..=*hi),
                    };
                    raw.add_edge(i, j, w);
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        if reachable(&adj, 0).iter().all(|&d| d != usize::MAX) {
            return Ok(raw);
        }
    }
    Err(Error::Precondition(format!("no connected draw of G({n}, {p}) within {RANDOM_RETRIES} retries")))
}

fn reachable(adj: &[Vec<usize>], root: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = std::collections::VecDeque::from([root]);
    dist[root] = 0;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

fn hops_at_least(raw: &RawGraph<f64>, k: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); raw.len()];
    for &(x, y, _) in raw.entries() {
        adj[x].push(y);
    }
    reachable(&adj, 0).into_iter().enumerate().filter(|&(_, d)| d != usize::MAX && d >= k).map(|(x, _)| x).collect()
}

/// `d = 2(γ+1)/(2−γ)`, the volume growth exponent of the antitree.
pub fn antitree_dimension(gamma: f64) -> f64 {
    2.0 * (gamma + 1.0) / (2.0 - gamma)
}

/// `p_t(x, y)` on one Dirichlet truncation.
#[derive(Clone, Debug, Serialize)]
pub struct TruncationStep {
    /// Vertices at hop distance `≥ radius` from the first vertex are Dirichlet.
    pub radius: usize,
    pub active: usize,
    pub kernel: f64,
    /// Change from the previous truncation; absent for the first.
    pub change: Option<f64>,
}

/// Truncation sensitivity of the kernel: `p_t(x, y)` on the nested
/// truncations `spec` with `dirichlet_beyond = k` for each `k` in `radii`.
///
/// This measures how far the finite kernel has settled, not a convergence
/// rate. Vertex ids are stable because truncation flags vertices instead of
/// deleting them; `x` and `y` must stay active at every radius.
pub fn truncation_sensitivity(spec: &GeneratorSpec, radii: &[usize], x: &str, y: &str, t: f64) -> Result<Vec<TruncationStep>> {
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("truncation radii must be nonempty and strictly increasing".into()));
    }
    let mut out: Vec<TruncationStep> = Vec::with_capacity(radii.len());
    for &k in radii {
        let g: WeightedGraph<f64> = GeneratorSpec { dirichlet_beyond: Some(k), ..spec.clone() }.generate()?;
        let (xi, yi) = (g.index_of(x)?, g.index_of(y)?);
        if g.is_dirichlet(xi) || g.is_dirichlet(yi) {
            return Err(Error::Precondition(format!("`{x}` or `{y}` lies outside the truncation at radius {k}")));
        }
        let kernel = crate::semigroup::HeatSystem::build(&g)?.kernel_entry(xi, yi, t)?;
        let change = out.last().map(|prev| (kernel - prev.kernel).abs());
        out.push(TruncationStep { radius: k, active: g.active_vertices().len(), kernel, change });
    }
    Ok(out)
}
