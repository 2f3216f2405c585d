//! JSON graph files:
//! `{"vertices": [{"id", "m"}], "edges": [{"u", "v", "b"}], "dirichlet": [id]}`.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{RawGraph, WeightedGraph};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: String,
    pub m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: String,
    pub v: String,
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub dirichlet: Vec<String>,
}

impl GraphFile {
    pub fn from_graph<T: Real>(g: &WeightedGraph<T>) -> Self {
        GraphFile {
            vertices: (0..g.len()).map(|x| VertexRecord { id: g.id(x).to_owned(), m: g.measure(x).as_f64() }).collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord { u: g.id(e.u).to_owned(), v: g.id(e.v).to_owned(), b: e.weight.as_f64() })
                .collect(),
            dirichlet: (0..g.len()).filter(|&x| g.is_dirichlet(x)).map(|x| g.id(x).to_owned()).collect(),
        }
    }

    /// Rejects duplicate edges, nonpositive `m` and nonpositive `b`.
    pub fn into_graph<T: Real>(self) -> Result<WeightedGraph<T>> {
        let mut raw = RawGraph::new();
        let mut index = std::collections::HashMap::new();
        for v in &self.vertices {
            if !(v.m > 0.0) {
                return Err(Error::InvalidGraph(vec![format!("vertex {} has nonpositive measure {}", v.id, v.m)]));
            }
            let i = raw.add_vertex(v.id.clone(), T::of(v.m));
            if index.insert(v.id.clone(), i).is_some() {
                return Err(Error::InvalidGraph(vec![format!("duplicate vertex id {}", v.id)]));
            }
        }
        let lookup = |id: &str| index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_owned()));
        let mut seen = HashSet::new();
        for e in &self.edges {
            let (u, v) = (lookup(&e.u)?, lookup(&e.v)?);
            if !(e.b > 0.0) {
                return Err(Error::InvalidGraph(vec![format!("edge ({},{}) has nonpositive weight {}", e.u, e.v, e.b)]));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(vec![format!("duplicate edge ({},{})", e.u, e.v)]));
            }
            raw.add_edge(u, v, T::of(e.b));
        }
        for d in &self.dirichlet {
            raw.set_dirichlet(lookup(d)?);
        }
        raw.build()
    }
}

pub fn read_graph<T: Real>(path: &Path) -> Result<WeightedGraph<T>> {
    let text = std::fs::read_to_string(path)?;
    let file: GraphFile = serde_json::from_str(&text)?;
    file.into_graph()
}

pub fn write_graph<T: Real>(g: &WeightedGraph<T>, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&GraphFile::from_graph(g))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
