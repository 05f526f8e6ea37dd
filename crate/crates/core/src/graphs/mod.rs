//! MaxCut instances: the weighted graph type, instance files, the exact
//! enumeration oracle, canonical labeling and regular-graph generation.

mod canon;
mod generate;

pub use canon::{canonical_form, CanonicalForm};
pub use generate::{enumerate_regular, generate_regular, Count, GeneratedCorpus, RegularSpec};

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vertex count accepted by [`brute_force_maxcut`].
pub const ENUMERATION_LIMIT: usize = 26;

/// Absolute tolerance used when collecting degenerate ground states.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Undirected weighted graph with `i < j` for every stored edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    name: String,
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Validates and builds a graph. Edges given as `(j, i)` with `j > i` are
    /// stored as `(i, j)`; edge order is preserved.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (a, b, w) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !w.is_finite() {
                return Err(Error::NonFiniteWeight(i, j));
            }
            if !seen.insert((i, j)) {
                return Err(Error::DuplicateEdge(i, j));
            }
            out.push(Edge { i, j, w });
        }
        Ok(Self {
            name: name.into(),
            n,
            edges: out,
        })
    }

    /// Unit-weight graph from an edge list.
    pub fn unweighted(
        name: impl Into<String>,
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Self::new(name, n, edges.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.i] += 1;
            deg[e.j] += 1;
        }
        deg
    }

    /// Common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let deg = self.degrees();
        let first = *deg.first()?;
        deg.iter().all(|&d| d == first).then_some(first)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }
}

/// MaxCut energy of basis state `z`: minus the weight of the edges whose
/// endpoints sit on opposite sides. Bit `i` of `z` is qubit `i`.
///
/// Both the problem diagonal and the brute-force oracle go through this
/// function so their minima agree bit for bit.
#[inline]
pub fn cut_energy(edges: &[Edge], z: usize) -> f64 {
    let mut e = 0.0;
    for edge in edges {
        if ((z >> edge.i) ^ (z >> edge.j)) & 1 == 1 {
            e -= edge.w;
        }
    }
    e
}

/// Formats basis index `z` as a bitstring with qubit 0 leftmost.
pub fn bitstring(z: usize, n: usize) -> String {
    (0..n)
        .map(|i| if (z >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateSet {
    pub min_energy: f64,
    /// Basis indices attaining `min_energy` (within [`DEGENERACY_TOL`]), ascending.
    pub states: Vec<usize>,
}

impl GroundStateSet {
    pub fn degeneracy(&self) -> usize {
        self.states.len()
    }

    /// Collects the minimum and its attaining indices from a full energy table.
    pub fn from_energies(energies: &[f64]) -> Self {
        let min_energy = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let states = energies
            .iter()
            .enumerate()
            .filter(|(_, &e)| e - min_energy <= DEGENERACY_TOL)
            .map(|(z, _)| z)
            .collect();
        Self { min_energy, states }
    }
}

/// Exact MaxCut by evaluating every one of the `2^n` assignments.
pub fn brute_force_maxcut(g: &Graph) -> Result<GroundStateSet> {
    if g.n() > ENUMERATION_LIMIT {
        return Err(Error::QubitCap {
            n: g.n(),
            cap: ENUMERATION_LIMIT,
        });
    }
    let energies: Vec<f64> = (0..1usize << g.n())
        .map(|z| cut_energy(g.edges(), z))
        .collect();
    Ok(GroundStateSet::from_energies(&energies))
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    name: String,
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceFile {
            name: self.name.clone(),
            n: self.n,
            edges: self.edges.iter().map(|e| (e.i, e.j, e.w)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = InstanceFile::deserialize(d)?;
        Graph::new(raw.name, raw.n, raw.edges).map_err(serde::de::Error::custom)
    }
}

pub fn graph_from_json(text: &str) -> Result<Graph> {
    let raw: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    Graph::new(raw.name, raw.n, raw.edges)
}

pub fn graph_to_json(g: &Graph) -> Result<String> {
    Ok(serde_json::to_string_pretty(g)?)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    graph_from_json(&fs::read_to_string(path)?)
}

pub fn write_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let mut text = graph_to_json(g)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
