//! Vertex echolocation on finite graphs: vertex counting functions of the
//! adjacency and normalized Laplacian operators, cospectral vertices and
//! their relation to graph automorphisms.

mod automorphism;
mod format;
mod jacobi;
mod moments;
mod search;
mod spectrum;
mod trees;

pub use automorphism::{automorphism_orbits, find_isomorphism, are_isomorphic, MAX_AUTOMORPHISM_VERTICES};
pub use format::{parse_edge_list, parse_graph6, parse_graph6_lines, to_graph6};
pub use jacobi::{symmetric_eigen, SymmetricEigen};
pub use moments::{cospectral_vertex_pairs, exact_cospectral, walk_moments};
pub use search::{find_echolocation_failures, Failure, FailureSearch};
pub use spectrum::{
    adjacency_matrix, float_cospectral, normalized_laplacian, spectrum, vertex_counting_function, GraphSpectrum,
    SpectralCluster, DEFAULT_CLUSTER_TOL,
};
pub use trees::{enumerate_trees, MAX_TREE_VERTICES};

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which symmetric operator defines the vertex spectral measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    Adjacency,
    /// `I - D^{-1/2} A D^{-1/2}`.
    NormalizedLaplacian,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::Adjacency => "adjacency",
            Operator::NormalizedLaplacian => "normalized_laplacian",
        })
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjacency" => Ok(Operator::Adjacency),
            "normalized_laplacian" | "normalized-laplacian" | "laplacian" => Ok(Operator::NormalizedLaplacian),
            other => Err(Error::InvalidArgument(format!("unknown operator `{other}`"))),
        }
    }
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adjacency: Vec<bool>,
    neighbours: Vec<Vec<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("n", &self.n).field("edges", &self.edges()).finish()
    }
}

impl Graph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph { n, adjacency: vec![false; n * n], neighbours: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds `{u, v}`; repeated edges are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidArgument(format!("edge ({u}, {v}) out of range for {} vertices", self.n)));
        }
        if u == v {
            return Err(Error::InvalidArgument(format!("self-loop at {u}")));
        }
        if !self.adjacency[u * self.n + v] {
            self.adjacency[u * self.n + v] = true;
            self.adjacency[v * self.n + u] = true;
            self.neighbours[u].push(v);
            self.neighbours[v].push(u);
            self.neighbours[u].sort_unstable();
            self.neighbours[v].sort_unstable();
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u * self.n + v]
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.neighbours[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbours[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// Edges `(u, v)` with `u < v`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for &v in &self.neighbours[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.neighbours.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.neighbours[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    pub fn is_regular(&self) -> bool {
        self.neighbours.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// Errors unless the graph is connected.
    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    /// Identifier used in counting-function provenance.
    pub fn id(&self) -> String {
        to_graph6(self).unwrap_or_else(|_| format!("n{}e{}", self.n, self.edge_count()))
    }
}
