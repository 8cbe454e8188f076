//! Undirected graphs with self loops, padded to a power-of-two order.
//!
//! Node indices are 1-based throughout. An edge `{j, k}` is stored once with
//! `j <= k`; a self loop is the edge `{j, j}`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    NoNodes,
    #[error("edge {{{0},{1}}} has an endpoint outside 1..={2}")]
    EndpointOutOfRange(usize, usize, usize),
    #[error("duplicate edge {{{0},{1}}}")]
    DuplicateEdge(usize, usize),
    #[error("edge {{{0},{1}}} is not present and cannot be removed")]
    RemovalNotPresent(usize, usize),
    #[error("node {0} is outside 1..={1}")]
    NodeOutOfRange(usize, usize),
    #[error("graph file parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

fn normalize(j: usize, k: usize) -> (usize, usize) {
    if j <= k {
        (j, k)
    } else {
        (k, j)
    }
}

/// Undirected graph on `n_nodes = 2^m` nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
    padded_from: Option<usize>,
}

/// The coin directions available at a node: its neighbors, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoinDirections {
    pub node: usize,
    pub allowed: Vec<usize>,
}

impl Graph {
    /// Builds a graph on `nodes` nodes, padding with isolated nodes up to the
    /// next power of two (at least 2). Duplicate edges, in either
    /// orientation, are rejected.
    pub fn new<I>(nodes: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if nodes == 0 {
            return Err(GraphError::NoNodes);
        }
        let mut set = BTreeSet::new();
        for (j, k) in edges {
            if j == 0 || k == 0 || j > nodes || k > nodes {
                return Err(GraphError::EndpointOutOfRange(j, k, nodes));
            }
            let e = normalize(j, k);
            if !set.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
        }
        let n_nodes = nodes.next_power_of_two().max(2);
        Ok(Self {
            n_nodes,
            edges: set,
            padded_from: (n_nodes != nodes).then_some(nodes),
        })
    }

    /// All edges `{j, k}` with `j <= k <= n`, self loops included.
    pub fn complete(n: usize) -> Self {
        assert!(n >= 1, "complete graph needs at least one node");
        let edges = (1..=n).flat_map(|j| (j..=n).map(move |k| (j, k)));
        Self::new(n, edges).expect("complete graph edges are valid")
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Node count before padding.
    pub fn original_nodes(&self) -> usize {
        self.padded_from.unwrap_or(self.n_nodes)
    }

    pub fn padded_from(&self) -> Option<usize> {
        self.padded_from
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, j: usize, k: usize) -> bool {
        self.edges.contains(&normalize(j, k))
    }

    /// Copy of the graph with the listed edges removed. Fails on the first
    /// pair that is not an edge (including a pair listed twice).
    pub fn without_edges(&self, removals: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = self.clone();
        for &(j, k) in removals {
            let e = normalize(j, k);
            if !g.edges.remove(&e) {
                return Err(GraphError::RemovalNotPresent(e.0, e.1));
            }
        }
        Ok(g)
    }

    pub fn coin_directions(&self, j: usize) -> Result<CoinDirections, GraphError> {
        if j == 0 || j > self.n_nodes {
            return Err(GraphError::NodeOutOfRange(j, self.n_nodes));
        }
        Ok(CoinDirections {
            node: j,
            allowed: self.neighbors(j),
        })
    }

    /// Sorted neighbor list of `j` (1-based). Panics if `j` is out of range.
    pub(crate) fn neighbors(&self, j: usize) -> Vec<usize> {
        assert!(j >= 1 && j <= self.n_nodes);
        (1..=self.n_nodes)
            .filter(|&k| self.has_edge(j, k))
            .collect()
    }

    /// Every state `|j,k>` the walker may occupy, row-major.
    pub fn allowed_states(&self) -> Vec<(usize, usize)> {
        let n = self.n_nodes;
        (1..=n)
            .flat_map(|j| (1..=n).map(move |k| (j, k)))
            .filter(|&(j, k)| self.has_edge(j, k))
            .collect()
    }

    /// States `|j,k>` whose edge is absent, row-major.
    pub fn isolated_states(&self) -> Vec<(usize, usize)> {
        let n = self.n_nodes;
        (1..=n)
            .flat_map(|j| (1..=n).map(move |k| (j, k)))
            .filter(|&(j, k)| !self.has_edge(j, k))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            nodes: self.original_nodes(),
            edges: self.edges.iter().map(|&(j, k)| [j, k]).collect(),
        };
        serde_json::to_string(&file).expect("graph serializes")
    }
}

/// On-disk graph format: `{"nodes": <int>, "edges": [[j, k], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    nodes: usize,
    edges: Vec<[usize; 2]>,
}

/// Parses and validates a JSON graph file. Non-power-of-two node counts are
/// padded with isolated nodes.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Graph::new(file.nodes, file.edges.into_iter().map(|[j, k]| (j, k)))
}
