use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub symbol: String,
    pub sector: String,
}

/// Undirected edge with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Build a graph, canonicalising edge endpoints.
    pub fn new(nodes: Vec<Node>, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let k = nodes.len();
        let mut out = Vec::new();
        for e in edges {
            if e.i == e.j {
                return Err(Error::invalid(format!("self-loop on node {}", e.i)));
            }
            if e.i.max(e.j) >= k {
                return Err(Error::invalid(format!("edge ({}, {}) outside {k} nodes", e.i, e.j)));
            }
            if !e.weight.is_finite() || e.weight < 0.0 {
                return Err(Error::invalid(format!("edge ({}, {}) has weight {}", e.i, e.j, e.weight)));
            }
            out.push(Edge {
                i: e.i.min(e.j),
                j: e.i.max(e.j),
                weight: e.weight,
            });
        }
        Ok(Self { nodes, edges: out })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.node_count()];
        for e in &self.edges {
            d[e.i] += 1;
            d[e.j] += 1;
        }
        d
    }

    /// Neighbour lists, each sorted ascending.
    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        adj.iter_mut().for_each(|a| a.sort_unstable());
        adj
    }

    pub fn is_connected(&self) -> bool {
        let k = self.node_count();
        if k == 0 {
            return true;
        }
        let adj = self.adjacency_lists();
        let mut seen = vec![false; k];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// A spanning tree: connected, `k − 1` edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanningTree(WeightedGraph);

impl SpanningTree {
    pub fn new(graph: WeightedGraph) -> Result<Self> {
        if graph.node_count() == 0 || graph.edge_count() != graph.node_count() - 1 {
            return Err(Error::invalid(format!(
                "{} edges cannot span {} nodes as a tree",
                graph.edge_count(),
                graph.node_count()
            )));
        }
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(Self(graph))
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.0
    }

    pub fn nodes(&self) -> &[Node] {
        &self.0.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.0.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.0.total_weight()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.0.degrees()
    }
}

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Complete graph weighted by a distance matrix.
pub fn graph_from_distances(distances: &DMatrix<f64>, symbols: &[String], sectors: &[String]) -> Result<WeightedGraph> {
    let k = distances.nrows();
    if !distances.is_square() || symbols.len() != k || sectors.len() != k {
        return Err(Error::invalid("distance matrix, symbols and sectors disagree in size"));
    }
    for i in 0..k {
        if distances[(i, i)].abs() > SYMMETRY_TOLERANCE {
            return Err(Error::invalid(format!("nonzero self-distance {} at {i}", distances[(i, i)])));
        }
        for j in (i + 1)..k {
            let (a, b) = (distances[(i, j)], distances[(j, i)]);
            if (a - b).abs() > SYMMETRY_TOLERANCE {
                return Err(Error::NotSymmetric((a - b).abs()));
            }
            if a < 0.0 || !a.is_finite() {
                return Err(Error::invalid(format!("distance ({i}, {j}) = {a}")));
            }
        }
    }
    let nodes = symbols
        .iter()
        .zip(sectors)
        .map(|(s, c)| Node {
            symbol: s.clone(),
            sector: c.clone(),
        })
        .collect();
    let edges = (0..k).flat_map(|i| ((i + 1)..k).map(move |j| (i, j))).map(|(i, j)| Edge {
        i,
        j,
        weight: distances[(i, j)],
    });
    WeightedGraph::new(nodes, edges)
}

#[cfg(test)]
pub(crate) fn test_nodes(k: usize) -> Vec<Node> {
    (0..k)
        .map(|i| Node {
            symbol: format!("S{i}"),
            sector: "X".into(),
        })
        .collect()
}
