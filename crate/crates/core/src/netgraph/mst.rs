use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::graph::{Edge, SpanningTree, WeightedGraph};
use crate::error::{Error, Result};

/// Frontier key ordered lexicographically by (weight, i, j).
#[derive(Debug, Clone, Copy)]
struct Key(f64, usize, usize);

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1)).then(self.2.cmp(&other.2))
    }
}

/// Prim's algorithm grown from node 0. Among equal-weight frontier edges the
/// smallest canonical `(i, j)` wins.
pub fn mst_prim(graph: &WeightedGraph) -> Result<SpanningTree> {
    let k = graph.node_count();
    if k == 0 {
        return Err(Error::invalid("empty graph"));
    }
    let mut incident: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
    for e in &graph.edges {
        incident[e.i].push((e.j, e.weight));
        incident[e.j].push((e.i, e.weight));
    }
    let mut in_tree = vec![false; k];
    let mut heap = BinaryHeap::new();
    let mut edges = Vec::with_capacity(k - 1);
    let visit = |v: usize, in_tree: &mut Vec<bool>, heap: &mut BinaryHeap<Reverse<Key>>| {
        in_tree[v] = true;
        for &(w, weight) in &incident[v] {
            if !in_tree[w] {
                heap.push(Reverse(Key(weight, v.min(w), v.max(w))));
            }
        }
    };
    visit(0, &mut in_tree, &mut heap);
    while let Some(Reverse(Key(weight, i, j))) = heap.pop() {
        let next = match (in_tree[i], in_tree[j]) {
            (true, false) => j,
            (false, true) => i,
            _ => continue,
        };
        edges.push(Edge { i, j, weight });
        visit(next, &mut in_tree, &mut heap);
    }
    if edges.len() != k - 1 {
        return Err(Error::Disconnected);
    }
    SpanningTree::new(WeightedGraph::new(graph.nodes.clone(), edges)?)
}
