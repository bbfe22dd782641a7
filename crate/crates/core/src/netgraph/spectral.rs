use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::graph::SpanningTree;
use crate::error::{Error, Result};
use crate::rmt::{eigen_decompose, fix_sign};

/// Symmetric 0/1 adjacency of the tree.
pub fn adjacency_matrix(tree: &SpanningTree) -> DMatrix<f64> {
    let k = tree.nodes().len();
    let mut a = DMatrix::zeros(k, k);
    for e in tree.edges() {
        a[(e.i, e.j)] = 1.0;
        a[(e.j, e.i)] = 1.0;
    }
    a
}

pub fn laplacian_matrix(adjacency: &DMatrix<f64>) -> DMatrix<f64> {
    let mut l = -adjacency.clone();
    for i in 0..adjacency.nrows() {
        l[(i, i)] = adjacency.row(i).sum() - adjacency[(i, i)];
    }
    l
}

/// Connectivity of the graph whose edges are the positive entries.
pub fn is_connected(adjacency: &DMatrix<f64>) -> bool {
    let k = adjacency.nrows();
    if k == 0 {
        return true;
    }
    let mut seen = vec![false; k];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for w in 0..k {
            if !seen[w] && adjacency[(v, w)] > 0.0 {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

const PERRON_TOLERANCE: f64 = 1e-10;
const PERRON_MAX_ITER: usize = 100_000;

/// Perron eigenvector of a nonnegative symmetric matrix, normalised to sum 1.
///
/// Iterates on `A / ρ̄ + I` (ρ̄ the largest row sum), which has the same
/// leading eigenvector but no eigenvalue of equal modulus on bipartite graphs.
pub fn perron_scores(adjacency: &DMatrix<f64>) -> Result<Vec<f64>> {
    let k = adjacency.nrows();
    if k == 0 || !adjacency.is_square() {
        return Err(Error::invalid("adjacency must be a non-empty square matrix"));
    }
    if adjacency.iter().any(|&v| v < 0.0) {
        return Err(Error::invalid("adjacency has negative entries"));
    }
    if !is_connected(adjacency) {
        return Err(Error::Disconnected);
    }
    let bound = adjacency.row_iter().map(|r| r.sum()).fold(0.0, f64::max);
    if bound == 0.0 {
        return Ok(vec![1.0]);
    }
    let b = adjacency / bound + DMatrix::identity(k, k);
    let mut x = DVector::from_element(k, 1.0 / k as f64);
    for _ in 0..PERRON_MAX_ITER {
        let mut next = &b * &x;
        next /= next.sum();
        let delta = (&next - &x).amax();
        x = next;
        if delta < PERRON_TOLERANCE {
            break;
        }
    }
    Ok(x.iter().copied().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiedlerSplit {
    pub algebraic_connectivity: f64,
    /// Unit-norm, largest-magnitude entry positive.
    pub vector: Vec<f64>,
    /// 0 for entries ≥ −1e−10, 1 otherwise.
    pub community: Vec<u8>,
}

const ZERO_ENTRY: f64 = 1e-10;
const CONNECTIVITY_TOLERANCE: f64 = 1e-10;

pub fn fiedler_communities(laplacian: &DMatrix<f64>) -> Result<FiedlerSplit> {
    let k = laplacian.nrows();
    if k < 2 {
        return Err(Error::invalid("a split needs at least two nodes"));
    }
    let eig = eigen_decompose(laplacian)?;
    let idx = k - 2;
    let lambda2 = eig.values[idx];
    if lambda2 <= CONNECTIVITY_TOLERANCE * laplacian.amax().max(1.0) {
        return Err(Error::Disconnected);
    }
    let mut v: Vec<f64> = eig.vectors.column(idx).iter().copied().collect();
    // Remove round-off along the all-ones direction before fixing the sign.
    let mean = v.iter().sum::<f64>() / k as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    fix_sign(&mut v);
    let community = v.iter().map(|&x| u8::from(x < -ZERO_ENTRY)).collect();
    Ok(FiedlerSplit {
        algebraic_connectivity: lambda2,
        vector: v,
        community,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityReport {
    /// Sums to 1.
    pub perron: Vec<f64>,
    pub fiedler: FiedlerSplit,
}

impl CentralityReport {
    pub fn perron_pct(&self, v: usize) -> f64 {
        100.0 * self.perron[v]
    }
}

pub fn centrality(tree: &SpanningTree) -> Result<CentralityReport> {
    let a = adjacency_matrix(tree);
    Ok(CentralityReport {
        perron: perron_scores(&a)?,
        fiedler: fiedler_communities(&laplacian_matrix(&a))?,
    })
}
