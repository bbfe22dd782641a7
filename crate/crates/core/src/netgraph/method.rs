use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::Serialize;

use super::degree::{degree_distribution, DegreeDistribution};
use super::graph::{graph_from_distances, SpanningTree};
use super::hubs::{hub_neighborhood_report, HubReport};
use super::mst::mst_prim;
use super::spectral::{centrality, CentralityReport};
use crate::error::Result;
use crate::infostats::PairMatrix;
use crate::registry::{Named, Registry};

/// Which pair distance a network is built from.
pub trait NetworkMethod: Named + Send + Sync {
    /// Name of the distance field in [`PairMatrix::fields`].
    fn distance_field(&self) -> &'static str;
    fn distances<'a>(&self, pairs: &'a PairMatrix) -> &'a DMatrix<f64>;
}

/// `√(2(1 − ρ))`.
pub struct CorrelationMethod;

impl Named for CorrelationMethod {
    fn name(&self) -> &'static str {
        "corr"
    }
}

impl NetworkMethod for CorrelationMethod {
    fn distance_field(&self) -> &'static str {
        "d_corr"
    }

    fn distances<'a>(&self, pairs: &'a PairMatrix) -> &'a DMatrix<f64> {
        &pairs.d_corr
    }
}

/// `1 − I / H(X, Y)`.
pub struct MutualInformationMethod;

impl Named for MutualInformationMethod {
    fn name(&self) -> &'static str {
        "mi"
    }
}

impl NetworkMethod for MutualInformationMethod {
    fn distance_field(&self) -> &'static str {
        "d_mi"
    }

    fn distances<'a>(&self, pairs: &'a PairMatrix) -> &'a DMatrix<f64> {
        &pairs.d_mi
    }
}

pub fn network_methods() -> &'static Registry<dyn NetworkMethod> {
    static REGISTRY: OnceLock<Registry<dyn NetworkMethod>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r: Registry<dyn NetworkMethod> = Registry::new("network method");
        r.register(Box::new(CorrelationMethod));
        r.register(Box::new(MutualInformationMethod));
        r
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkAnalysis {
    pub method: String,
    pub tree: SpanningTree,
    pub degrees: DegreeDistribution,
    pub centrality: CentralityReport,
    pub hubs: HubReport,
}

impl NetworkAnalysis {
    /// Fraction of tree edges joining two nodes of the same sector.
    pub fn intra_sector_edge_fraction(&self) -> f64 {
        let nodes = self.tree.nodes();
        let edges = self.tree.edges();
        if edges.is_empty() {
            return 0.0;
        }
        edges.iter().filter(|e| nodes[e.i].sector == nodes[e.j].sector).count() as f64 / edges.len() as f64
    }
}

/// MST of the chosen distance plus its degree, centrality and hub summaries.
pub fn analyze_network(pairs: &PairMatrix, sectors: &[String], method: &str, hub_threshold: usize) -> Result<NetworkAnalysis> {
    let m = network_methods().get(method)?;
    analyze_distances(m.distances(pairs), &pairs.symbols, sectors, m.name(), hub_threshold)
}

/// As [`analyze_network`], from a distance matrix already selected by `method`.
pub fn analyze_distances(
    distances: &DMatrix<f64>,
    symbols: &[String],
    sectors: &[String],
    method: &str,
    hub_threshold: usize,
) -> Result<NetworkAnalysis> {
    let graph = graph_from_distances(distances, symbols, sectors)?;
    let tree = mst_prim(&graph)?;
    let degrees = degree_distribution(&tree, hub_threshold)?;
    let centrality = centrality(&tree)?;
    let hubs = hub_neighborhood_report(&tree, &centrality, hub_threshold);
    Ok(NetworkAnalysis {
        method: method.to_string(),
        tree,
        degrees,
        centrality,
        hubs,
    })
}
