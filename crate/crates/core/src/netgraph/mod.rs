//! Minimum spanning trees over pair distances and their structural summaries.

mod degree;
mod export;
mod graph;
mod hubs;
mod method;
mod mst;
mod spectral;

pub use degree::{degree_distribution, powerlaw_mle, DegreeDistribution, PowerLawFit, DEFAULT_HUB_THRESHOLD};
pub use export::{exporters, GexfExporter, GraphExporter, GraphmlExporter};
pub use graph::{graph_from_distances, Edge, Node, SpanningTree, WeightedGraph};
pub use hubs::{hub_neighborhood_report, HubEntry, HubReport};
pub use method::{analyze_distances, analyze_network, network_methods, CorrelationMethod, MutualInformationMethod, NetworkAnalysis, NetworkMethod};
pub use mst::mst_prim;
pub use spectral::{
    adjacency_matrix, centrality, fiedler_communities, is_connected, laplacian_matrix, perron_scores, CentralityReport, FiedlerSplit,
};
