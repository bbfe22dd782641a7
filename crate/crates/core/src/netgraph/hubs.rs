use serde::{Serialize, Serializer};

use super::graph::SpanningTree;
use super::spectral::CentralityReport;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HubEntry {
    pub node: usize,
    pub symbol: String,
    pub sector: String,
    pub degree: usize,
    /// Serialised as a 2-decimal string, like every reported percentage.
    #[serde(serialize_with = "two_decimals")]
    pub perron_pct: f64,
    pub neighbors: Vec<String>,
    pub neighbor_sectors: Vec<String>,
    pub same_sector_fraction: f64,
}

fn two_decimals<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:.2}"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HubReport {
    pub hub_threshold: usize,
    /// Ordered by Perron score, highest first.
    pub hubs: Vec<HubEntry>,
}

impl HubReport {
    pub fn mean_same_sector_fraction(&self) -> Option<f64> {
        (!self.hubs.is_empty()).then(|| self.hubs.iter().map(|h| h.same_sector_fraction).sum::<f64>() / self.hubs.len() as f64)
    }
}

/// Tree neighbourhoods of every node whose degree exceeds `hub_threshold`.
pub fn hub_neighborhood_report(tree: &SpanningTree, centrality: &CentralityReport, hub_threshold: usize) -> HubReport {
    let adj = tree.graph().adjacency_lists();
    let nodes = tree.nodes();
    let mut hubs: Vec<HubEntry> = adj
        .iter()
        .enumerate()
        .filter(|(_, nb)| nb.len() > hub_threshold)
        .map(|(v, nb)| {
            let sector = &nodes[v].sector;
            let same = nb.iter().filter(|&&w| &nodes[w].sector == sector).count();
            HubEntry {
                node: v,
                symbol: nodes[v].symbol.clone(),
                sector: sector.clone(),
                degree: nb.len(),
                perron_pct: centrality.perron_pct(v),
                neighbors: nb.iter().map(|&w| nodes[w].symbol.clone()).collect(),
                neighbor_sectors: nb.iter().map(|&w| nodes[w].sector.clone()).collect(),
                same_sector_fraction: same as f64 / nb.len() as f64,
            }
        })
        .collect();
    hubs.sort_by(|a, b| b.perron_pct.total_cmp(&a.perron_pct).then(a.node.cmp(&b.node)));
    HubReport { hub_threshold, hubs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::graph::{Edge, Node, WeightedGraph};
    use crate::netgraph::spectral::centrality;

    fn sector_tree(sectors: &[&str], edges: &[(usize, usize)]) -> SpanningTree {
        let nodes = sectors
            .iter()
            .enumerate()
            .map(|(i, s)| Node {
                symbol: format!("S{i}"),
                sector: s.to_string(),
            })
            .collect();
        let e = edges.iter().map(|&(i, j)| Edge { i, j, weight: 1.0 });
        SpanningTree::new(WeightedGraph::new(nodes, e).unwrap()).unwrap()
    }

    #[test]
    fn no_hubs_on_a_path() {
        let t = sector_tree(&["A", "A", "B"], &[(0, 1), (1, 2)]);
        let r = hub_neighborhood_report(&t, &centrality(&t).unwrap(), 4);
        assert!(r.hubs.is_empty());
        assert_eq!(r.mean_same_sector_fraction(), None);
    }

    #[test]
    fn percentage_serialises_to_two_decimals() {
        let t = sector_tree(&["A"; 6], &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        let r = hub_neighborhood_report(&t, &centrality(&t).unwrap(), 4);
        let json = serde_json::to_value(&r).unwrap();
        // Star K1,5: centre share 1/(1 + 5/sqrt(5)) = 30.9017...%.
        assert_eq!(json["hubs"][0]["perron_pct"], "30.90");
    }

    #[test]
    fn planted_sector_star() {
        let t = sector_tree(&["A"; 6], &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        let r = hub_neighborhood_report(&t, &centrality(&t).unwrap(), 4);
        assert_eq!(r.hubs.len(), 1);
        assert_eq!(r.hubs[0].degree, 5);
        assert_eq!(r.hubs[0].same_sector_fraction, 1.0);
    }

    #[test]
    fn mixed_neighbourhood_fraction() {
        let t = sector_tree(&["A", "A", "A", "B", "B", "C"], &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        let r = hub_neighborhood_report(&t, &centrality(&t).unwrap(), 4);
        assert!((r.hubs[0].same_sector_fraction - 0.4).abs() < 1e-15);
    }
}
