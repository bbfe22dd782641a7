//! Tree, centrality and community structure on planted graphs and markets.

use nalgebra::DMatrix;
use stocknet::infostats::{pair_sweep, PairConfig};
use stocknet::netgraph::{
    adjacency_matrix, analyze_network, fiedler_communities, laplacian_matrix, mst_prim, perron_scores, Edge, Node, SpanningTree,
    WeightedGraph,
};
use stocknet::synth::{generate_returns, MarketSpec};

#[test]
fn planted_two_blocks_split_exactly() {
    for (a, b) in [(4, 4), (7, 5), (10, 3)] {
        let k = a + b;
        let mut adj = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                if i != j && (i < a) == (j < a) {
                    adj[(i, j)] = 1.0;
                }
            }
        }
        adj[(a - 1, a)] = 1.0;
        adj[(a, a - 1)] = 1.0;
        let split = fiedler_communities(&laplacian_matrix(&adj)).unwrap();
        let side = split.community[0];
        assert!(split.community[..a].iter().all(|&c| c == side));
        assert!(split.community[a..].iter().all(|&c| c != side));
        assert!(split.vector.iter().sum::<f64>().abs() < 1e-8);
    }
}

#[test]
fn perron_scores_positive_and_scale_free() {
    let nodes: Vec<Node> = (0..7)
        .map(|i| Node {
            symbol: format!("N{i}"),
            sector: "X".into(),
        })
        .collect();
    let edges = [(0, 1), (0, 2), (0, 3), (3, 4), (3, 5), (5, 6)].map(|(i, j)| Edge { i, j, weight: 1.0 });
    let t = SpanningTree::new(WeightedGraph::new(nodes, edges).unwrap()).unwrap();
    let a = adjacency_matrix(&t);
    let p = perron_scores(&a).unwrap();
    assert!(p.iter().all(|&x| x > 0.0));
    let q = perron_scores(&(a * 3.0)).unwrap();
    assert!(p.iter().zip(&q).all(|(x, y)| (x - y).abs() < 1e-12));
}

#[test]
fn block_market_trees_follow_sectors() {
    let mut s = MarketSpec::blocks(24, 4, 0.4, 0.3);
    s.days = 4;
    s.seed = 12;
    let p = generate_returns(&s).unwrap();
    let pm = pair_sweep(&p, &PairConfig { trials: 0, ..PairConfig::default() }).unwrap();
    let sectors = p.sector_list();
    for method in ["corr", "mi"] {
        let a = analyze_network(&pm, &sectors, method, 4).unwrap();
        let t = &a.tree;
        assert_eq!(t.edges().len(), 23);
        assert_eq!(t.degrees().iter().sum::<usize>(), 46);
        assert!(a.intra_sector_edge_fraction() > 0.5, "{method}: {}", a.intra_sector_edge_fraction());
        if let Some(f) = a.hubs.mean_same_sector_fraction() {
            assert!(f > 0.5);
        }
        let mst = mst_prim(&WeightedGraph::new(t.nodes().to_vec(), t.edges().to_vec()).unwrap()).unwrap();
        assert_eq!(mst.total_weight(), t.total_weight());
    }
}
