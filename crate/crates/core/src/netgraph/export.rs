use std::fmt::Write;
use std::sync::OnceLock;

use super::graph::SpanningTree;
use super::spectral::CentralityReport;
use crate::registry::{Named, Registry};

/// Serialises a tree with per-node attributes `sector`, `degree`,
/// `perron_pct`, `community` and per-edge `weight`.
pub trait GraphExporter: Named + Send + Sync {
    fn extension(&self) -> &'static str;
    fn export(&self, tree: &SpanningTree, centrality: &CentralityReport) -> String;
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub struct GraphmlExporter;

impl Named for GraphmlExporter {
    fn name(&self) -> &'static str {
        "graphml"
    }
}

impl GraphExporter for GraphmlExporter {
    fn extension(&self) -> &'static str {
        "graphml"
    }

    fn export(&self, tree: &SpanningTree, centrality: &CentralityReport) -> String {
        let degrees = tree.degrees();
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n");
        s.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
        s.push_str("  <key id=\"sector\" for=\"node\" attr.name=\"sector\" attr.type=\"string\"/>\n");
        s.push_str("  <key id=\"degree\" for=\"node\" attr.name=\"degree\" attr.type=\"int\"/>\n");
        s.push_str("  <key id=\"perron_pct\" for=\"node\" attr.name=\"perron_pct\" attr.type=\"double\"/>\n");
        s.push_str("  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n");
        s.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
        s.push_str("  <graph id=\"mst\" edgedefault=\"undirected\">\n");
        for (v, node) in tree.nodes().iter().enumerate() {
            let _ = writeln!(
                s,
                "    <node id=\"n{v}\"><data key=\"label\">{}</data><data key=\"sector\">{}</data><data key=\"degree\">{}</data><data key=\"perron_pct\">{}</data><data key=\"community\">{}</data></node>",
                escape(&node.symbol),
                escape(&node.sector),
                degrees[v],
                centrality.perron_pct(v),
                centrality.fiedler.community[v],
            );
        }
        for (n, e) in tree.edges().iter().enumerate() {
            let _ = writeln!(
                s,
                "    <edge id=\"e{n}\" source=\"n{}\" target=\"n{}\"><data key=\"weight\">{}</data></edge>",
                e.i, e.j, e.weight
            );
        }
        s.push_str("  </graph>\n</graphml>\n");
        s
    }
}

pub struct GexfExporter;

impl Named for GexfExporter {
    fn name(&self) -> &'static str {
        "gexf"
    }
}

impl GraphExporter for GexfExporter {
    fn extension(&self) -> &'static str {
        "gexf"
    }

    fn export(&self, tree: &SpanningTree, centrality: &CentralityReport) -> String {
        let degrees = tree.degrees();
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str("<gexf xmlns=\"http://gexf.net/1.3\" version=\"1.3\">\n");
        s.push_str("  <graph mode=\"static\" defaultedgetype=\"undirected\">\n");
        s.push_str("    <attributes class=\"node\">\n");
        s.push_str("      <attribute id=\"sector\" title=\"sector\" type=\"string\"/>\n");
        s.push_str("      <attribute id=\"degree\" title=\"degree\" type=\"integer\"/>\n");
        s.push_str("      <attribute id=\"perron_pct\" title=\"perron_pct\" type=\"double\"/>\n");
        s.push_str("      <attribute id=\"community\" title=\"community\" type=\"integer\"/>\n");
        s.push_str("    </attributes>\n");
        s.push_str("    <nodes>\n");
        for (v, node) in tree.nodes().iter().enumerate() {
            let _ = writeln!(
                s,
                "      <node id=\"n{v}\" label=\"{}\"><attvalues><attvalue for=\"sector\" value=\"{}\"/><attvalue for=\"degree\" value=\"{}\"/><attvalue for=\"perron_pct\" value=\"{}\"/><attvalue for=\"community\" value=\"{}\"/></attvalues></node>",
                escape(&node.symbol),
                escape(&node.sector),
                degrees[v],
                centrality.perron_pct(v),
                centrality.fiedler.community[v],
            );
        }
        s.push_str("    </nodes>\n    <edges>\n");
        for (n, e) in tree.edges().iter().enumerate() {
            let _ = writeln!(s, "      <edge id=\"e{n}\" source=\"n{}\" target=\"n{}\" weight=\"{}\"/>", e.i, e.j, e.weight);
        }
        s.push_str("    </edges>\n  </graph>\n</gexf>\n");
        s
    }
}

pub fn exporters() -> &'static Registry<dyn GraphExporter> {
    static REGISTRY: OnceLock<Registry<dyn GraphExporter>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r: Registry<dyn GraphExporter> = Registry::new("graph format");
        r.register(Box::new(GraphmlExporter));
        r.register(Box::new(GexfExporter));
        r
    })
}
