use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::DepGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonNode {
    pub id: String,
    pub layer: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonEdge {
    pub from: String,
    pub to: String,
}

/// Wire form of a graph; both arrays sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub nodes: Vec<JsonNode>,
    pub edges: Vec<JsonEdge>,
}

impl DepGraph {
    /// Graphviz DOT text. Nodes, then edges, each in lexicographic order;
    /// layers (when assigned) appear as a `rank` node attribute.
    pub fn export_dot(&self) -> String {
        self.dot_with_header(None)
    }

    /// DOT text carrying `sfdp` layout hints for the browser renderer.
    pub fn export_sfdp(&self) -> String {
        self.dot_with_header(Some("  graph [layout=sfdp, overlap=prism, splines=true];\n"))
    }

    fn dot_with_header(&self, header: Option<&str>) -> String {
        let mut out = String::from("digraph mml {\n");
        if let Some(h) = header {
            out.push_str(h);
        }
        for node in &self.nodes {
            match self.layer(node) {
                Some(rank) => {
                    let _ = writeln!(out, "  \"{node}\" [rank={rank}];");
                }
                None => {
                    let _ = writeln!(out, "  \"{node}\";");
                }
            }
        }
        for (from, to) in &self.edges {
            let _ = writeln!(out, "  \"{from}\" -> \"{to}\";");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            nodes: self
                .nodes
                .iter()
                .map(|n| JsonNode { id: n.to_string(), layer: self.layer(n) })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(a, b)| JsonEdge { from: a.to_string(), to: b.to_string() })
                .collect(),
        }
    }

    /// The serialized JSON graph, as served over HTTP.
    pub fn export_json(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("graph json serializes")
    }
}
