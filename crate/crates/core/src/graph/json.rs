use serde::{Deserialize, Serialize};

use super::{GraphBuilder, GraphError, LabeledGraph, Signature};

// Field order is alphabetical so the writer emits sorted keys.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    actions: Vec<String>,
    colors: Vec<String>,
    edges: Vec<(String, String, String)>,
    nodes: Vec<NodeDoc>,
    root: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    colors: Vec<String>,
    id: String,
}

/// Parses the graph JSON format and validates every graph invariant.
pub fn read_graph(bytes: &[u8]) -> Result<LabeledGraph, GraphError> {
    let doc: GraphDoc = serde_json::from_slice(bytes)?;
    let sig = Signature::new(doc.actions, doc.colors)?;
    let mut b = GraphBuilder::new(sig);
    for node in &doc.nodes {
        b.node(&node.id, &node.colors)?;
    }
    for (from, action, to) in &doc.edges {
        b.edge(from, action, to)?;
    }
    b.root(&doc.root)?;
    b.build()
}

/// Writes the normal form: nodes sorted by id, node colors and edges sorted
/// lexicographically, one line terminated by a newline.
pub fn write_graph(g: &LabeledGraph) -> Vec<u8> {
    let sig = g.signature();
    let mut nodes: Vec<NodeDoc> = g
        .nodes()
        .map(|v| {
            let mut colors: Vec<String> =
                g.colors(v).iter().map(|&c| sig.colors()[c].clone()).collect();
            colors.sort();
            NodeDoc {
                colors,
                id: g.node_id(v).to_string(),
            }
        })
        .collect();
    nodes.sort_by(|x, y| x.id.cmp(&y.id));
    let mut edges: Vec<(String, String, String)> = g
        .edges()
        .map(|(u, a, v)| {
            (
                g.node_id(u).to_string(),
                sig.actions()[a].clone(),
                g.node_id(v).to_string(),
            )
        })
        .collect();
    edges.sort();
    let doc = GraphDoc {
        actions: sig.actions().to_vec(),
        colors: sig.colors().to_vec(),
        edges,
        nodes,
        root: g.node_id(g.root()).to_string(),
    };
    let mut out = serde_json::to_vec(&doc).expect("graph documents always serialize");
    out.push(b'\n');
    out
}
