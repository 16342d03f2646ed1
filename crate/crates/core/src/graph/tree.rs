use std::collections::BTreeSet;

use super::{GraphError, LabeledGraph};

/// A tree-shaped [`LabeledGraph`]: the root has no incoming edge, every
/// other node exactly one, and every node is reachable from the root.
#[derive(Clone, Debug)]
pub struct FiniteTree {
    graph: LabeledGraph,
    /// `(parent, action)` of the unique incoming edge.
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    children: Vec<Vec<usize>>,
}

impl FiniteTree {
    pub fn from_graph(graph: LabeledGraph) -> Result<Self, GraphError> {
        let n = graph.num_nodes();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for (u, a, v) in graph.edges() {
            if v == graph.root() {
                return Err(GraphError::invalid(
                    "edges",
                    format!("root '{}' has an incoming edge", graph.node_id(v)),
                ));
            }
            if parent[v].is_some() {
                return Err(GraphError::invalid(
                    "edges",
                    format!("node '{}' has more than one incoming edge", graph.node_id(v)),
                ));
            }
            parent[v] = Some((u, a));
            children[u].push(v);
        }
        let mut depth = vec![usize::MAX; n];
        depth[graph.root()] = 0;
        let mut stack = vec![graph.root()];
        while let Some(u) = stack.pop() {
            for &v in &children[u] {
                depth[v] = depth[u] + 1;
                stack.push(v);
            }
        }
        if let Some(v) = (0..n).find(|&v| depth[v] == usize::MAX) {
            return Err(GraphError::invalid(
                "nodes",
                format!("node '{}' is not reachable from the root", graph.node_id(v)),
            ));
        }
        Ok(FiniteTree {
            graph,
            parent,
            depth,
            children,
        })
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn into_graph(self) -> LabeledGraph {
        self.graph
    }

    pub fn root(&self) -> usize {
        self.graph.root()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v].map(|(p, _)| p)
    }

    /// Action on the edge into `v`.
    pub fn incoming_action(&self, v: usize) -> Option<usize> {
        self.parent[v].map(|(_, a)| a)
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// The unique node sequence from the root to `v`, both inclusive.
    pub fn path_to(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// True if `path` starts at the root and follows tree edges.
    pub fn is_root_path(&self, path: &[usize]) -> bool {
        match path.first() {
            Some(&v) if v == self.root() => path
                .windows(2)
                .all(|w| w[1] < self.graph.num_nodes() && self.parent(w[1]) == Some(w[0])),
            _ => false,
        }
    }

    /// True if `prefix` is a prefix of the root path of `v`.
    pub fn has_path_prefix(&self, v: usize, prefix: &[usize]) -> bool {
        match prefix.last() {
            None => true,
            Some(&last) => {
                let d = prefix.len() - 1;
                if self.depth[v] < d {
                    return false;
                }
                let mut cur = v;
                for _ in 0..self.depth[v] - d {
                    cur = self.parent(cur).expect("depth bounds ancestors");
                }
                cur == last
            }
        }
    }

    /// Canonical string of the tree shape with labels and actions, ignoring
    /// node ids and child order. Equal strings mean isomorphic trees.
    pub fn canonical_form(&self) -> String {
        self.canonical_at(self.root())
    }

    fn canonical_at(&self, v: usize) -> String {
        let sig = self.graph.signature();
        let colors: Vec<&str> = self
            .graph
            .colors(v)
            .iter()
            .map(|&c| sig.colors()[c].as_str())
            .collect();
        let mut kids: Vec<String> = self.children[v]
            .iter()
            .map(|&w| {
                let a = &sig.actions()[self.incoming_action(w).expect("child has parent")];
                format!("{a}:{}", self.canonical_at(w))
            })
            .collect();
        kids.sort();
        format!("{{{}|{}}}", colors.join(","), kids.join(";"))
    }
}

/// Depth-bounded prefix of the tree unfolding.
///
/// Tree nodes are edge paths from the root of length at most `depth`; the
/// id of a child is `<parent id>.<action>.<target id>`.
pub fn unfold(g: &LabeledGraph, depth: usize) -> FiniteTree {
    let sig = g.signature().clone();
    let mut ids = vec![g.node_id(g.root()).to_string()];
    let mut labels: Vec<BTreeSet<usize>> = vec![g.colors(g.root()).clone()];
    let mut origin = vec![g.root()];
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &t in &frontier {
            let v = origin[t];
            for (a, w) in g.out_edges(v) {
                let id = format!("{}.{}.{}", ids[t], sig.actions()[a], g.node_id(w));
                let child = ids.len();
                ids.push(id);
                labels.push(g.colors(w).clone());
                origin.push(w);
                edges.push((t, a, child));
                next.push(child);
            }
        }
        frontier = next;
    }
    let graph = LabeledGraph::from_parts(sig, ids, labels, edges, 0)
        .expect("unfolding of a valid graph is valid");
    FiniteTree::from_graph(graph).expect("unfolding is tree-shaped")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{example_graph, GraphBuilder, Signature};

    #[test]
    fn depth_zero_is_root_only() {
        let g = example_graph();
        let t = unfold(&g, 0);
        assert_eq!(t.graph().num_nodes(), 1);
        assert_eq!(t.graph().colors(0), g.colors(g.root()));
    }

    #[test]
    fn example_graph_unfolds_to_path() {
        let t = unfold(&example_graph(), 2);
        let g = t.graph();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(t.height(), 2);
        let by_depth = |k| g.nodes().find(|&v| t.depth(v) == k).unwrap();
        assert!(g.colors(by_depth(0)).is_empty());
        assert_eq!(g.colors(by_depth(1)).len(), 1);
        assert!(g.colors(by_depth(2)).is_empty());
    }

    #[test]
    fn two_successors() {
        let sig = Signature::new(["a", "b"], ["f"]).unwrap();
        let mut b = GraphBuilder::new(sig);
        for id in ["r", "x"] {
            b.node(id, None::<&str>).unwrap();
        }
        // same target under two actions still gives two children
        b.edge("r", "a", "x").unwrap();
        b.edge("r", "b", "x").unwrap();
        b.root("r").unwrap();
        let t = unfold(&b.build().unwrap(), 1);
        assert_eq!(t.children(t.root()).len(), 2);
    }

    #[test]
    fn rejects_non_trees() {
        let g = example_graph();
        assert!(FiniteTree::from_graph(g).is_err());
        let sig = Signature::new(["a"], ["f"]).unwrap();
        let mut b = GraphBuilder::new(sig);
        for id in ["r", "x", "y"] {
            b.node(id, None::<&str>).unwrap();
        }
        b.edge("r", "a", "x").unwrap();
        b.root("r").unwrap();
        // y unreachable
        assert!(FiniteTree::from_graph(b.build().unwrap()).is_err());
    }

    #[test]
    fn paths_and_prefixes() {
        let t = unfold(&example_graph(), 4);
        let deepest = t.graph().nodes().max_by_key(|&v| t.depth(v)).unwrap();
        let path = t.path_to(deepest);
        assert_eq!(path.len(), 5);
        assert!(t.is_root_path(&path));
        assert!(t.has_path_prefix(deepest, &path[..3]));
        assert!(!t.has_path_prefix(path[1], &path[..3]));
        assert!(!t.is_root_path(&path[1..]));
    }
}
