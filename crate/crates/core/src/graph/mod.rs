//! Signatures and finite rooted, edge-labeled, node-colored graphs.
//!
//! A [`LabeledGraph`] doubles as an NFA (accepting states carry a color) and,
//! when tree-shaped, as a [`FiniteTree`]. Nodes are addressed internally by
//! dense indices; the opaque string ids are kept for I/O only.

mod json;
mod product;
mod tree;

pub use json::{read_graph, write_graph};
pub use product::{power, product};
pub use tree::{unfold, FiniteTree};

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid {path}: {message}")]
    Invalid { path: String, message: String },
    #[error("malformed graph JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl GraphError {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        GraphError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }

    /// The field path of an invariant violation, if this is one.
    pub fn path(&self) -> Option<&str> {
        match self {
            GraphError::Invalid { path, .. } => Some(path),
            GraphError::Json(_) => None,
        }
    }
}

/// Name of the reset action of component `i` in a lifted signature.
pub fn reset_name(i: usize) -> String {
    format!("rst@{i}")
}

/// Name `x@i` of a base action or color lifted to component `i`.
pub fn lifted_name(base: &str, i: usize) -> String {
    format!("{base}@{i}")
}

/// Splits `x@i` into `("x", i)` at the last `@`.
pub fn split_lifted(name: &str) -> Option<(&str, usize)> {
    let (base, idx) = name.rsplit_once('@')?;
    if base.is_empty() || idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    // reject leading zeros so that names round-trip through `lifted_name`
    if idx.len() > 1 && idx.starts_with('0') {
        return None;
    }
    Some((base, idx.parse().ok()?))
}

fn valid_name(name: &str) -> bool {
    let mut parts = name.split('@');
    let head = parts.next().unwrap_or("");
    let head_ok = !head.is_empty()
        && head
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_');
    head_ok && parts.all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()))
}

/// Ordered, non-empty sets of action and color names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    actions: Vec<String>,
    colors: Vec<String>,
}

impl Signature {
    pub fn new<A, C>(actions: A, colors: C) -> Result<Self, GraphError>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        C: IntoIterator,
        C::Item: Into<String>,
    {
        let actions: Vec<String> = actions.into_iter().map(Into::into).collect();
        let colors: Vec<String> = colors.into_iter().map(Into::into).collect();
        for (field, names) in [("actions", &actions), ("colors", &colors)] {
            if names.is_empty() {
                return Err(GraphError::invalid(field, "must be non-empty"));
            }
            let mut seen = BTreeSet::new();
            for (k, name) in names.iter().enumerate() {
                if !valid_name(name) {
                    return Err(GraphError::invalid(
                        format!("{field}[{k}]"),
                        format!("bad name '{name}'"),
                    ));
                }
                if !seen.insert(name.as_str()) {
                    return Err(GraphError::invalid(
                        format!("{field}[{k}]"),
                        format!("duplicate name '{name}'"),
                    ));
                }
            }
        }
        Ok(Signature { actions, colors })
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    pub fn color_index(&self, name: &str) -> Option<usize> {
        self.colors.iter().position(|c| c == name)
    }

    /// The `d`-fold lifted signature: `x@i` for every action, then `rst@i`,
    /// and `c@i` for every color.
    pub fn lift(&self, d: usize) -> Result<Signature, GraphError> {
        if d == 0 {
            return Err(GraphError::invalid("d", "dimension must be at least 1"));
        }
        let mut actions = Vec::with_capacity(self.actions.len() * d + d);
        for a in &self.actions {
            actions.extend((0..d).map(|i| lifted_name(a, i)));
        }
        actions.extend((0..d).map(reset_name));
        let colors = self
            .colors
            .iter()
            .flat_map(|c| (0..d).map(move |i| lifted_name(c, i)))
            .collect::<Vec<_>>();
        Signature::new(actions, colors)
    }

    /// Recognizes a signature of the form `lift(base, d)` (in any order) and
    /// returns index tables into it.
    pub fn lifted_shape(&self) -> Option<LiftedShape> {
        let d = (0..)
            .take_while(|i| self.action_index(&reset_name(*i)).is_some())
            .count();
        if d == 0 {
            return None;
        }
        let mut base_actions: Vec<String> = Vec::new();
        for a in &self.actions {
            let (base, i) = split_lifted(a)?;
            if i >= d {
                return None;
            }
            if base != "rst" && !base_actions.iter().any(|b| b == base) {
                base_actions.push(base.to_string());
            }
        }
        let mut base_colors: Vec<String> = Vec::new();
        for c in &self.colors {
            let (base, i) = split_lifted(c)?;
            if i >= d {
                return None;
            }
            if !base_colors.iter().any(|b| b == base) {
                base_colors.push(base.to_string());
            }
        }
        let base = Signature::new(base_actions, base_colors).ok()?;
        let expected = base.lift(d).ok()?;
        if expected.actions.len() != self.actions.len() || expected.colors.len() != self.colors.len() {
            return None;
        }
        let action = base
            .actions
            .iter()
            .map(|a| {
                (0..d)
                    .map(|i| self.action_index(&lifted_name(a, i)))
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        let color = base
            .colors
            .iter()
            .map(|c| {
                (0..d)
                    .map(|i| self.color_index(&lifted_name(c, i)))
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        let reset = (0..d)
            .map(|i| self.action_index(&reset_name(i)))
            .collect::<Option<Vec<_>>>()?;
        Some(LiftedShape {
            base,
            d,
            action,
            reset,
            color,
        })
    }
}

/// Index tables of a lifted signature relative to its base signature.
#[derive(Clone, Debug)]
pub struct LiftedShape {
    pub base: Signature,
    pub d: usize,
    /// `action[a][i]` is the lifted action index of `a@i`.
    pub action: Vec<Vec<usize>>,
    /// `reset[i]` is the lifted action index of `rst@i`.
    pub reset: Vec<usize>,
    /// `color[c][i]` is the lifted color index of `c@i`.
    pub color: Vec<Vec<usize>>,
}

/// A finite rooted graph with action-labeled edges and color sets on nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    signature: Signature,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    root: usize,
    labels: Vec<BTreeSet<usize>>,
    succ: Vec<Vec<Vec<usize>>>,
    pred: Vec<Vec<Vec<usize>>>,
}

impl LabeledGraph {
    /// Builds a graph from index-based parts. Node ids must be unique, color
    /// and action indices must lie within the signature.
    pub fn from_parts(
        signature: Signature,
        ids: Vec<String>,
        labels: Vec<BTreeSet<usize>>,
        edges: impl IntoIterator<Item = (usize, usize, usize)>,
        root: usize,
    ) -> Result<Self, GraphError> {
        let n = ids.len();
        if labels.len() != n {
            return Err(GraphError::invalid("nodes", "labeling must cover every node"));
        }
        if root >= n {
            return Err(GraphError::invalid("root", "root is not a node"));
        }
        let mut index = HashMap::with_capacity(n);
        for (k, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), k).is_some() {
                return Err(GraphError::invalid(
                    format!("nodes[{k}].id"),
                    format!("duplicate node id '{id}'"),
                ));
            }
        }
        let ncolors = signature.colors.len();
        for (k, set) in labels.iter().enumerate() {
            if let Some(c) = set.iter().find(|&&c| c >= ncolors) {
                return Err(GraphError::invalid(
                    format!("nodes[{k}].colors"),
                    format!("color index {c} out of range"),
                ));
            }
        }
        let nactions = signature.actions.len();
        let mut succ = vec![vec![Vec::new(); n]; nactions];
        let mut pred = vec![vec![Vec::new(); n]; nactions];
        for (u, a, v) in edges {
            if u >= n || v >= n || a >= nactions {
                return Err(GraphError::invalid(
                    "edges",
                    format!("edge ({u},{a},{v}) out of range"),
                ));
            }
            succ[a][u].push(v);
            pred[a][v].push(u);
        }
        for lists in succ.iter_mut().chain(pred.iter_mut()) {
            for list in lists.iter_mut() {
                list.sort_unstable();
                list.dedup();
            }
        }
        Ok(LabeledGraph {
            signature,
            ids,
            index,
            root,
            labels,
            succ,
            pred,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn num_nodes(&self) -> usize {
        self.ids.len()
    }

    pub fn nodes(&self) -> std::ops::Range<usize> {
        0..self.ids.len()
    }

    pub fn node_id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn node_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn colors(&self, v: usize) -> &BTreeSet<usize> {
        &self.labels[v]
    }

    pub fn has_color(&self, v: usize, color: usize) -> bool {
        self.labels[v].contains(&color)
    }

    pub fn successors(&self, v: usize, action: usize) -> &[usize] {
        &self.succ[action][v]
    }

    pub fn predecessors(&self, v: usize, action: usize) -> &[usize] {
        &self.pred[action][v]
    }

    pub fn has_edge(&self, u: usize, action: usize, v: usize) -> bool {
        self.succ[action][u].binary_search(&v).is_ok()
    }

    /// All successors over every action, with the action index.
    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(move |(a, lists)| lists[v].iter().map(move |&w| (a, w)))
    }

    /// Every edge as `(source, action, target)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.nodes()
            .flat_map(move |u| self.out_edges(u).map(move |(a, v)| (u, a, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().flatten().map(Vec::len).sum()
    }

    /// Nodes reachable from the root along any edges.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_nodes()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(u) = stack.pop() {
            for (_, v) in self.out_edges(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// The subgraph induced by the nodes reachable from the root.
    pub fn restrict_to_reachable(&self) -> LabeledGraph {
        let keep = self.reachable();
        let mut remap = vec![usize::MAX; self.num_nodes()];
        let mut ids = Vec::new();
        let mut labels = Vec::new();
        for v in self.nodes().filter(|&v| keep[v]) {
            remap[v] = ids.len();
            ids.push(self.ids[v].clone());
            labels.push(self.labels[v].clone());
        }
        let edges = self
            .edges()
            .filter(|&(u, _, v)| keep[u] && keep[v])
            .map(|(u, a, v)| (remap[u], a, remap[v]))
            .collect::<Vec<_>>();
        LabeledGraph::from_parts(self.signature.clone(), ids, labels, edges, remap[self.root])
            .expect("restriction of a valid graph is valid")
    }

    /// Same graph with the root moved to `root`.
    pub fn with_root(&self, root: usize) -> LabeledGraph {
        assert!(root < self.num_nodes(), "root out of range");
        let mut g = self.clone();
        g.root = root;
        g
    }
}

/// Name-based incremental construction of a [`LabeledGraph`].
#[derive(Debug)]
pub struct GraphBuilder {
    signature: Signature,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    labels: Vec<BTreeSet<usize>>,
    edges: Vec<(usize, usize, usize)>,
    root: Option<usize>,
}

impl GraphBuilder {
    pub fn new(signature: Signature) -> Self {
        GraphBuilder {
            signature,
            ids: Vec::new(),
            index: HashMap::new(),
            labels: Vec::new(),
            edges: Vec::new(),
            root: None,
        }
    }

    pub fn node<I, S>(&mut self, id: &str, colors: I) -> Result<usize, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let k = self.ids.len();
        if self.index.contains_key(id) {
            return Err(GraphError::invalid(
                format!("nodes[{k}].id"),
                format!("duplicate node id '{id}'"),
            ));
        }
        let mut set = BTreeSet::new();
        for c in colors {
            let c = c.as_ref();
            let ci = self.signature.color_index(c).ok_or_else(|| {
                GraphError::invalid(format!("nodes[{k}].colors"), format!("unknown color '{c}'"))
            })?;
            set.insert(ci);
        }
        self.ids.push(id.to_string());
        self.index.insert(id.to_string(), k);
        self.labels.push(set);
        Ok(k)
    }

    pub fn edge(&mut self, from: &str, action: &str, to: &str) -> Result<(), GraphError> {
        let k = self.edges.len();
        let u = self.lookup(from, format!("edges[{k}][0]"))?;
        let a = self.signature.action_index(action).ok_or_else(|| {
            GraphError::invalid(format!("edges[{k}][1]"), format!("unknown action '{action}'"))
        })?;
        let v = self.lookup(to, format!("edges[{k}][2]"))?;
        self.edges.push((u, a, v));
        Ok(())
    }

    pub fn root(&mut self, id: &str) -> Result<(), GraphError> {
        self.root = Some(self.lookup(id, "root".to_string())?);
        Ok(())
    }

    fn lookup(&self, id: &str, path: String) -> Result<usize, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::invalid(path, format!("unknown node '{id}'")))
    }

    pub fn build(self) -> Result<LabeledGraph, GraphError> {
        let root = self
            .root
            .ok_or_else(|| GraphError::invalid("root", "no root given"))?;
        LabeledGraph::from_parts(self.signature, self.ids, self.labels, self.edges, root)
    }
}

/// The three-node `({a},{f})` graph with edges 0→1, 1→2, 2→1 and `f` on node 1.
pub fn example_graph() -> LabeledGraph {
    let sig = Signature::new(["a"], ["f"]).expect("valid signature");
    let mut b = GraphBuilder::new(sig);
    b.node("0", None::<&str>).unwrap();
    b.node("1", ["f"]).unwrap();
    b.node("2", None::<&str>).unwrap();
    b.edge("0", "a", "1").unwrap();
    b.edge("1", "a", "2").unwrap();
    b.edge("2", "a", "1").unwrap();
    b.root("0").unwrap();
    b.build().unwrap()
}
