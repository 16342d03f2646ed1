//! Pumping finite trees between two nodes of a root path, and the example
//! languages used to exercise relative regularity.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::eval::{models, EvalError};
use crate::graph::{FiniteTree, GraphError, LabeledGraph, Signature};
use crate::logic::Formula;

#[derive(Debug, Error)]
pub enum PumpError {
    #[error("invalid pumping input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The nodes before `v_i`, from `v_i` up to but excluding `v_j`, and from
/// `v_j` on, classified by root-path prefixes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PumpPartition {
    pub before: Vec<usize>,
    pub segment: Vec<usize>,
    pub after: Vec<usize>,
}

fn validate(tree: &FiniteTree, path: &[usize], i: usize, j: usize) -> Result<(), PumpError> {
    if !tree.is_root_path(path) {
        return Err(PumpError::Invalid(
            "path must start at the root and follow edges".into(),
        ));
    }
    if !(0 < i && i < j && j < path.len()) {
        return Err(PumpError::Invalid(format!(
            "need 0 < i < j <= {}, got i={i} j={j}",
            path.len().saturating_sub(1)
        )));
    }
    Ok(())
}

pub fn partition_nodes(
    tree: &FiniteTree,
    path: &[usize],
    i: usize,
    j: usize,
) -> Result<PumpPartition, PumpError> {
    validate(tree, path, i, j)?;
    let mut part = PumpPartition {
        before: Vec::new(),
        segment: Vec::new(),
        after: Vec::new(),
    };
    for v in tree.graph().nodes() {
        if !tree.has_path_prefix(v, &path[..=i]) {
            part.before.push(v);
        } else if tree.has_path_prefix(v, &path[..=j]) {
            part.after.push(v);
        } else {
            part.segment.push(v);
        }
    }
    Ok(part)
}

/// Removes (`k = 0`) or repeats (`k ≥ 2`) the segment between `v_i` and
/// `v_j`. Segment copies are named `(id,k')`.
pub fn pump(
    tree: &FiniteTree,
    path: &[usize],
    i: usize,
    j: usize,
    k: usize,
) -> Result<FiniteTree, PumpError> {
    let part = partition_nodes(tree, path, i, j)?;
    let g = tree.graph();
    let mut ids: Vec<String> = Vec::new();
    let mut labels: Vec<BTreeSet<usize>> = Vec::new();
    let mut plain: BTreeMap<usize, usize> = BTreeMap::new();
    let mut copy: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &v in part.before.iter().chain(&part.after) {
        plain.insert(v, ids.len());
        ids.push(g.node_id(v).to_string());
        labels.push(g.colors(v).clone());
    }
    for c in 0..k {
        for &v in &part.segment {
            copy.insert((v, c), ids.len());
            ids.push(format!("({},{c})", g.node_id(v)));
            labels.push(g.colors(v).clone());
        }
    }
    let segment: BTreeSet<usize> = part.segment.iter().copied().collect();
    let in_segment = |v: usize| segment.contains(&v);
    let (vi_prev, vi, vj_prev, vj) = (path[i - 1], path[i], path[j - 1], path[j]);
    let mut edges = BTreeSet::new();
    for (u, a, w) in g.edges() {
        match (in_segment(u), in_segment(w)) {
            (false, false) => {
                edges.insert((plain[&u], a, plain[&w]));
            }
            (true, true) => {
                for c in 0..k {
                    edges.insert((copy[&(u, c)], a, copy[&(w, c)]));
                }
            }
            (false, true) => {
                debug_assert!(u == vi_prev && w == vi);
                if k == 0 {
                    edges.insert((plain[&u], a, plain[&vj]));
                } else {
                    edges.insert((plain[&u], a, copy[&(vi, 0)]));
                }
            }
            (true, false) => {
                debug_assert!(u == vj_prev && w == vj);
                if k > 0 {
                    for c in 0..k - 1 {
                        edges.insert((copy[&(u, c)], a, copy[&(vi, c + 1)]));
                    }
                    edges.insert((copy[&(u, k - 1)], a, plain[&w]));
                }
            }
        }
    }
    let root = plain[&tree.root()];
    let graph = LabeledGraph::from_parts(g.signature().clone(), ids, labels, edges, root)?;
    Ok(FiniteTree::from_graph(graph)?)
}

/// One tree's outcome: whether it lies in the context language, and if so
/// whether the formula holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RelativeVerdict {
    pub in_context: bool,
    /// Only claimed for trees in the context language.
    pub in_language: Option<bool>,
}

pub fn check_relative_membership(
    f: &Formula,
    context: impl Fn(&FiniteTree) -> bool,
    trees: &[FiniteTree],
) -> Result<Vec<RelativeVerdict>, PumpError> {
    trees
        .iter()
        .map(|t| {
            let in_context = context(t);
            let in_language = if in_context {
                Some(models(t.graph(), f, 1)?)
            } else {
                None
            };
            Ok(RelativeVerdict {
                in_context,
                in_language,
            })
        })
        .collect()
}

/// One letter of a word: the colors of a level and the action leaving it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Letter {
    pub colors: BTreeSet<String>,
    pub action: String,
}

impl Letter {
    pub fn new<I, S>(colors: I, action: &str) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Letter {
            colors: colors.into_iter().map(Into::into).collect(),
            action: action.to_string(),
        }
    }
}

/// Full `branching`-ary tree of height `depth` whose level `l` carries the
/// colors of `word[l]` and whose edges out of level `l` use `word[l]`'s
/// action. Node ids are `r` followed by `.c` per child index.
pub fn gen_rword_tree(
    sig: &Signature,
    word: &[Letter],
    branching: usize,
    depth: usize,
) -> Result<FiniteTree, PumpError> {
    if depth >= word.len() {
        return Err(PumpError::Invalid(format!(
            "a tree of depth {depth} needs {} letters, got {}",
            depth + 1,
            word.len()
        )));
    }
    if branching == 0 && depth > 0 {
        return Err(PumpError::Invalid("branching must be positive".into()));
    }
    let mut b = crate::graph::GraphBuilder::new(sig.clone());
    let mut level = vec!["r".to_string()];
    b.node("r", &word[0].colors)?;
    for l in 1..=depth {
        let mut next = Vec::new();
        for parent in &level {
            for c in 0..branching {
                let id = format!("{parent}.{c}");
                b.node(&id, &word[l].colors)?;
                b.edge(parent, &word[l - 1].action, &id)?;
                next.push(id);
            }
        }
        level = next;
    }
    b.root("r")?;
    Ok(FiniteTree::from_graph(b.build()?)?)
}

fn levels(tree: &FiniteTree) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); tree.height() + 1];
    for v in tree.graph().nodes() {
        out[tree.depth(v)].push(v);
    }
    out
}

/// Whether every path spells the same word: same-depth nodes agree on
/// colors and on the single action they use, and all leaves sit at the
/// deepest level.
pub fn is_rword(tree: &FiniteTree) -> bool {
    let g = tree.graph();
    let levels = levels(tree);
    let last = levels.len() - 1;
    for (l, nodes) in levels.iter().enumerate() {
        let colors = g.colors(nodes[0]);
        if nodes.iter().any(|&v| g.colors(v) != colors) {
            return false;
        }
        if l == last {
            continue;
        }
        let mut actions = BTreeSet::new();
        for &v in nodes {
            if tree.children(v).is_empty() {
                return false;
            }
            actions.extend(g.out_edges(v).map(|(a, _)| a));
        }
        if actions.len() != 1 {
            return false;
        }
    }
    true
}

/// The least level all of whose nodes carry `color`.
pub fn check_luni(tree: &FiniteTree, color: &str) -> Option<usize> {
    let g = tree.graph();
    let c = g.signature().color_index(color)?;
    levels(tree)
        .iter()
        .position(|nodes| nodes.iter().all(|&v| g.has_color(v, c)))
}

/// `μX. c ∨ ⋁_a ◇a X`: some reachable node carries `color`.
pub fn reach_formula(sig: &Signature, color: &str) -> Formula {
    let x = "X";
    let mut f = Formula::color(color, 0);
    for a in sig.actions() {
        f = Formula::or(f, Formula::diamond(a.clone(), 0, Formula::var(x)));
    }
    Formula::mu(x, f)
}
