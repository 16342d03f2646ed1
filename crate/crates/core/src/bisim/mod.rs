//! Bisimulation between labeled graphs, bisimulation quotients and the
//! d-dimensional bisimulations used to recognize products and powers.

mod dbisim;
mod detect;

pub use dbisim::{
    factor, has_reset_property, is_persistent, is_power_rooted, largest_d_bisimulation,
    DBisimFamily,
};
pub use detect::{detect_power, power_conditions, PowerConditions, PowerMethod};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{LabeledGraph, Signature};

#[derive(Debug, Error)]
pub enum BisimError {
    #[error("signature mismatch between compared graphs")]
    SignatureMismatch,
    #[error("signature is not a lifted signature{0}")]
    NotLifted(String),
    #[error("graph is not factorizable: {0}")]
    NotFactorizable(&'static str),
    #[error("power detection methods disagree: d-bisimulation says {dbisim}, formulas say {logic}")]
    MethodDisagreement {
        dbisim: PowerConditions,
        logic: PowerConditions,
    },
    #[error(transparent)]
    Eval(#[from] crate::eval::EvalError),
}

/// A binary relation between the nodes of two graphs, stored densely.
#[derive(Clone, PartialEq, Eq)]
pub struct NodeRelation {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl NodeRelation {
    pub fn empty(rows: usize, cols: usize) -> Self {
        NodeRelation {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(rows, cols);
        for u in 0..rows {
            for v in 0..cols {
                r.bits[u * cols + v] = f(u, v);
            }
        }
        r
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.cols + v]
    }

    pub fn insert(&mut self, u: usize, v: usize) {
        self.bits[u * self.cols + v] = true;
    }

    pub fn remove(&mut self, u: usize, v: usize) {
        self.bits[u * self.cols + v] = false;
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(k, _)| (k / cols, k % cols))
    }

    pub fn inverse(&self) -> NodeRelation {
        NodeRelation::from_fn(self.cols, self.rows, |v, u| self.contains(u, v))
    }

    /// Sorted `(u,v)` lines using node ids.
    pub fn format_pairs(&self, left: &LabeledGraph, right: &LabeledGraph) -> String {
        let mut lines: Vec<String> = self
            .pairs()
            .map(|(u, v)| format!("({},{})", left.node_id(u), right.node_id(v)))
            .collect();
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for NodeRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// Greatest relation contained in `init` that satisfies Forth and Back for
/// every move kind `k`, where `left(k, u)` and `right(k, v)` list successors.
pub(crate) fn greatest_bisimulation<'a>(
    mut rel: NodeRelation,
    kinds: usize,
    left: impl Fn(usize, usize) -> &'a [usize],
    right: impl Fn(usize, usize) -> &'a [usize],
) -> NodeRelation {
    loop {
        let mut changed = false;
        for u in 0..rel.rows {
            for v in 0..rel.cols {
                if !rel.contains(u, v) {
                    continue;
                }
                let ok = (0..kinds).all(|k| {
                    let (ls, rs) = (left(k, u), right(k, v));
                    ls.iter().all(|&u2| rs.iter().any(|&v2| rel.contains(u2, v2)))
                        && rs.iter().all(|&v2| ls.iter().any(|&u2| rel.contains(u2, v2)))
                });
                if !ok {
                    rel.remove(u, v);
                    changed = true;
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

fn check_same_signature<'g>(
    g1: &'g LabeledGraph,
    g2: &LabeledGraph,
) -> Result<&'g Signature, BisimError> {
    if g1.signature() != g2.signature() {
        return Err(BisimError::SignatureMismatch);
    }
    Ok(g1.signature())
}

/// The union of all bisimulations between `g1` and `g2`.
pub fn largest_bisimulation(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
) -> Result<NodeRelation, BisimError> {
    let sig = check_same_signature(g1, g2)?;
    let init = NodeRelation::from_fn(g1.num_nodes(), g2.num_nodes(), |u, v| {
        g1.colors(u) == g2.colors(v)
    });
    Ok(greatest_bisimulation(
        init,
        sig.actions().len(),
        |a, u| g1.successors(u, a),
        |a, v| g2.successors(v, a),
    ))
}

pub fn bisimilar(g1: &LabeledGraph, g2: &LabeledGraph) -> Result<bool, BisimError> {
    Ok(largest_bisimulation(g1, g2)?.contains(g1.root(), g2.root()))
}

/// Bisimilarity of the roots up to `k` rounds of Forth/Back.
pub fn bounded_bisimilar(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    k: usize,
) -> Result<bool, BisimError> {
    let sig = check_same_signature(g1, g2)?;
    let base = NodeRelation::from_fn(g1.num_nodes(), g2.num_nodes(), |u, v| {
        g1.colors(u) == g2.colors(v)
    });
    let mut rel = base.clone();
    for _ in 0..k {
        let prev = rel.clone();
        rel = NodeRelation::from_fn(g1.num_nodes(), g2.num_nodes(), |u, v| {
            base.contains(u, v)
                && (0..sig.actions().len()).all(|a| {
                    let (ls, rs) = (g1.successors(u, a), g2.successors(v, a));
                    ls.iter().all(|&x| rs.iter().any(|&y| prev.contains(x, y)))
                        && rs.iter().all(|&y| ls.iter().any(|&x| prev.contains(x, y)))
                })
        });
    }
    Ok(rel.contains(g1.root(), g2.root()))
}

/// Bisimilarity classes by signature-based partition refinement. Returns the
/// block index of every node; blocks are numbered by first occurrence.
pub fn bisimulation_classes(g: &LabeledGraph) -> Vec<usize> {
    let renumber = |keys: Vec<(usize, Vec<(usize, usize)>)>| {
        let mut ids: BTreeMap<(usize, Vec<(usize, usize)>), usize> = BTreeMap::new();
        keys.into_iter()
            .map(|k| {
                let next = ids.len();
                *ids.entry(k).or_insert(next)
            })
            .collect::<Vec<usize>>()
    };
    let mut label_ids: BTreeMap<&BTreeSet<usize>, usize> = BTreeMap::new();
    let mut block: Vec<usize> = g
        .nodes()
        .map(|v| {
            let next = label_ids.len();
            *label_ids.entry(g.colors(v)).or_insert(next)
        })
        .collect();
    let mut count = label_ids.len();
    loop {
        let keys = g
            .nodes()
            .map(|v| {
                let mut moves: Vec<(usize, usize)> =
                    g.out_edges(v).map(|(a, w)| (a, block[w])).collect();
                moves.sort_unstable();
                moves.dedup();
                (block[v], moves)
            })
            .collect();
        let next = renumber(keys);
        let next_count = next.iter().copied().max().map_or(0, |m| m + 1);
        block = next;
        if next_count == count {
            return block;
        }
        count = next_count;
    }
}

/// The bisimulation quotient; each class is named by its lexicographically
/// least member id.
pub fn quotient(g: &LabeledGraph) -> LabeledGraph {
    let block = bisimulation_classes(g);
    let nblocks = block.iter().copied().max().map_or(0, |m| m + 1);
    let mut rep: Vec<Option<usize>> = vec![None; nblocks];
    for v in g.nodes() {
        let b = block[v];
        match rep[b] {
            Some(r) if g.node_id(r) <= g.node_id(v) => {}
            _ => rep[b] = Some(v),
        }
    }
    let rep: Vec<usize> = rep.into_iter().map(|r| r.expect("non-empty block")).collect();
    let ids = rep.iter().map(|&r| g.node_id(r).to_string()).collect();
    let labels = rep.iter().map(|&r| g.colors(r).clone()).collect();
    let edges: BTreeSet<(usize, usize, usize)> =
        g.edges().map(|(u, a, v)| (block[u], a, block[v])).collect();
    LabeledGraph::from_parts(g.signature().clone(), ids, labels, edges, block[g.root()])
        .expect("quotient of a valid graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{example_graph, GraphBuilder};

    fn single(colors: &[&str]) -> LabeledGraph {
        let sig = Signature::new(["a"], ["f"]).unwrap();
        let mut b = GraphBuilder::new(sig);
        b.node("v", colors).unwrap();
        b.root("v").unwrap();
        b.build().unwrap()
    }

    #[test]
    fn example_graph_self_bisimulation() {
        let g = example_graph();
        let r = largest_bisimulation(&g, &g).unwrap();
        let pairs: BTreeSet<(usize, usize)> = r.pairs().collect();
        let expected: BTreeSet<(usize, usize)> =
            [(0, 0), (1, 1), (2, 2), (0, 2), (2, 0)].into_iter().collect();
        assert_eq!(pairs, expected);
        assert_eq!(r.format_pairs(&g, &g), "(0,0)\n(0,2)\n(1,1)\n(2,0)\n(2,2)\n");
    }

    #[test]
    fn single_nodes() {
        let (plain, plain2, acc) = (single(&[]), single(&[]), single(&["f"]));
        assert_eq!(largest_bisimulation(&plain, &plain2).unwrap().len(), 1);
        assert!(largest_bisimulation(&acc, &plain).unwrap().is_empty());
        assert!(!bisimilar(&acc, &plain).unwrap());
    }

    #[test]
    fn quotient_of_example() {
        let g = example_graph();
        let q = quotient(&g);
        assert_eq!(q.num_nodes(), 2);
        assert_eq!(q.node_ids(), ["0", "1"]);
        assert!(bisimilar(&g, &q).unwrap());
        assert_eq!(quotient(&q).num_nodes(), 2);
    }

    #[test]
    fn leaves_merge() {
        let sig = Signature::new(["a"], ["f"]).unwrap();
        let mut b = GraphBuilder::new(sig);
        for id in ["r", "x", "y"] {
            b.node(id, None::<&str>).unwrap();
        }
        b.edge("r", "a", "x").unwrap();
        b.edge("r", "a", "y").unwrap();
        b.root("r").unwrap();
        let q = quotient(&b.build().unwrap());
        assert_eq!(q.num_nodes(), 2);
        assert_eq!(q.edge_count(), 1);
    }

    #[test]
    fn signature_mismatch() {
        let other = {
            let sig = Signature::new(["b"], ["f"]).unwrap();
            let mut b = GraphBuilder::new(sig);
            b.node("v", None::<&str>).unwrap();
            b.root("v").unwrap();
            b.build().unwrap()
        };
        assert!(matches!(
            largest_bisimulation(&single(&[]), &other),
            Err(BisimError::SignatureMismatch)
        ));
    }

    #[test]
    fn bounded_bisimilarity_of_unfoldings() {
        let g = example_graph();
        for k in 0..6 {
            let t = crate::graph::unfold(&g, k);
            assert!(bounded_bisimilar(&g, t.graph(), k).unwrap());
        }
        // the depth-1 prefix has a leaf where the graph continues
        let t = crate::graph::unfold(&g, 1);
        assert!(!bounded_bisimilar(&g, t.graph(), 2).unwrap());
    }
}
