//! Seeded random generators for graphs, formulas and trees.
//!
//! Every generator draws from a `ChaCha8Rng`; [`rng_for`] derives the
//! stream for iteration `index` of a run as `seed_from_u64(seed + index)`,
//! so corpora are reproducible and iterations are independent.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{reset_name, FiniteTree, LabeledGraph, Signature};
use crate::logic::Formula;

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index))
}

/// A graph with nodes `0..n` (root `0`), each color present with
/// probability 1/2 and each possible edge present with probability `density`.
pub fn random_graph(rng: &mut impl Rng, sig: &Signature, nodes: usize, density: f64) -> LabeledGraph {
    let labels = (0..nodes)
        .map(|_| {
            (0..sig.colors().len())
                .filter(|_| rng.gen_bool(0.5))
                .collect::<BTreeSet<usize>>()
        })
        .collect();
    let mut edges = BTreeSet::new();
    for u in 0..nodes {
        for a in 0..sig.actions().len() {
            for v in 0..nodes {
                if rng.gen_bool(density) {
                    edges.insert((u, a, v));
                }
            }
        }
    }
    let ids = (0..nodes).map(|v| v.to_string()).collect();
    LabeledGraph::from_parts(sig.clone(), ids, labels, edges, 0).expect("valid by construction")
}

/// Like [`random_graph`] with a random size in `1..=max_nodes` and density.
pub fn random_small_graph(rng: &mut impl Rng, sig: &Signature, max_nodes: usize) -> LabeledGraph {
    let n = rng.gen_range(1..=max_nodes);
    let density = [0.2, 0.35, 0.5][rng.gen_range(0..3)];
    random_graph(rng, sig, n, density)
}

/// Flips a few random edges and colors of `g`.
pub fn perturb(rng: &mut impl Rng, g: &LabeledGraph, flips: usize) -> LabeledGraph {
    let n = g.num_nodes();
    let na = g.signature().actions().len();
    let nc = g.signature().colors().len();
    let mut edges: BTreeSet<(usize, usize, usize)> = g.edges().collect();
    let mut labels: Vec<BTreeSet<usize>> = g.nodes().map(|v| g.colors(v).clone()).collect();
    for _ in 0..flips {
        if rng.gen_bool(0.5) {
            let e = (rng.gen_range(0..n), rng.gen_range(0..na), rng.gen_range(0..n));
            if !edges.remove(&e) {
                edges.insert(e);
            }
        } else {
            let (v, c) = (rng.gen_range(0..n), rng.gen_range(0..nc));
            if !labels[v].remove(&c) {
                labels[v].insert(c);
            }
        }
    }
    LabeledGraph::from_parts(
        g.signature().clone(),
        g.node_ids().to_vec(),
        labels,
        edges,
        g.root(),
    )
    .expect("same nodes")
}

/// A bisimilar copy of `g` in which one node is split in two, with the
/// incoming edges shared out at random.
pub fn split_node(rng: &mut impl Rng, g: &LabeledGraph) -> LabeledGraph {
    let n = g.num_nodes();
    let v = rng.gen_range(0..n);
    let copy = n;
    let mut ids = g.node_ids().to_vec();
    ids.push(format!("{}'", g.node_id(v)));
    let mut labels: Vec<BTreeSet<usize>> = g.nodes().map(|u| g.colors(u).clone()).collect();
    labels.push(g.colors(v).clone());
    let mut edges = BTreeSet::new();
    for (u, a, w) in g.edges() {
        let target = if w == v && rng.gen_bool(0.5) { copy } else { w };
        edges.insert((u, a, target));
        if u == v {
            let target = if w == v && rng.gen_bool(0.5) { copy } else { w };
            edges.insert((copy, a, target));
        }
    }
    LabeledGraph::from_parts(g.signature().clone(), ids, labels, edges, g.root())
        .expect("valid by construction")
}

/// Options for [`FormulaGen`].
#[derive(Clone, Debug)]
pub struct FormulaShape {
    pub arity: usize,
    /// Last component reserved for resets `[j ← arity-1]`.
    pub rooted: bool,
    /// Allow arbitrary replacement maps (ignored when `rooted`).
    pub replace: bool,
    /// Never put a box in front of an action whose name starts with `rst@`.
    pub no_reset_box: bool,
}

/// Random closed, well-formed formulas of a given constructor count.
pub struct FormulaGen<'s> {
    sig: &'s Signature,
    shape: FormulaShape,
    next_var: usize,
}

impl<'s> FormulaGen<'s> {
    pub fn new(sig: &'s Signature, shape: FormulaShape) -> Self {
        FormulaGen {
            sig,
            shape,
            next_var: 0,
        }
    }

    fn components(&self) -> usize {
        if self.shape.rooted {
            self.shape.arity - 1
        } else {
            self.shape.arity
        }
    }

    /// A closed formula with at most `size` constructors.
    pub fn generate(&mut self, rng: &mut impl Rng, size: usize) -> Formula {
        self.next_var = 0;
        self.go(rng, size.max(1), &mut Vec::new(), false)
    }

    fn leaf(&mut self, rng: &mut impl Rng, scope: &[(String, bool)], neg: bool) -> Formula {
        let usable: Vec<&String> = scope
            .iter()
            .filter(|(_, at)| *at == neg)
            .map(|(x, _)| x)
            .collect();
        if !usable.is_empty() && rng.gen_bool(0.45) {
            return Formula::var((*usable.choose(rng).unwrap()).clone());
        }
        match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => {
                let c = self.sig.colors().choose(rng).unwrap().clone();
                Formula::color(c, rng.gen_range(0..self.components()))
            }
        }
    }

    fn go(
        &mut self,
        rng: &mut impl Rng,
        size: usize,
        scope: &mut Vec<(String, bool)>,
        neg: bool,
    ) -> Formula {
        if size <= 1 {
            return self.leaf(rng, scope, neg);
        }
        let may_replace = self.shape.rooted || (self.shape.replace && self.shape.arity > 1);
        let choice = rng.gen_range(0..if may_replace { 14 } else { 12 });
        match choice {
            0 | 1 => Formula::not(self.go(rng, size - 1, scope, !neg)),
            2..=5 if size >= 3 => {
                let left = rng.gen_range(1..size - 1);
                let f = self.go(rng, left, scope, neg);
                let g = self.go(rng, size - 1 - left, scope, neg);
                if choice % 2 == 0 {
                    Formula::and(f, g)
                } else {
                    Formula::or(f, g)
                }
            }
            6..=8 => {
                let action = self.sig.actions().choose(rng).unwrap().clone();
                let index = rng.gen_range(0..self.components());
                let body = self.go(rng, size - 1, scope, neg);
                let boxed = choice == 8
                    && !(self.shape.no_reset_box && action.starts_with("rst@"));
                if boxed {
                    Formula::boxed(action, index, body)
                } else {
                    Formula::diamond(action, index, body)
                }
            }
            9..=11 => {
                let var = format!("X{}", self.next_var);
                self.next_var += 1;
                scope.push((var.clone(), neg));
                let body = self.go(rng, size - 1, scope, neg);
                scope.pop();
                if choice == 9 {
                    Formula::nu(var, body)
                } else {
                    Formula::mu(var, body)
                }
            }
            _ if may_replace => {
                let d = self.shape.arity;
                let map = if self.shape.rooted {
                    let root = d - 1;
                    let mut m: Vec<usize> = (0..d).collect();
                    m[rng.gen_range(0..root)] = root;
                    m
                } else {
                    (0..d).map(|_| rng.gen_range(0..d)).collect()
                };
                Formula::replace(map, self.go(rng, size - 1, scope, neg))
            }
            _ => self.leaf(rng, scope, neg),
        }
    }
}

/// A random lifted signature action name for tests that need one.
pub fn random_reset(rng: &mut impl Rng, d: usize) -> String {
    reset_name(rng.gen_range(0..d))
}

/// A tree made of a spine of `spine` edges with small random side branches.
/// Spine nodes are named `s<k>`, side nodes `s<k>.<m>`.
pub fn random_spine_tree(rng: &mut impl Rng, sig: &Signature, spine: usize) -> FiniteTree {
    let mut ids = Vec::new();
    let mut labels: Vec<BTreeSet<usize>> = Vec::new();
    let mut edges = BTreeSet::new();
    let color = |rng: &mut dyn rand::RngCore| -> BTreeSet<usize> {
        (0..sig.colors().len()).filter(|_| rng.gen_bool(0.4)).collect()
    };
    for k in 0..=spine {
        ids.push(format!("s{k}"));
        labels.push(color(rng));
    }
    let na = sig.actions().len();
    for k in 1..=spine {
        edges.insert((k - 1, rng.gen_range(0..na), k));
    }
    for k in 0..spine {
        if rng.gen_bool(0.25) {
            let side = ids.len();
            ids.push(format!("s{k}.0"));
            labels.push(color(rng));
            edges.insert((k, rng.gen_range(0..na), side));
        }
    }
    let g = LabeledGraph::from_parts(sig.clone(), ids, labels, edges, 0).expect("valid");
    FiniteTree::from_graph(g).expect("tree by construction")
}
