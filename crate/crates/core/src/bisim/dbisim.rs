use std::collections::BTreeSet;

use super::{greatest_bisimulation, BisimError, NodeRelation};
use crate::graph::{LabeledGraph, LiftedShape};

/// The `d×d` family of relations `≈_ij` on one lifted graph.
///
/// `v ≈_ij v'` when the `i`-th candidate component of `v` behaves like the
/// `j`-th candidate component of `v'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DBisimFamily {
    d: usize,
    rels: Vec<NodeRelation>,
}

impl DBisimFamily {
    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> &NodeRelation {
        &self.rels[i * self.d + j]
    }

    pub fn related(&self, i: usize, j: usize, v: usize, w: usize) -> bool {
        self.get(i, j).contains(v, w)
    }
}

pub(crate) fn lifted_shape_of(g: &LabeledGraph) -> Result<LiftedShape, BisimError> {
    g.signature()
        .lifted_shape()
        .ok_or_else(|| BisimError::NotLifted(String::new()))
}

/// Largest d-bisimulation; each `≈_ij` is an independent greatest fixpoint
/// seeded with the pairs that agree on `c@i` versus `c@j`.
pub fn largest_d_bisimulation(g: &LabeledGraph) -> Result<DBisimFamily, BisimError> {
    let shape = lifted_shape_of(g)?;
    let d = shape.d;
    let n = g.num_nodes();
    let mut rels = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let init = NodeRelation::from_fn(n, n, |v, w| {
                shape
                    .color
                    .iter()
                    .all(|c| g.has_color(v, c[i]) == g.has_color(w, c[j]))
            });
            let rel = greatest_bisimulation(
                init,
                shape.base.actions().len(),
                |a, v| g.successors(v, shape.action[a][i]),
                |a, w| g.successors(w, shape.action[a][j]),
            );
            rels.push(rel);
        }
    }
    Ok(DBisimFamily { d, rels })
}

/// Every `a@i` or `rst@i` edge keeps its endpoints `≈_jj`-related for `j ≠ i`.
pub fn is_persistent(g: &LabeledGraph, fam: &DBisimFamily) -> Result<bool, BisimError> {
    let shape = lifted_shape_of(g)?;
    let d = shape.d;
    for i in 0..d {
        let moves = shape.action.iter().map(|a| a[i]).chain([shape.reset[i]]);
        for act in moves {
            for v in g.nodes() {
                for &w in g.successors(v, act) {
                    if (0..d).any(|j| j != i && !fam.related(j, j, v, w)) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Every `rst@i` edge lands on a node `≈_ii`-related to the root.
pub fn has_reset_property(g: &LabeledGraph, fam: &DBisimFamily) -> Result<bool, BisimError> {
    let shape = lifted_shape_of(g)?;
    for (i, &rst) in shape.reset.iter().enumerate() {
        for v in g.nodes() {
            if g.successors(v, rst).iter().any(|&w| !fam.related(i, i, w, g.root())) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The root is `≈_ij`-related to itself for all `i, j`.
pub fn is_power_rooted(g: &LabeledGraph, fam: &DBisimFamily) -> bool {
    let d = fam.dimension();
    (0..d).all(|i| (0..d).all(|j| fam.related(i, j, g.root(), g.root())))
}

/// The `i`-th factor: the quotient by `≈_ii` with `a`-edges taken from
/// `a@i`-edges and colors from `c@i`.
pub fn factor(g: &LabeledGraph, i: usize) -> Result<LabeledGraph, BisimError> {
    let shape = lifted_shape_of(g)?;
    if i >= shape.d {
        return Err(BisimError::NotLifted(format!(
            " of dimension above {i} (component out of range)"
        )));
    }
    let fam = largest_d_bisimulation(g)?;
    if !is_persistent(g, &fam)? {
        return Err(BisimError::NotFactorizable("persistence violated"));
    }
    if !has_reset_property(g, &fam)? {
        return Err(BisimError::NotFactorizable("reset property violated"));
    }
    let eq = fam.get(i, i);
    // ≈_ii is an equivalence on the largest family; class = least-index member
    let mut class = vec![usize::MAX; g.num_nodes()];
    let mut reps: Vec<usize> = Vec::new();
    for v in g.nodes() {
        if class[v] != usize::MAX {
            continue;
        }
        let k = reps.len();
        let members: Vec<usize> = g.nodes().filter(|&w| eq.contains(v, w)).collect();
        let rep = *members
            .iter()
            .min_by(|&&x, &&y| g.node_id(x).cmp(g.node_id(y)))
            .expect("class contains v");
        for w in members {
            class[w] = k;
        }
        reps.push(rep);
    }
    let ids = reps.iter().map(|&r| g.node_id(r).to_string()).collect();
    let labels = reps
        .iter()
        .map(|&r| {
            (0..shape.color.len())
                .filter(|&c| g.has_color(r, shape.color[c][i]))
                .collect::<BTreeSet<usize>>()
        })
        .collect();
    let mut edges = BTreeSet::new();
    for (a, lifted) in shape.action.iter().enumerate() {
        for v in g.nodes() {
            for &w in g.successors(v, lifted[i]) {
                edges.insert((class[v], a, class[w]));
            }
        }
    }
    Ok(LabeledGraph::from_parts(
        shape.base.clone(),
        ids,
        labels,
        edges,
        class[g.root()],
    )
    .expect("factor of a valid graph is valid"))
}
