use std::collections::BTreeSet;

use super::{GraphError, LabeledGraph};

/// Asynchronous `d`-product with reset edges.
///
/// A tuple node moves along `a@i` when its `i`-th component moves along `a`
/// in factor `i`, and along `rst@i` to the tuple whose `i`-th component is
/// the root of factor `i`. Color `c@i` holds when `c` holds in component `i`.
pub fn product(factors: &[&LabeledGraph]) -> Result<LabeledGraph, GraphError> {
    let first = factors
        .first()
        .ok_or_else(|| GraphError::invalid("factors", "empty factor list"))?;
    let base = first.signature();
    for (k, g) in factors.iter().enumerate().skip(1) {
        if g.signature() != base {
            return Err(GraphError::invalid(
                format!("factors[{k}]"),
                "signature differs from factor 0",
            ));
        }
    }
    let d = factors.len();
    let sig = base.lift(d)?;
    let shape = sig.lifted_shape().expect("lifted signature has lifted shape");
    let sizes: Vec<usize> = factors.iter().map(|g| g.num_nodes()).collect();
    // component 0 is the most significant digit
    let mut strides = vec![1usize; d];
    for i in (0..d.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * sizes[i + 1];
    }
    let total: usize = sizes.iter().product();
    let decode = |mut x: usize| {
        let mut t = vec![0usize; d];
        for i in 0..d {
            t[i] = x / strides[i];
            x %= strides[i];
        }
        t
    };

    let mut ids = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut edges = Vec::new();
    for x in 0..total {
        let t = decode(x);
        let parts: Vec<&str> = t.iter().zip(factors).map(|(&v, g)| g.node_id(v)).collect();
        ids.push(format!("({})", parts.join(",")));
        let mut set = BTreeSet::new();
        for (i, (&v, g)) in t.iter().zip(factors).enumerate() {
            for &c in g.colors(v) {
                set.insert(shape.color[c][i]);
            }
        }
        labels.push(set);
        for (i, (&v, g)) in t.iter().zip(factors).enumerate() {
            let base_x = x - v * strides[i];
            for a in 0..base.actions().len() {
                for &w in g.successors(v, a) {
                    edges.push((x, shape.action[a][i], base_x + w * strides[i]));
                }
            }
            edges.push((x, shape.reset[i], base_x + g.root() * strides[i]));
        }
    }
    let root = factors
        .iter()
        .enumerate()
        .map(|(i, g)| g.root() * strides[i])
        .sum();
    LabeledGraph::from_parts(sig, ids, labels, edges, root)
}

/// The `d`-th power: the product of `d` copies of `g`.
pub fn power(g: &LabeledGraph, d: usize) -> Result<LabeledGraph, GraphError> {
    if d == 0 {
        return Err(GraphError::invalid("d", "dimension must be at least 1"));
    }
    let copies = vec![g; d];
    product(&copies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{example_graph, GraphBuilder, Signature};

    fn accepting_loop() -> LabeledGraph {
        let sig = Signature::new(["a"], ["f"]).unwrap();
        let mut b = GraphBuilder::new(sig);
        b.node("s", ["f"]).unwrap();
        b.edge("s", "a", "s").unwrap();
        b.root("s").unwrap();
        b.build().unwrap()
    }

    #[test]
    fn square_of_example_graph() {
        let g2 = power(&example_graph(), 2).unwrap();
        assert_eq!(g2.num_nodes(), 9);
        assert_eq!(g2.edge_count(), 36);
        let sig = g2.signature();
        for name in ["a@0", "a@1", "rst@0", "rst@1"] {
            let a = sig.action_index(name).unwrap();
            let count = g2.edges().filter(|&(_, b, _)| b == a).count();
            assert_eq!(count, 9, "{name}");
        }
        assert_eq!(g2.node_id(g2.root()), "(0,0)");
        assert!(g2.colors(g2.root()).is_empty());
        let both = g2.node_index("(1,1)").unwrap();
        assert_eq!(g2.colors(both).len(), 2);
        // (1,0) --a@1--> (1,1), (2,1) --rst@0--> (0,1)
        let a1 = sig.action_index("a@1").unwrap();
        let r0 = sig.action_index("rst@0").unwrap();
        assert!(g2.has_edge(g2.node_index("(1,0)").unwrap(), a1, both));
        assert!(g2.has_edge(
            g2.node_index("(2,1)").unwrap(),
            r0,
            g2.node_index("(0,1)").unwrap()
        ));
    }

    #[test]
    fn first_power_mirrors_graph() {
        let g = example_graph();
        let g1 = power(&g, 1).unwrap();
        assert_eq!(g1.num_nodes(), 3);
        let a0 = g1.signature().action_index("a@0").unwrap();
        let r0 = g1.signature().action_index("rst@0").unwrap();
        for (u, _, v) in g.edges() {
            let pu = g1.node_index(&format!("({})", g.node_id(u))).unwrap();
            let pv = g1.node_index(&format!("({})", g.node_id(v))).unwrap();
            assert!(g1.has_edge(pu, a0, pv));
        }
        for v in g1.nodes() {
            assert_eq!(g1.successors(v, r0), [g1.root()]);
        }
        assert_eq!(g1.edge_count(), 6);
    }

    #[test]
    fn square_of_accepting_loop() {
        let g2 = power(&accepting_loop(), 2).unwrap();
        assert_eq!(g2.num_nodes(), 1);
        assert_eq!(g2.edge_count(), 4);
        assert_eq!(g2.colors(0).len(), 2);
    }

    #[test]
    fn product_errors() {
        assert!(product(&[]).is_err());
        let other = Signature::new(["b"], ["f"]).unwrap();
        let mut b = GraphBuilder::new(other);
        b.node("x", None::<&str>).unwrap();
        b.root("x").unwrap();
        let h = b.build().unwrap();
        let g = example_graph();
        assert!(product(&[&g, &h]).is_err());
        assert!(power(&g, 0).is_err());
    }
}
