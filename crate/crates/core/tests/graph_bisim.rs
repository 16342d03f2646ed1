use polymu::bisim::{
    bisimilar, bisimulation_classes, bounded_bisimilar, largest_bisimulation,
    largest_d_bisimulation, quotient,
};
use polymu::corpus::{random_small_graph, rng_for, split_node};
use polymu::graph::{power, product, read_graph, unfold, write_graph, LabeledGraph, Signature};
use proptest::prelude::*;
use rand::Rng;

fn sig() -> Signature {
    Signature::new(["a", "b"], ["f", "g"]).unwrap()
}

fn graph(seed: u64, max: usize) -> LabeledGraph {
    random_small_graph(&mut rng_for(seed, 0), &sig(), max)
}

/// Splits a product node id `(x,y,...)` into its component ids; the
/// components of the random graphs used here are plain integers.
fn components(id: &str) -> Vec<usize> {
    id.trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let g = graph(seed, 6);
        let text = write_graph(&g);
        let back = read_graph(&text).unwrap();
        prop_assert_eq!(write_graph(&back), text);
        prop_assert!(bisimilar(&g, &back).unwrap());
    }

    #[test]
    fn powers_have_the_expected_size(seed in any::<u64>(), d in 1usize..=3) {
        let g = graph(seed, 3);
        let p = power(&g, d).unwrap();
        let n = g.num_nodes();
        prop_assert_eq!(p.num_nodes(), n.pow(d as u32));
        let per_component = g.edge_count() * n.pow(d as u32 - 1);
        // a@i edges, plus one reset edge per node and component
        prop_assert_eq!(p.edge_count(), d * per_component + d * p.num_nodes());
    }

    #[test]
    fn quotient_is_bisimilar_and_minimal(seed in any::<u64>()) {
        let g = graph(seed, 6);
        let q = quotient(&g);
        prop_assert!(bisimilar(&g, &q).unwrap());
        prop_assert!(q.num_nodes() <= g.num_nodes());
        prop_assert_eq!(quotient(&q).num_nodes(), q.num_nodes());
    }

    #[test]
    fn partition_refinement_agrees_with_relation(seed in any::<u64>()) {
        let g = graph(seed, 6);
        let classes = bisimulation_classes(&g);
        let rel = largest_bisimulation(&g, &g).unwrap();
        for u in g.nodes() {
            for v in g.nodes() {
                prop_assert_eq!(classes[u] == classes[v], rel.contains(u, v));
            }
        }
    }

    #[test]
    fn splitting_a_node_keeps_bisimilarity(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 1);
        let g = random_small_graph(&mut rng, &sig(), 5);
        let h = split_node(&mut rng, &g);
        prop_assert!(bisimilar(&g, &h).unwrap());
        prop_assert_eq!(quotient(&g).num_nodes(), quotient(&h).num_nodes());
    }

    #[test]
    fn unfolding_is_bounded_bisimilar(seed in any::<u64>(), depth in 0usize..=4) {
        let g = graph(seed, 4);
        let t = unfold(&g, depth);
        prop_assert!(bounded_bisimilar(&g, t.graph(), depth).unwrap());
        prop_assert!(t.height() <= depth);
    }

    #[test]
    fn d_bisimulation_on_powers_compares_components(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 2);
        let base = Signature::new(["a"], ["f"]).unwrap();
        let g = random_small_graph(&mut rng, &base, 3);
        let d = rng.gen_range(1..=2);
        let p = power(&g, d).unwrap();
        let fam = largest_d_bisimulation(&p).unwrap();
        let rel = largest_bisimulation(&g, &g).unwrap();
        let index = |id: &str| -> Vec<usize> {
            components(id).iter().map(|c| g.node_index(&c.to_string()).unwrap()).collect()
        };
        for v in p.nodes() {
            for w in p.nodes() {
                let (x, y) = (index(p.node_id(v)), index(p.node_id(w)));
                for (i, &xi) in x.iter().enumerate() {
                    for (j, &yj) in y.iter().enumerate() {
                        prop_assert_eq!(fam.related(i, j, v, w), rel.contains(xi, yj));
                    }
                }
            }
        }
    }
}

#[test]
fn product_of_bisimilar_factors_is_bisimilar() {
    for seed in 0..40 {
        let mut rng = rng_for(seed, 3);
        let g = random_small_graph(&mut rng, &sig(), 3);
        let h = random_small_graph(&mut rng, &sig(), 3);
        let g2 = split_node(&mut rng, &g);
        let p = product(&[&g, &h]).unwrap();
        let q = product(&[&g2, &h]).unwrap();
        assert!(bisimilar(&p, &q).unwrap());
    }
}

#[test]
fn signature_mismatch_is_an_error() {
    let g = graph(1, 3);
    let other = Signature::new(["a"], ["f"]).unwrap();
    let h = random_small_graph(&mut rng_for(1, 1), &other, 3);
    assert!(bisimilar(&g, &h).is_err());
}
