use std::collections::BTreeSet;

use polymu::automata::{accepts, find_pumping_pair, formula_to_apt, AutomatonError};
use polymu::corpus::{random_spine_tree, rng_for};
use polymu::graph::{FiniteTree, LabeledGraph, Signature};
use polymu::pumping::{
    check_luni, check_relative_membership, gen_rword_tree, is_rword, partition_nodes, pump,
    reach_formula, Letter,
};
use proptest::prelude::*;
use rand::Rng;

fn sig() -> Signature {
    Signature::new(["a", "b"], ["f"]).unwrap()
}

/// An `a`-path with `len` edges and `f` only on its last node.
fn a_path(len: usize) -> FiniteTree {
    let labels: Vec<BTreeSet<usize>> = (0..=len)
        .map(|v| if v == len { BTreeSet::from([0]) } else { BTreeSet::new() })
        .collect();
    let edges: BTreeSet<(usize, usize, usize)> = (0..len).map(|v| (v, 0, v + 1)).collect();
    let ids = (0..=len).map(|v| format!("p{v}")).collect();
    let g = LabeledGraph::from_parts(sig(), ids, labels, edges, 0).unwrap();
    FiniteTree::from_graph(g).unwrap()
}

fn spine(tree: &FiniteTree, len: usize) -> Vec<usize> {
    let leaf = tree.graph().node_index(&format!("s{len}")).unwrap();
    tree.path_to(leaf)
}

#[test]
fn reachability_path_pumps() {
    let apt = formula_to_apt(&reach_formula(&sig(), "f"), &sig()).unwrap();
    let bound = (1usize << apt.num_states()) + 1;
    let tree = a_path(bound + 3);
    let path: Vec<usize> = (0..=bound + 3).collect();
    let (i, j) = find_pumping_pair(&apt, &tree, &path).unwrap();
    assert!(1 <= i && i < j && j <= bound);
    for k in [0, 2] {
        let t = pump(&tree, &path, i, j, k).unwrap();
        assert!(accepts(&apt, t.graph()).unwrap());
        assert_eq!(t.height(), bound + 3 + (j - i) * k - (j - i));
    }
    // too short, or not accepted at all
    let short: Vec<usize> = (0..bound).collect();
    assert!(matches!(
        find_pumping_pair(&apt, &tree, &short),
        Err(AutomatonError::PathTooShort { .. })
    ));
    let never = formula_to_apt(&polymu::logic::Formula::False, &sig()).unwrap();
    let long = a_path((1 << never.num_states()) + 1);
    let path: Vec<usize> = (0..long.graph().num_nodes()).collect();
    assert!(matches!(
        find_pumping_pair(&never, &long, &path),
        Err(AutomatonError::Rejected)
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pumping_scales_the_segment(seed in any::<u64>(), k in 0usize..=4) {
        let mut rng = rng_for(seed, 0);
        let len = rng.gen_range(3..=12);
        let tree = random_spine_tree(&mut rng, &sig(), len);
        let path = spine(&tree, len);
        let i = rng.gen_range(1..len - 1);
        let j = rng.gen_range(i + 1..len);
        let part = partition_nodes(&tree, &path, i, j).unwrap();
        prop_assert_eq!(
            part.before.len() + part.segment.len() + part.after.len(),
            tree.graph().num_nodes()
        );
        let t = pump(&tree, &path, i, j, k).unwrap();
        prop_assert_eq!(
            t.graph().num_nodes(),
            part.before.len() + k * part.segment.len() + part.after.len()
        );
        prop_assert_eq!(t.height() + (j - i), len + k * (j - i));
        if k == 1 {
            prop_assert_eq!(t.canonical_form(), tree.canonical_form());
        }
    }

    #[test]
    fn word_trees_decide_luni_by_reachability(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 1);
        let depth = rng.gen_range(0..=5);
        let word: Vec<Letter> = (0..=depth)
            .map(|_| {
                let colors = if rng.gen_bool(0.2) { vec!["f"] } else { vec![] };
                Letter::new(colors, if rng.gen_bool(0.5) { "a" } else { "b" })
            })
            .collect();
        let tree = gen_rword_tree(&sig(), &word, rng.gen_range(1..=3), depth).unwrap();
        prop_assert!(is_rword(&tree));
        let verdicts =
            check_relative_membership(&reach_formula(&sig(), "f"), is_rword, std::slice::from_ref(&tree)).unwrap();
        prop_assert!(verdicts[0].in_context);
        prop_assert_eq!(verdicts[0].in_language, Some(check_luni(&tree, "f").is_some()));
    }
}

#[test]
fn reachability_fails_outside_the_context() {
    // a branching tree where f is reachable but not on a whole level
    let mut rng = rng_for(5, 0);
    let tree = loop {
        let t = random_spine_tree(&mut rng, &sig(), 4);
        let g = t.graph();
        let has_f = g.nodes().any(|v| g.has_color(v, 0));
        if has_f && !is_rword(&t) && check_luni(&t, "f").is_none() {
            break t;
        }
    };
    let v = check_relative_membership(&reach_formula(&sig(), "f"), is_rword, std::slice::from_ref(&tree)).unwrap();
    assert!(!v[0].in_context);
    assert_eq!(v[0].in_language, None);
    assert!(polymu::eval::models(tree.graph(), &reach_formula(&sig(), "f"), 1).unwrap());
}
