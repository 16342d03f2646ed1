//! Non-universality queries against a direct exploration of
//! `(node, per-component progress)` states over raw paths.

use std::collections::HashSet;

use polymu::bisim::quotient;
use polymu::corpus::{random_small_graph, rng_for, split_node};
use polymu::graph::{power, split_lifted, LabeledGraph, Signature};
use polymu::queries::{
    one_letter_non_universal, one_lifted_non_universal, two_letter_non_universal,
    two_lifted_non_universal, Witness,
};
use proptest::prelude::*;
use rand::Rng;

/// What an edge does to a component's progress.
enum Move {
    Letter(usize, String),
    Reset(usize),
}

fn classify(g: &LabeledGraph, action: usize) -> Move {
    let name = &g.signature().actions()[action];
    let (base, i) = split_lifted(name).unwrap();
    if base == "rst" {
        Move::Reset(i)
    } else {
        Move::Letter(i, base.to_string())
    }
}

/// True iff no raw path leaves some component `i` on an `f@i` node right
/// after reading exactly `word` in that component since its last reset.
fn rejected(g: &LabeledGraph, d: usize, word: &[&str]) -> bool {
    // progress per component: Some(k) matched k letters, None diverged
    let start = (g.root(), vec![Some(0usize); d]);
    let mut seen = HashSet::from([start.clone()]);
    let mut stack = vec![start];
    while let Some((v, prog)) = stack.pop() {
        for (i, p) in prog.iter().enumerate() {
            let f = g.signature().color_index(&format!("f@{i}")).unwrap();
            if *p == Some(word.len()) && g.has_color(v, f) {
                return false;
            }
        }
        for (a, w) in g.out_edges(v) {
            let mut next = prog.clone();
            match classify(g, a) {
                Move::Reset(i) => next[i] = Some(0),
                Move::Letter(i, x) => {
                    next[i] = match prog[i] {
                        Some(k) if k < word.len() && word[k] == x => Some(k + 1),
                        _ => None,
                    }
                }
            }
            if seen.insert((w, next.clone())) {
                stack.push((w, next));
            }
        }
    }
    true
}

/// Words over `letters` in shortlex order up to length `max`.
fn shortlex<'a>(letters: &[&'a str], max: usize) -> Vec<Vec<&'a str>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<&str>| {
                letters.iter().map(move |&x| {
                    let mut w = w.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn random_lifted(seed: u64, letters: &[&str], d: usize) -> LabeledGraph {
    let mut rng = rng_for(seed, 0);
    let base = Signature::new(letters.iter().copied(), ["f"]).unwrap();
    if rng.gen_bool(0.5) {
        random_small_graph(&mut rng, &base.lift(d).unwrap(), 6)
    } else {
        let g = random_small_graph(&mut rng, &base, if d == 1 { 5 } else { 2 });
        power(&g, d).unwrap()
    }
}

#[test]
fn one_lifted_agrees_with_path_states() {
    for seed in 0..300 {
        let d = 1 + (seed % 2) as usize;
        let g = random_lifted(seed, &["a"], d);
        let v = one_lifted_non_universal(&g, d).unwrap();
        let first = (0..12).find(|&n| rejected(&g, d, &vec!["a"; n]));
        match v.witness {
            Some(Witness::Length(n)) => assert_eq!(first, Some(n), "seed {seed}"),
            None => {
                assert!(!v.exhausted_bound);
                assert_eq!(first, None, "seed {seed}");
            }
            Some(w) => panic!("unexpected witness {w:?}"),
        }
    }
}

#[test]
fn two_lifted_agrees_with_path_states() {
    let words = shortlex(&["a", "b"], 5);
    for seed in 0..200 {
        let d = 1 + (seed % 2) as usize;
        let g = random_lifted(1000 + seed, &["a", "b"], d);
        let v = two_lifted_non_universal(&g, d).unwrap();
        let first = words.iter().find(|w| rejected(&g, d, w));
        match &v.witness {
            Some(Witness::Word(w)) if w.len() <= 5 => {
                let w: Vec<&str> = w.iter().map(String::as_str).collect();
                assert_eq!(first, Some(&w), "seed {seed}");
            }
            Some(Witness::Word(_)) => assert_eq!(first, None, "seed {seed}"),
            None => assert_eq!(first, None, "seed {seed}"),
            Some(w) => panic!("unexpected witness {w:?}"),
        }
    }
}

#[test]
fn base_queries_on_simple_automata() {
    let sig = Signature::new(["a", "b"], ["f"]).unwrap();
    let mut b = polymu::graph::GraphBuilder::new(sig);
    b.node("s", None::<&str>).unwrap();
    b.node("t", ["f"]).unwrap();
    b.edge("s", "a", "t").unwrap();
    b.edge("t", "a", "t").unwrap();
    b.edge("t", "b", "t").unwrap();
    b.root("s").unwrap();
    let g = b.build().unwrap();
    // the empty word is rejected
    let v = two_letter_non_universal(&g).unwrap();
    assert_eq!(v.witness, Some(Witness::Word(vec![])));
    // after rooting at t every word is accepted
    let v = two_letter_non_universal(&g.with_root(1)).unwrap();
    assert!(!v.member && !v.exhausted_bound);
    // b from the start is rejected once the empty word is accepted
    let mut b = polymu::graph::GraphBuilder::new(g.signature().clone());
    b.node("s", ["f"]).unwrap();
    b.node("t", ["f"]).unwrap();
    b.edge("s", "a", "t").unwrap();
    b.edge("t", "a", "t").unwrap();
    b.edge("t", "b", "t").unwrap();
    b.root("s").unwrap();
    let v = two_letter_non_universal(&b.build().unwrap()).unwrap();
    assert_eq!(v.witness, Some(Witness::Word(vec!["b".to_string()])));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn verdicts_are_bisimulation_invariant(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let one = Signature::new(["a"], ["f"]).unwrap();
        let g = random_small_graph(&mut rng, &one, 4);
        let variants = [quotient(&g), split_node(&mut rng, &g)];
        let base = one_letter_non_universal(&g).unwrap();
        for h in &variants {
            prop_assert_eq!(one_letter_non_universal(h).unwrap().member, base.member);
        }
        let two = Signature::new(["a", "b"], ["f"]).unwrap();
        let g = random_small_graph(&mut rng, &two, 4);
        let base = two_letter_non_universal(&g).unwrap();
        for h in [quotient(&g), split_node(&mut rng, &g)] {
            prop_assert_eq!(two_letter_non_universal(&h).unwrap(), base.clone());
        }
    }

    #[test]
    fn first_power_matches_base(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 1);
        let two = Signature::new(["a", "b"], ["f"]).unwrap();
        let g = random_small_graph(&mut rng, &two, 4);
        let base = two_letter_non_universal(&g).unwrap();
        let lifted = two_lifted_non_universal(&power(&g, 1).unwrap(), 1).unwrap();
        prop_assert_eq!(lifted, base);
    }
}
