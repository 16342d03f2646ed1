//! The evaluator against a direct set-of-tuples reading of the semantics.

use std::collections::{BTreeMap, BTreeSet};

use polymu::corpus::{random_small_graph, rng_for, FormulaGen, FormulaShape};
use polymu::eval::{evaluate, models};
use polymu::graph::{example_graph, LabeledGraph, Signature};
use polymu::logic::{parse, Formula};
use proptest::prelude::*;
use rand::Rng;

type Tuples = BTreeSet<Vec<usize>>;

fn all_tuples(n: usize, arity: usize) -> Tuples {
    let mut out = vec![vec![]];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out.into_iter().collect()
}

fn naive(g: &LabeledGraph, f: &Formula, arity: usize, env: &BTreeMap<String, Tuples>) -> Tuples {
    let sig = g.signature();
    let universe = all_tuples(g.num_nodes(), arity);
    let step = |action: &str, index: usize, body: &Tuples, t: &Vec<usize>| -> Vec<bool> {
        let a = sig.action_index(action).unwrap();
        g.successors(t[index], a)
            .iter()
            .map(|&w| {
                let mut u = t.clone();
                u[index] = w;
                body.contains(&u)
            })
            .collect()
    };
    let fix = |var: &str, body: &Formula, start: Tuples| {
        let mut cur = start;
        loop {
            let mut inner = env.clone();
            inner.insert(var.to_string(), cur.clone());
            let next = naive(g, body, arity, &inner);
            if next == cur {
                return cur;
            }
            cur = next;
        }
    };
    match f {
        Formula::True => universe,
        Formula::False => Tuples::new(),
        Formula::Color { color, index } => {
            let c = sig.color_index(color).unwrap();
            universe.into_iter().filter(|t| g.has_color(t[*index], c)).collect()
        }
        Formula::Var(x) => env[x].clone(),
        Formula::Not(b) => universe.difference(&naive(g, b, arity, env)).cloned().collect(),
        Formula::And(x, y) => naive(g, x, arity, env)
            .intersection(&naive(g, y, arity, env))
            .cloned()
            .collect(),
        Formula::Or(x, y) => naive(g, x, arity, env)
            .union(&naive(g, y, arity, env))
            .cloned()
            .collect(),
        Formula::Diamond { action, index, body } => {
            let b = naive(g, body, arity, env);
            universe
                .into_iter()
                .filter(|t| step(action, *index, &b, t).contains(&true))
                .collect()
        }
        Formula::Box { action, index, body } => {
            let b = naive(g, body, arity, env);
            universe
                .into_iter()
                .filter(|t| !step(action, *index, &b, t).contains(&false))
                .collect()
        }
        Formula::Mu { var, body } => fix(var, body, Tuples::new()),
        Formula::Nu { var, body } => fix(var, body, universe),
        Formula::Replace { map, body } => {
            let b = naive(g, body, arity, env);
            universe
                .into_iter()
                .filter(|t| b.contains(&map.iter().map(|&s| t[s]).collect::<Vec<_>>()))
                .collect()
        }
    }
}

fn as_tuples(set: &polymu::eval::TupleSet) -> Tuples {
    set.tuples().collect()
}

#[test]
fn example_formula_matches_naive_reading() {
    let g = example_graph();
    let f = parse("<a@0>(f@0 & <a@1>[a@1]f@1)", g.signature(), 2).unwrap();
    let set = evaluate(&g, &f, 2, &Default::default()).unwrap();
    let expected = naive(&g, &f, 2, &BTreeMap::new());
    assert_eq!(as_tuples(&set), expected);
    assert_eq!(expected, Tuples::from([vec![0, 1], vec![2, 1]]));
}

#[test]
fn random_formulas_match_naive_reading() {
    let sig = Signature::new(["a", "b"], ["f", "g"]).unwrap();
    for k in 0..300 {
        let mut rng = rng_for(101, k);
        let arity = rng.gen_range(1..=3);
        let g = random_small_graph(&mut rng, &sig, 4);
        let shape = FormulaShape {
            arity,
            rooted: false,
            replace: true,
            no_reset_box: false,
        };
        let f = FormulaGen::new(&sig, shape).generate(&mut rng, 10);
        let set = evaluate(&g, &f, arity, &Default::default()).unwrap();
        assert_eq!(as_tuples(&set), naive(&g, &f, arity, &BTreeMap::new()), "{f}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negation_is_complement(seed in any::<u64>()) {
        let sig = Signature::new(["a"], ["f"]).unwrap();
        let mut rng = rng_for(seed, 0);
        let g = random_small_graph(&mut rng, &sig, 5);
        let shape = FormulaShape { arity: 2, rooted: false, replace: true, no_reset_box: false };
        let f = FormulaGen::new(&sig, shape).generate(&mut rng, 8);
        let env = Default::default();
        let pos = evaluate(&g, &f, 2, &env).unwrap();
        let neg = evaluate(&g, &Formula::not(f.clone()), 2, &env).unwrap();
        prop_assert_eq!(neg, pos.complement());
    }

    #[test]
    fn box_is_dual_to_diamond(seed in any::<u64>()) {
        let sig = Signature::new(["a", "b"], ["f"]).unwrap();
        let mut rng = rng_for(seed, 1);
        let g = random_small_graph(&mut rng, &sig, 5);
        let shape = FormulaShape { arity: 1, rooted: false, replace: false, no_reset_box: false };
        let f = FormulaGen::new(&sig, shape).generate(&mut rng, 6);
        let boxed = Formula::boxed("a", 0, f.clone());
        let dual = Formula::not(Formula::diamond("a", 0, Formula::not(f)));
        prop_assert_eq!(models(&g, &boxed, 1).unwrap(), models(&g, &dual, 1).unwrap());
    }

    #[test]
    fn least_fixpoint_below_greatest(seed in any::<u64>()) {
        let sig = Signature::new(["a"], ["f"]).unwrap();
        let mut rng = rng_for(seed, 2);
        let g = random_small_graph(&mut rng, &sig, 5);
        // a positive body with the variable under a modality
        let body = Formula::or(
            Formula::color("f", 0),
            Formula::diamond("a", 0, Formula::var("Z")),
        );
        let env = Default::default();
        let mu = evaluate(&g, &Formula::mu("Z", body.clone()), 1, &env).unwrap();
        let nu = evaluate(&g, &Formula::nu("Z", body), 1, &env).unwrap();
        prop_assert!(mu.is_subset(&nu));
    }
}
