//! Non-universality of NFAs over one- and two-letter alphabets, and the
//! per-component versions on lifted graphs.
//!
//! An NFA is a graph whose single color marks accepting states. The queries
//! ask for a word such that every run on it ends outside the accepting
//! states. All searches run over subset states and stop at the first
//! repetition, so they are complete; a step budget bounds the work.

use std::collections::{HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{LabeledGraph, LiftedShape};

/// Default number of subset states a search may visit.
pub const DEFAULT_STEP_BUDGET: usize = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("expected {0}")]
    WrongSignature(&'static str),
    #[error("witness failed independent re-verification: {0}")]
    WitnessRejected(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Length(usize),
    Word(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonUnivVerdict {
    pub member: bool,
    pub witness: Option<Witness>,
    /// The step budget ran out before the search closed a cycle.
    pub exhausted_bound: bool,
}

impl NonUnivVerdict {
    fn member(w: Witness) -> Self {
        NonUnivVerdict {
            member: true,
            witness: Some(w),
            exhausted_bound: false,
        }
    }

    fn non_member(exhausted: bool) -> Self {
        NonUnivVerdict {
            member: false,
            witness: None,
            exhausted_bound: exhausted,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdicts serialize")
    }
}

fn require_base(g: &LabeledGraph, letters: usize) -> Result<(), QueryError> {
    let sig = g.signature();
    if sig.actions().len() != letters || sig.colors().len() != 1 {
        return Err(QueryError::WrongSignature(if letters == 1 {
            "one action and one color"
        } else {
            "two actions and one color"
        }));
    }
    Ok(())
}

fn require_lifted(g: &LabeledGraph, letters: usize, d: usize) -> Result<LiftedShape, QueryError> {
    let what = if letters == 1 {
        "a lifted signature over one action and one color"
    } else {
        "a lifted signature over two actions and one color"
    };
    match g.signature().lifted_shape() {
        Some(s)
            if s.d == d && s.base.actions().len() == letters && s.base.colors().len() == 1 =>
        {
            Ok(s)
        }
        _ => Err(QueryError::WrongSignature(what)),
    }
}

fn singleton(n: usize, v: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    s.insert(v);
    s
}

fn image(g: &LabeledGraph, set: &FixedBitSet, action: usize) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(g.num_nodes());
    for v in set.ones() {
        out.extend(g.successors(v, action).iter().copied());
    }
    out
}

fn accepting(g: &LabeledGraph, color: usize) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(g.num_nodes());
    out.extend(g.nodes().filter(|&v| g.has_color(v, color)));
    out
}

/// Letters ordered by name, for shortlex witnesses.
fn letter_order(names: &[String]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&x, &y| names[x].cmp(&names[y]));
    order
}

/// Least `n` such that no accepting state is reachable by exactly `n` steps.
pub fn one_letter_non_universal(nfa: &LabeledGraph) -> Result<NonUnivVerdict, QueryError> {
    one_letter_with_budget(nfa, DEFAULT_STEP_BUDGET)
}

pub fn one_letter_with_budget(
    nfa: &LabeledGraph,
    budget: usize,
) -> Result<NonUnivVerdict, QueryError> {
    require_base(nfa, 1)?;
    let f = accepting(nfa, 0);
    let mut seen = HashSet::new();
    let mut cur = singleton(nfa.num_nodes(), nfa.root());
    for n in 0..budget {
        if cur.is_disjoint(&f) {
            let reach = reach_by_squaring(nfa, n);
            if !reach.iter().all(|&v| !f.contains(v)) {
                return Err(QueryError::WitnessRejected(format!("length {n}")));
            }
            return Ok(NonUnivVerdict::member(Witness::Length(n)));
        }
        if !seen.insert(cur.clone()) {
            return Ok(NonUnivVerdict::non_member(false));
        }
        cur = image(nfa, &cur, 0);
    }
    Ok(NonUnivVerdict::non_member(true))
}

type Matrix = Vec<FixedBitSet>;

fn compose(x: &Matrix, y: &Matrix) -> Matrix {
    x.iter()
        .map(|row| {
            let mut out = FixedBitSet::with_capacity(y.len());
            for w in row.ones() {
                out.union_with(&y[w]);
            }
            out
        })
        .collect()
}

/// States reachable from the root by exactly `n` steps, computed from the
/// binary expansion of `n` with repeated squaring of the step relation.
pub fn reach_by_squaring(nfa: &LabeledGraph, n: usize) -> Vec<usize> {
    let size = nfa.num_nodes();
    let mut power: Matrix = nfa
        .nodes()
        .map(|v| {
            let mut row = FixedBitSet::with_capacity(size);
            row.extend(nfa.out_edges(v).map(|(_, w)| w));
            row
        })
        .collect();
    let mut result = singleton(size, nfa.root());
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            result = compose(&vec![result], &power).pop().expect("one row");
        }
        k >>= 1;
        if k > 0 {
            power = compose(&power, &power);
        }
    }
    result.ones().collect()
}

/// Shortlex-least word after which no run is accepting.
pub fn two_letter_non_universal(nfa: &LabeledGraph) -> Result<NonUnivVerdict, QueryError> {
    two_letter_with_budget(nfa, DEFAULT_STEP_BUDGET)
}

pub fn two_letter_with_budget(
    nfa: &LabeledGraph,
    budget: usize,
) -> Result<NonUnivVerdict, QueryError> {
    require_base(nfa, 2)?;
    let f = accepting(nfa, 0);
    let names = nfa.signature().actions();
    let order = letter_order(names);
    let start = singleton(nfa.num_nodes(), nfa.root());
    let found = bfs(start, budget, |s| s.is_disjoint(&f), |s, x| image(nfa, s, order[x]), 2);
    match found {
        Search::Found(word) => {
            let word: Vec<String> = word.iter().map(|&x| names[order[x]].clone()).collect();
            let mut cur = singleton(nfa.num_nodes(), nfa.root());
            for x in &word {
                let a = nfa.signature().action_index(x).expect("known letter");
                cur = image(nfa, &cur, a);
            }
            if !cur.is_disjoint(&f) {
                return Err(QueryError::WitnessRejected(format!("word {word:?}")));
            }
            Ok(NonUnivVerdict::member(Witness::Word(word)))
        }
        Search::Closed => Ok(NonUnivVerdict::non_member(false)),
        Search::Exhausted => Ok(NonUnivVerdict::non_member(true)),
    }
}

enum Search {
    Found(Vec<usize>),
    Closed,
    Exhausted,
}

/// Breadth-first search over a deterministic state space; letters are
/// tried in index order so the first hit is shortlex-least.
fn bfs<S: Clone + Eq + std::hash::Hash>(
    start: S,
    budget: usize,
    goal: impl Fn(&S) -> bool,
    step: impl Fn(&S, usize) -> S,
    letters: usize,
) -> Search {
    let mut parent: HashMap<S, Option<(S, usize)>> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(start.clone(), None);
    queue.push_back(start);
    let mut visited = 0;
    while let Some(s) = queue.pop_front() {
        if goal(&s) {
            let mut word = Vec::new();
            let mut cur = s;
            while let Some((prev, x)) = parent[&cur].clone() {
                word.push(x);
                cur = prev;
            }
            word.reverse();
            return Search::Found(word);
        }
        visited += 1;
        if visited > budget {
            return Search::Exhausted;
        }
        for x in 0..letters {
            let t = step(&s, x);
            if !parent.contains_key(&t) {
                parent.insert(t.clone(), Some((s.clone(), x)));
                queue.push_back(t);
            }
        }
    }
    Search::Closed
}

/// Component `i` of a lifted graph seen as an NFA over the base letters:
/// moves of other components are silent and the run restarts after every
/// `rst@i`.
struct Component<'g> {
    g: &'g LabeledGraph,
    /// Counted actions, one per base letter.
    letters: Vec<usize>,
    /// Edges that are neither counted nor `rst@i`.
    silent: Vec<usize>,
    accepting: FixedBitSet,
    start: FixedBitSet,
}

impl<'g> Component<'g> {
    fn new(g: &'g LabeledGraph, shape: &LiftedShape, i: usize, order: &[usize]) -> Self {
        let letters: Vec<usize> = order.iter().map(|&a| shape.action[a][i]).collect();
        let silent = (0..g.signature().actions().len())
            .filter(|x| !letters.contains(x) && *x != shape.reset[i])
            .collect();
        let reachable = g.reachable();
        let mut start = singleton(g.num_nodes(), g.root());
        for v in g.nodes().filter(|&v| reachable[v]) {
            start.extend(g.successors(v, shape.reset[i]).iter().copied());
        }
        let mut c = Component {
            g,
            letters,
            silent,
            accepting: accepting(g, shape.color[0][i]),
            start: FixedBitSet::new(),
        };
        c.start = c.closure(start);
        c
    }

    fn closure(&self, mut set: FixedBitSet) -> FixedBitSet {
        let mut stack: Vec<usize> = set.ones().collect();
        while let Some(v) = stack.pop() {
            for &a in &self.silent {
                for &w in self.g.successors(v, a) {
                    if !set.contains(w) {
                        set.insert(w);
                        stack.push(w);
                    }
                }
            }
        }
        set
    }

    fn step(&self, set: &FixedBitSet, letter: usize) -> FixedBitSet {
        self.closure(image(self.g, set, self.letters[letter]))
    }

    fn rejects(&self, set: &FixedBitSet) -> bool {
        set.is_disjoint(&self.accepting)
    }
}

/// Least `n` such that in every component `i`, no path whose `a@i`-count
/// since the last `rst@i` is `n` ends on an `f@i` node.
pub fn one_lifted_non_universal(g: &LabeledGraph, d: usize) -> Result<NonUnivVerdict, QueryError> {
    one_lifted_with_budget(g, d, DEFAULT_STEP_BUDGET)
}

pub fn one_lifted_with_budget(
    g: &LabeledGraph,
    d: usize,
    budget: usize,
) -> Result<NonUnivVerdict, QueryError> {
    let shape = require_lifted(g, 1, d)?;
    let comps: Vec<Component> = (0..d).map(|i| Component::new(g, &shape, i, &[0])).collect();
    let mut cur: Vec<FixedBitSet> = comps.iter().map(|c| c.start.clone()).collect();
    let mut seen = HashSet::new();
    for n in 0..budget {
        if comps.iter().zip(&cur).all(|(c, s)| c.rejects(s)) {
            if !lifted_counts_reject(g, &shape, n) {
                return Err(QueryError::WitnessRejected(format!("length {n}")));
            }
            return Ok(NonUnivVerdict::member(Witness::Length(n)));
        }
        if !seen.insert(cur.clone()) {
            return Ok(NonUnivVerdict::non_member(false));
        }
        cur = comps.iter().zip(&cur).map(|(c, s)| c.step(s, 0)).collect();
    }
    Ok(NonUnivVerdict::non_member(true))
}

/// Shortlex-least word `w` such that in every component `i`, no path whose
/// counted letters since the last `rst@i` spell `w` ends on an `f@i` node.
pub fn two_lifted_non_universal(g: &LabeledGraph, d: usize) -> Result<NonUnivVerdict, QueryError> {
    two_lifted_with_budget(g, d, DEFAULT_STEP_BUDGET)
}

pub fn two_lifted_with_budget(
    g: &LabeledGraph,
    d: usize,
    budget: usize,
) -> Result<NonUnivVerdict, QueryError> {
    let shape = require_lifted(g, 2, d)?;
    let names = shape.base.actions();
    let order = letter_order(names);
    let comps: Vec<Component> = (0..d).map(|i| Component::new(g, &shape, i, &order)).collect();
    let start: Vec<FixedBitSet> = comps.iter().map(|c| c.start.clone()).collect();
    let found = bfs(
        start,
        budget,
        |t| comps.iter().zip(t).all(|(c, s)| c.rejects(s)),
        |t, x| comps.iter().zip(t).map(|(c, s)| c.step(s, x)).collect(),
        2,
    );
    match found {
        Search::Found(word) => {
            if !lifted_word_rejects(g, &shape, &order, &word) {
                return Err(QueryError::WitnessRejected(format!("word {word:?}")));
            }
            let word = word.iter().map(|&x| names[order[x]].clone()).collect();
            Ok(NonUnivVerdict::member(Witness::Word(word)))
        }
        Search::Closed => Ok(NonUnivVerdict::non_member(false)),
        Search::Exhausted => Ok(NonUnivVerdict::non_member(true)),
    }
}

/// Explores `(node, per-component progress)` over all paths from the root
/// and checks that no component with full progress sits on an accepting
/// node. `advance(i, p, letter)` updates the progress of component `i`;
/// `None` for a letter means `rst@i`.
fn replay<P: Clone + Eq + std::hash::Hash>(
    g: &LabeledGraph,
    shape: &LiftedShape,
    init: P,
    advance: impl Fn(&P, Option<usize>) -> P,
    done: impl Fn(&P) -> bool,
) -> bool {
    let d = shape.d;
    let start = (g.root(), vec![init.clone(); d]);
    let mut seen = HashSet::new();
    let mut stack = vec![start.clone()];
    seen.insert(start);
    // lifted action -> (component, letter or reset)
    let mut meaning: HashMap<usize, (usize, Option<usize>)> = HashMap::new();
    for (a, per) in shape.action.iter().enumerate() {
        for (i, &x) in per.iter().enumerate() {
            meaning.insert(x, (i, Some(a)));
        }
    }
    for (i, &x) in shape.reset.iter().enumerate() {
        meaning.insert(x, (i, None));
    }
    while let Some((v, prog)) = stack.pop() {
        for (i, p) in prog.iter().enumerate() {
            if done(p) && g.has_color(v, shape.color[0][i]) {
                return false;
            }
        }
        for (x, w) in g.out_edges(v) {
            let (i, letter) = meaning[&x];
            let mut next = prog.clone();
            next[i] = advance(&prog[i], letter);
            let state = (w, next);
            if seen.insert(state.clone()) {
                stack.push(state);
            }
        }
    }
    true
}

fn lifted_counts_reject(g: &LabeledGraph, shape: &LiftedShape, n: usize) -> bool {
    replay(
        g,
        shape,
        0usize,
        |&c, letter| match letter {
            None => 0,
            Some(_) => (c + 1).min(n + 1),
        },
        |&c| c == n,
    )
}

fn lifted_word_rejects(g: &LabeledGraph, shape: &LiftedShape, order: &[usize], word: &[usize]) -> bool {
    // progress: Some(k) = first k letters matched exactly; None = diverged
    let word: Vec<usize> = word.iter().map(|&x| order[x]).collect();
    replay(
        g,
        shape,
        Some(0usize),
        |p, letter| match (letter, *p) {
            (None, _) => Some(0),
            (Some(a), Some(k)) if k < word.len() && word[k] == a => Some(k + 1),
            _ => None,
        },
        |p| *p == Some(word.len()),
    )
}

/// Replays the lifted definition directly: true iff no path reaches an
/// `f@i` node right after exactly `n` counted steps in component `i`
/// since its last reset.
pub fn lifted_length_rejected(g: &LabeledGraph, d: usize, n: usize) -> Result<bool, QueryError> {
    let shape = require_lifted(g, 1, d)?;
    Ok(lifted_counts_reject(g, &shape, n))
}

/// Like [`lifted_length_rejected`] for a word over the two base letters.
pub fn lifted_word_rejected(g: &LabeledGraph, d: usize, word: &[String]) -> Result<bool, QueryError> {
    let shape = require_lifted(g, 2, d)?;
    let names = shape.base.actions();
    let order = letter_order(names);
    let mut letters = Vec::with_capacity(word.len());
    for w in word {
        let x = order
            .iter()
            .position(|&a| names[a] == *w)
            .ok_or(QueryError::WrongSignature("word letter outside the base alphabet"))?;
        letters.push(x);
    }
    Ok(lifted_word_rejects(g, &shape, &order, &letters))
}
