//! Alternating parity tree automata over labeled graphs, the translation
//! from closed arity-1 formulas, and acceptance via parity games.

mod game;

pub use game::{solve_parity, verify_strategy, ParityGame, Player, Solution};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{FiniteTree, LabeledGraph, Signature};
use crate::logic::{check, free_variables, Formula, FormulaError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("formula has free variables: {0:?}")]
    OpenFormula(Vec<String>),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("automaton and graph signatures differ")]
    SignatureMismatch,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("path has {len} edges but at least {needed} are needed")]
    PathTooShort { len: usize, needed: usize },
    #[error("tree is not accepted")]
    Rejected,
}

/// Transition formulas `c | ¬c | ◇a q | □a q | q ∨ q | q ∧ q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transition {
    Literal { color: usize, positive: bool },
    Diamond { action: usize, target: usize },
    Box { action: usize, target: usize },
    Or(usize, usize),
    And(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Apt {
    signature: Signature,
    delta: Vec<Transition>,
    priority: Vec<usize>,
    initial: usize,
}

impl Apt {
    pub fn new(
        signature: Signature,
        delta: Vec<Transition>,
        priority: Vec<usize>,
        initial: usize,
    ) -> Self {
        assert_eq!(delta.len(), priority.len(), "one priority per state");
        assert!(initial < delta.len(), "initial state out of range");
        Apt {
            signature,
            delta,
            priority,
            initial,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn transition(&self, q: usize) -> Transition {
        self.delta[q]
    }

    pub fn priority(&self, q: usize) -> usize {
        self.priority[q]
    }
}

impl fmt::Display for Apt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = &self.signature;
        writeln!(f, "states {} initial q{}", self.num_states(), self.initial)?;
        for (q, t) in self.delta.iter().enumerate() {
            let body = match *t {
                Transition::Literal { color, positive } => {
                    format!("{}{}", if positive { "" } else { "~" }, sig.colors()[color])
                }
                Transition::Diamond { action, target } => {
                    format!("<{}>q{}", sig.actions()[action], target)
                }
                Transition::Box { action, target } => {
                    format!("[{}]q{}", sig.actions()[action], target)
                }
                Transition::Or(a, b) => format!("q{a} | q{b}"),
                Transition::And(a, b) => format!("q{a} & q{b}"),
            };
            writeln!(f, "q{q} [{}] -> {body}", self.priority[q])?;
        }
        Ok(())
    }
}

/// Negation normal form; replacement is dropped (identity at arity 1).
fn nnf(f: &Formula, neg: bool) -> Formula {
    match f {
        Formula::True | Formula::False => {
            if matches!(f, Formula::True) != neg {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Color { .. } => {
            if neg {
                Formula::not(f.clone())
            } else {
                f.clone()
            }
        }
        // bound variables occur positively, so the negation parity here
        // matches that at the binder, where it was already accounted for
        Formula::Var(_) => f.clone(),
        Formula::Not(g) => nnf(g, !neg),
        Formula::And(g, h) | Formula::Or(g, h) => {
            let (g, h) = (nnf(g, neg), nnf(h, neg));
            if matches!(f, Formula::And(..)) != neg {
                Formula::and(g, h)
            } else {
                Formula::or(g, h)
            }
        }
        Formula::Diamond { action, index, body } | Formula::Box { action, index, body } => {
            let body = nnf(body, neg);
            if matches!(f, Formula::Diamond { .. }) != neg {
                Formula::diamond(action.clone(), *index, body)
            } else {
                Formula::boxed(action.clone(), *index, body)
            }
        }
        Formula::Mu { var, body } | Formula::Nu { var, body } => {
            let body = nnf(body, neg);
            if matches!(f, Formula::Mu { .. }) != neg {
                Formula::mu(var.clone(), body)
            } else {
                Formula::nu(var.clone(), body)
            }
        }
        Formula::Replace { body, .. } => nnf(body, neg),
    }
}

struct Builder<'s> {
    sig: &'s Signature,
    delta: Vec<Option<Transition>>,
    /// Fixpoint states get their parity; others have none.
    kind: Vec<Option<bool>>,
    states: HashMap<Formula, usize>,
    vars: HashMap<String, usize>,
    /// Fixpoint states directly nested inside each fixpoint state.
    nested: Vec<Vec<usize>>,
}

impl Builder<'_> {
    fn alloc(&mut self) -> usize {
        self.delta.push(None);
        self.kind.push(None);
        self.nested.push(Vec::new());
        self.delta.len() - 1
    }

    fn literal(&mut self, color: usize, positive: bool) -> usize {
        let key = if positive {
            Formula::color(self.sig.colors()[color].clone(), 0)
        } else {
            Formula::not(Formula::color(self.sig.colors()[color].clone(), 0))
        };
        self.state(&key, None)
    }

    /// State for `f`; `enclosing` is the innermost fixpoint state around it.
    fn state(&mut self, f: &Formula, enclosing: Option<usize>) -> usize {
        if let Formula::Var(x) = f {
            return self.vars[x];
        }
        if let Some(&q) = self.states.get(f) {
            return q;
        }
        let q = self.alloc();
        self.states.insert(f.clone(), q);
        let t = match f {
            Formula::True | Formula::False => {
                let (pos, negq) = (self.literal(0, true), self.literal(0, false));
                if matches!(f, Formula::True) {
                    Transition::Or(pos, negq)
                } else {
                    Transition::And(pos, negq)
                }
            }
            Formula::Color { color, .. } => Transition::Literal {
                color: self.sig.color_index(color).expect("checked"),
                positive: true,
            },
            Formula::Not(g) => match &**g {
                Formula::Color { color, .. } => Transition::Literal {
                    color: self.sig.color_index(color).expect("checked"),
                    positive: false,
                },
                _ => unreachable!("negation normal form"),
            },
            Formula::And(g, h) => Transition::And(self.state(g, enclosing), self.state(h, enclosing)),
            Formula::Or(g, h) => Transition::Or(self.state(g, enclosing), self.state(h, enclosing)),
            Formula::Diamond { action, body, .. } => Transition::Diamond {
                action: self.sig.action_index(action).expect("checked"),
                target: self.state(body, enclosing),
            },
            Formula::Box { action, body, .. } => Transition::Box {
                action: self.sig.action_index(action).expect("checked"),
                target: self.state(body, enclosing),
            },
            Formula::Mu { var, body } | Formula::Nu { var, body } => {
                self.kind[q] = Some(matches!(f, Formula::Mu { .. }));
                self.vars.insert(var.clone(), q);
                if let Some(outer) = enclosing {
                    self.nested[outer].push(q);
                }
                let b = self.state(body, Some(q));
                Transition::Or(b, b)
            }
            Formula::Var(_) | Formula::Replace { .. } => unreachable!(),
        };
        self.delta[q] = Some(t);
        q
    }

    /// Innermost fixpoints get the smallest priority of their parity; an
    /// enclosing fixpoint is never below anything nested inside it.
    fn priority(&self, q: usize, memo: &mut Vec<Option<usize>>) -> usize {
        if let Some(p) = memo[q] {
            return p;
        }
        let below = self.nested[q]
            .iter()
            .map(|&r| self.priority(r, memo))
            .max()
            .unwrap_or(0);
        let odd = self.kind[q] == Some(true);
        let p = if (below % 2 == 1) == odd { below } else { below + 1 };
        let p = if odd && p == 0 { 1 } else { p };
        memo[q] = Some(p);
        p
    }
}

/// Translates a closed arity-1 formula into an automaton with the same
/// language.
pub fn formula_to_apt(f: &Formula, sig: &Signature) -> Result<Apt, AutomatonError> {
    check(f, sig, 1)?;
    let free = free_variables(f);
    if !free.is_empty() {
        return Err(AutomatonError::OpenFormula(free.into_iter().collect()));
    }
    let f = nnf(f, false);
    let mut b = Builder {
        sig,
        delta: Vec::new(),
        kind: Vec::new(),
        states: HashMap::new(),
        vars: HashMap::new(),
        nested: Vec::new(),
    };
    let initial = b.state(&f, None);
    let mut memo = vec![None; b.delta.len()];
    let priority = (0..b.delta.len())
        .map(|q| {
            if b.kind[q].is_some() {
                b.priority(q, &mut memo)
            } else {
                0
            }
        })
        .collect();
    let delta = b.delta.into_iter().map(|t| t.expect("every state defined")).collect();
    Ok(Apt::new(sig.clone(), delta, priority, initial))
}

/// The acceptance game: position `v * |Q| + q` stands for `(v, q)`.
/// Literal positions are dead ends owned by the player whose claim fails.
pub fn build_acceptance_game(apt: &Apt, g: &LabeledGraph) -> Result<ParityGame, AutomatonError> {
    if apt.signature() != g.signature() {
        return Err(AutomatonError::SignatureMismatch);
    }
    let nq = apt.num_states();
    let pos = |v: usize, q: usize| v * nq + q;
    let mut owner = Vec::with_capacity(g.num_nodes() * nq);
    let mut priority = Vec::with_capacity(owner.capacity());
    let mut moves = Vec::with_capacity(owner.capacity());
    for v in g.nodes() {
        for q in 0..nq {
            let (o, m) = match apt.transition(q) {
                Transition::Literal { color, positive } => {
                    let holds = g.has_color(v, color) == positive;
                    (if holds { Player::Forall } else { Player::Exists }, vec![])
                }
                Transition::Diamond { action, target } => (
                    Player::Exists,
                    g.successors(v, action).iter().map(|&w| pos(w, target)).collect(),
                ),
                Transition::Box { action, target } => (
                    Player::Forall,
                    g.successors(v, action).iter().map(|&w| pos(w, target)).collect(),
                ),
                Transition::Or(a, b) => (Player::Exists, dedup(vec![pos(v, a), pos(v, b)])),
                Transition::And(a, b) => (Player::Forall, dedup(vec![pos(v, a), pos(v, b)])),
            };
            owner.push(o);
            priority.push(apt.priority(q));
            moves.push(m);
        }
    }
    Ok(ParityGame {
        owner,
        priority,
        moves,
        initial: pos(g.root(), apt.initial()),
    })
}

fn dedup(mut v: Vec<usize>) -> Vec<usize> {
    v.dedup();
    v
}

pub fn accepts(apt: &Apt, g: &LabeledGraph) -> Result<bool, AutomatonError> {
    let game = build_acceptance_game(apt, g)?;
    Ok(solve_parity(&game).winner[game.initial] == Player::Exists)
}

fn check_path(tree: &FiniteTree, path: &[usize]) -> Result<(), AutomatonError> {
    if tree.is_root_path(path) {
        Ok(())
    } else {
        Err(AutomatonError::InvalidPath(
            "must start at the root and follow edges".into(),
        ))
    }
}

/// `S_i`: the states from which `∃` wins at the `i`-th node of `path`.
pub fn winning_state_sets(
    apt: &Apt,
    tree: &FiniteTree,
    path: &[usize],
) -> Result<Vec<Vec<usize>>, AutomatonError> {
    check_path(tree, path)?;
    let game = build_acceptance_game(apt, tree.graph())?;
    let sol = solve_parity(&game);
    let nq = apt.num_states();
    Ok(path
        .iter()
        .map(|&v| {
            (0..nq)
                .filter(|&q| sol.winner[v * nq + q] == Player::Exists)
                .collect()
        })
        .collect())
}

/// The lexicographically least `(i, j)` with `1 ≤ i < j ≤ 2^|Q| + 1` and
/// `S_i = S_j` along `path`; `path` must have at least `2^|Q| + 1` edges.
pub fn find_pumping_pair(
    apt: &Apt,
    tree: &FiniteTree,
    path: &[usize],
) -> Result<(usize, usize), AutomatonError> {
    check_path(tree, path)?;
    let len = path.len() - 1;
    let bound = 1usize
        .checked_shl(apt.num_states() as u32)
        .and_then(|b| b.checked_add(1))
        .unwrap_or(usize::MAX);
    if len < bound {
        return Err(AutomatonError::PathTooShort { len, needed: bound });
    }
    if !accepts(apt, tree.graph())? {
        return Err(AutomatonError::Rejected);
    }
    let sets = winning_state_sets(apt, tree, &path[..=bound])?;
    let mut first: HashMap<&Vec<usize>, usize> = HashMap::new();
    let mut best: Option<(usize, usize)> = None;
    for (k, s) in sets.iter().enumerate().skip(1) {
        match first.get(s) {
            Some(&i) => {
                if best.is_none_or(|(bi, _)| i < bi) {
                    best = Some((i, k));
                }
            }
            None => {
                first.insert(s, k);
            }
        }
    }
    Ok(best.expect("pigeonhole: more indices than state sets"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::models;
    use crate::graph::{example_graph, unfold, GraphBuilder};
    use crate::logic::parse;

    fn sig2() -> Signature {
        Signature::new(["a", "b"], ["f"]).unwrap()
    }

    #[test]
    fn tt_accepts_everything() {
        let g = example_graph();
        let apt = formula_to_apt(&Formula::True, g.signature()).unwrap();
        assert!(accepts(&apt, &g).unwrap());
        let apt = formula_to_apt(&Formula::False, g.signature()).unwrap();
        assert!(!accepts(&apt, &g).unwrap());
    }

    #[test]
    fn reachability_automaton() {
        let f = parse("mu X. f | <a>X | <b>X", &sig2(), 1).unwrap();
        let apt = formula_to_apt(&f, &sig2()).unwrap();
        let mut b = GraphBuilder::new(sig2());
        b.node("0", None::<&str>).unwrap();
        b.node("1", None::<&str>).unwrap();
        b.node("2", ["f"]).unwrap();
        b.edge("0", "a", "1").unwrap();
        b.edge("1", "b", "2").unwrap();
        b.edge("1", "a", "1").unwrap();
        b.root("0").unwrap();
        let g = b.build().unwrap();
        assert!(accepts(&apt, &g).unwrap());
        let mut b = GraphBuilder::new(sig2());
        b.node("0", None::<&str>).unwrap();
        b.edge("0", "a", "0").unwrap();
        b.root("0").unwrap();
        assert!(!accepts(&apt, &b.build().unwrap()).unwrap());
        // the least fixpoint has odd priority
        assert_eq!(apt.priority(apt.initial()) % 2, 1);
    }

    #[test]
    fn agrees_with_evaluator_on_alternation() {
        let g = example_graph();
        for text in [
            "nu X. mu Y. (f & <a>X) | <a>Y",
            "mu X. nu Y. (f | <a>X) & [a]Y",
            "~mu X. f | <a>X",
            "nu X. [a]X & ~f",
            "<a>[a]~f",
        ] {
            let f = parse(text, g.signature(), 1).unwrap();
            let apt = formula_to_apt(&f, g.signature()).unwrap();
            for v in g.nodes() {
                let h = g.with_root(v);
                assert_eq!(accepts(&apt, &h).unwrap(), models(&h, &f, 1).unwrap(), "{text} at {v}");
            }
        }
    }

    #[test]
    fn game_size_and_literals() {
        let g = example_graph();
        let apt = formula_to_apt(&parse("f", g.signature(), 1).unwrap(), g.signature()).unwrap();
        assert_eq!(apt.num_states(), 1);
        let game = build_acceptance_game(&apt, &g).unwrap();
        assert_eq!(game.len(), g.num_nodes() * apt.num_states());
        assert!(!accepts(&apt, &g).unwrap());
        assert!(accepts(&apt, &g.with_root(1)).unwrap());
        let stuck = formula_to_apt(&parse("<a>tt", g.signature(), 1).unwrap(), g.signature()).unwrap();
        let mut b = GraphBuilder::new(g.signature().clone());
        b.node("x", None::<&str>).unwrap();
        b.root("x").unwrap();
        assert!(!accepts(&stuck, &b.build().unwrap()).unwrap());
    }

    #[test]
    fn pumping_pair_on_constant_path() {
        let sig = Signature::new(["a"], ["f"]).unwrap();
        let mut b = GraphBuilder::new(sig.clone());
        b.node("s", ["f"]).unwrap();
        b.edge("s", "a", "s").unwrap();
        b.root("s").unwrap();
        let loop_graph = b.build().unwrap();
        let apt = formula_to_apt(&parse("nu X. f & [a]X", &sig, 1).unwrap(), &sig).unwrap();
        let n = (1 << apt.num_states()) + 1;
        let tree = unfold(&loop_graph, n + 2);
        let path: Vec<usize> = {
            let mut p = vec![tree.root()];
            while let Some(&c) = tree.children(*p.last().unwrap()).first() {
                p.push(c);
            }
            p
        };
        let sets = winning_state_sets(&apt, &tree, &path).unwrap();
        // the leaf has no successors, so all sets are full
        assert!(sets.iter().all(|s| s == &sets[0]));
        assert_eq!(find_pumping_pair(&apt, &tree, &path).unwrap(), (1, 2));
        assert!(matches!(
            find_pumping_pair(&apt, &tree, &path[..3]),
            Err(AutomatonError::PathTooShort { .. })
        ));
    }
}
