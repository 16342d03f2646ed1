//! Denotational semantics of polyadic formulas over finite graphs.
//!
//! A formula of arity `d` denotes a set of `d`-tuples of nodes, stored as a
//! bitset indexed in mixed radix (component 0 most significant).

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::graph::LabeledGraph;
use crate::logic::{check, free_variables, Formula, FormulaError};

/// Default bound on `|V|^d`.
pub const DEFAULT_TUPLE_CAP: usize = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("{nodes}^{arity} tuples exceed the cap of {cap}")]
    Resource { nodes: usize, arity: usize, cap: usize },
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// A set of `d`-tuples over the nodes `0..n` of one graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TupleSet {
    arity: usize,
    nodes: usize,
    len: usize,
    words: Vec<u64>,
}

impl TupleSet {
    fn with_capacity(nodes: usize, arity: usize, full: bool) -> Self {
        let len = nodes.pow(arity as u32);
        let mut words = vec![if full { u64::MAX } else { 0 }; len.div_ceil(64)];
        if full && !len.is_multiple_of(64) {
            *words.last_mut().unwrap() = (1u64 << (len % 64)) - 1;
        }
        TupleSet {
            arity,
            nodes,
            len,
            words,
        }
    }

    pub fn empty(nodes: usize, arity: usize) -> Self {
        Self::with_capacity(nodes, arity, false)
    }

    pub fn full(nodes: usize, arity: usize) -> Self {
        Self::with_capacity(nodes, arity, true)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes
    }

    fn index(&self, tuple: &[usize]) -> usize {
        assert_eq!(tuple.len(), self.arity, "tuple of wrong arity");
        tuple.iter().fold(0, |acc, &v| {
            assert!(v < self.nodes, "node out of range");
            acc * self.nodes + v
        })
    }

    fn decode(&self, mut k: usize) -> Vec<usize> {
        let mut t = vec![0; self.arity];
        for slot in t.iter_mut().rev() {
            *slot = k % self.nodes;
            k /= self.nodes;
        }
        t
    }

    fn get(&self, k: usize) -> bool {
        self.words[k / 64] >> (k % 64) & 1 == 1
    }

    fn set(&mut self, k: usize) {
        self.words[k / 64] |= 1 << (k % 64);
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.get(self.index(tuple))
    }

    pub fn insert(&mut self, tuple: &[usize]) {
        let k = self.index(tuple);
        self.set(k);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    /// Members in increasing index order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.indices().map(|k| self.decode(k))
    }

    pub fn complement(&self) -> TupleSet {
        let mut out = Self::full(self.nodes, self.arity);
        for (o, w) in out.words.iter_mut().zip(&self.words) {
            *o &= !w;
        }
        out
    }

    pub fn union(&self, other: &TupleSet) -> TupleSet {
        let mut out = self.clone();
        for (o, w) in out.words.iter_mut().zip(&other.words) {
            *o |= w;
        }
        out
    }

    pub fn intersection(&self, other: &TupleSet) -> TupleSet {
        let mut out = self.clone();
        for (o, w) in out.words.iter_mut().zip(&other.words) {
            *o &= w;
        }
        out
    }

    pub fn is_subset(&self, other: &TupleSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Sorted lines `(u,v,…)` using the node ids of `g`.
    pub fn format_tuples(&self, g: &LabeledGraph) -> String {
        let mut lines: Vec<String> = self
            .tuples()
            .map(|t| {
                let ids: Vec<&str> = t.iter().map(|&v| g.node_id(v)).collect();
                format!("({})", ids.join(","))
            })
            .collect();
        lines.sort();
        lines.into_iter().map(|l| l + "\n").collect()
    }
}

impl fmt::Debug for TupleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.tuples()).finish()
    }
}

pub type Environment = BTreeMap<String, TupleSet>;

/// Counters gathered during one evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// Most rounds any single fixpoint iteration needed to stabilize.
    pub max_rounds: usize,
    pub fixpoint_iterations: usize,
}

/// Evaluates `f` at arity `d` on `g` with the default tuple cap.
pub fn evaluate(
    g: &LabeledGraph,
    f: &Formula,
    d: usize,
    env: &Environment,
) -> Result<TupleSet, EvalError> {
    Evaluator::new(g, d).evaluate(f, env).map(|(s, _)| s)
}

/// Whether the all-root tuple satisfies the closed formula `f`.
pub fn models(g: &LabeledGraph, f: &Formula, d: usize) -> Result<bool, EvalError> {
    Evaluator::new(g, d).models(f)
}

#[derive(Clone, Debug)]
pub struct Evaluator<'g> {
    graph: &'g LabeledGraph,
    arity: usize,
    cap: usize,
}

impl<'g> Evaluator<'g> {
    pub fn new(graph: &'g LabeledGraph, arity: usize) -> Self {
        Evaluator {
            graph,
            arity,
            cap: DEFAULT_TUPLE_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn models(&self, f: &Formula) -> Result<bool, EvalError> {
        let (set, _) = self.evaluate(f, &Environment::new())?;
        Ok(set.contains(&vec![self.graph.root(); self.arity]))
    }

    pub fn evaluate(
        &self,
        f: &Formula,
        env: &Environment,
    ) -> Result<(TupleSet, EvalStats), EvalError> {
        let n = self.graph.num_nodes();
        let d = self.arity;
        match n.checked_pow(d as u32) {
            Some(total) if total <= self.cap => {}
            _ => {
                return Err(EvalError::Resource {
                    nodes: n,
                    arity: d,
                    cap: self.cap,
                })
            }
        }
        check(f, self.graph.signature(), d)?;
        for set in env.values() {
            if set.arity != d {
                return Err(EvalError::ArityMismatch {
                    expected: d,
                    found: set.arity,
                });
            }
            if set.nodes != n {
                return Err(EvalError::ArityMismatch {
                    expected: n,
                    found: set.nodes,
                });
            }
        }
        if let Some(x) = free_variables(f).into_iter().find(|x| !env.contains_key(x)) {
            return Err(EvalError::UnboundVariable(x));
        }
        let mut run = Run::new(self.graph, d, env.clone(), f);
        let result = run.eval(f);
        Ok((result, run.stats))
    }
}

/// Non-atomic subformulas of `f` without free variables.
fn closed_subformulas(f: &Formula) -> HashSet<*const Formula> {
    fn go(f: &Formula, out: &mut HashSet<*const Formula>) -> BTreeSet<String> {
        let mut free = BTreeSet::new();
        for c in f.children() {
            free.extend(go(c, out));
        }
        match f {
            Formula::Var(x) => {
                free.insert(x.clone());
            }
            Formula::Mu { var, .. } | Formula::Nu { var, .. } => {
                free.remove(var);
            }
            _ => {}
        }
        if free.is_empty() && !f.children().is_empty() {
            out.insert(f as *const Formula);
        }
        free
    }
    let mut out = HashSet::new();
    go(f, &mut out);
    out
}

struct Run<'g> {
    g: &'g LabeledGraph,
    d: usize,
    n: usize,
    /// `n^(d-1-i)`: weight of component `i` in a tuple index.
    stride: Vec<usize>,
    env: HashMap<String, TupleSet>,
    /// Subformulas without free variables are evaluated once.
    closed: HashMap<*const Formula, TupleSet>,
    closed_nodes: HashSet<*const Formula>,
    stats: EvalStats,
}

impl<'g> Run<'g> {
    fn new(g: &'g LabeledGraph, d: usize, env: Environment, f: &Formula) -> Self {
        let n = g.num_nodes();
        let stride = (0..d).map(|i| n.pow((d - 1 - i) as u32)).collect();
        Run {
            g,
            d,
            n,
            stride,
            env: env.into_iter().collect(),
            closed: HashMap::new(),
            closed_nodes: closed_subformulas(f),
            stats: EvalStats::default(),
        }
    }

    fn component(&self, k: usize, i: usize) -> usize {
        k / self.stride[i] % self.n
    }

    fn eval(&mut self, f: &Formula) -> TupleSet {
        let key = f as *const Formula;
        if let Some(s) = self.closed.get(&key) {
            return s.clone();
        }
        let is_closed = self.closed_nodes.contains(&key);
        let result = self.eval_uncached(f);
        if is_closed {
            self.closed.insert(key, result.clone());
        }
        result
    }

    fn eval_uncached(&mut self, f: &Formula) -> TupleSet {
        let (n, d) = (self.n, self.d);
        match f {
            Formula::True => TupleSet::full(n, d),
            Formula::False => TupleSet::empty(n, d),
            Formula::Color { color, index } => {
                let c = self
                    .g
                    .signature()
                    .color_index(color)
                    .expect("checked color");
                let mut out = TupleSet::empty(n, d);
                for k in 0..out.len {
                    if self.g.has_color(self.component(k, *index), c) {
                        out.set(k);
                    }
                }
                out
            }
            Formula::Var(x) => self.env[x].clone(),
            Formula::Not(g) => self.eval(g).complement(),
            Formula::And(g, h) => {
                let a = self.eval(g);
                a.intersection(&self.eval(h))
            }
            Formula::Or(g, h) => {
                let a = self.eval(g);
                a.union(&self.eval(h))
            }
            Formula::Diamond { action, index, body } => {
                let body = self.eval(body);
                self.diamond(action, *index, &body)
            }
            Formula::Box { action, index, body } => {
                let body = self.eval(body).complement();
                self.diamond(action, *index, &body).complement()
            }
            Formula::Replace { map, body } => {
                let body = self.eval(body);
                let mut out = TupleSet::empty(n, d);
                for k in 0..out.len {
                    let src: usize = map
                        .iter()
                        .enumerate()
                        .map(|(pos, &from)| self.component(k, from) * self.stride[pos])
                        .sum();
                    if body.get(src) {
                        out.set(k);
                    }
                }
                out
            }
            Formula::Mu { var, body } | Formula::Nu { var, body } => {
                let least = matches!(f, Formula::Mu { .. });
                let mut cur = if least {
                    TupleSet::empty(n, d)
                } else {
                    TupleSet::full(n, d)
                };
                let saved = self.env.remove(var);
                let mut rounds = 0;
                loop {
                    rounds += 1;
                    self.env.insert(var.clone(), cur.clone());
                    let next = self.eval(body);
                    if next == cur {
                        break;
                    }
                    cur = next;
                }
                self.stats.max_rounds = self.stats.max_rounds.max(rounds);
                self.stats.fixpoint_iterations += rounds;
                self.env.remove(var);
                if let Some(s) = saved {
                    self.env.insert(var.clone(), s);
                }
                cur
            }
        }
    }

    /// Tuples with an `action`-successor at component `i` landing in `body`.
    fn diamond(&self, action: &str, i: usize, body: &TupleSet) -> TupleSet {
        let a = self
            .g
            .signature()
            .action_index(action)
            .expect("checked action");
        let mut out = TupleSet::empty(self.n, self.d);
        let stride = self.stride[i];
        for k in body.indices() {
            let w = self.component(k, i);
            let rest = k - w * stride;
            for &u in self.g.predecessors(w, a) {
                out.set(rest + u * stride);
            }
        }
        out
    }
}
