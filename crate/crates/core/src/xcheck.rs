//! Randomized and exhaustive cross-checks between independent
//! implementations of the same notion. Each check returns a
//! [`CriterionReport`]; [`run_all`] runs all twelve.

use std::collections::BTreeSet;
use std::fmt;
use std::thread;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::automata::{accepts, build_acceptance_game, find_pumping_pair, formula_to_apt};
use crate::automata::{solve_parity, verify_strategy, Player};
use crate::bisim::{
    bisimilar, factor, has_reset_property, is_persistent, largest_d_bisimulation, power_conditions,
    quotient, PowerMethod,
};
use crate::corpus::{
    perturb, random_graph, random_small_graph, random_spine_tree, rng_for, split_node, FormulaGen,
    FormulaShape,
};
use crate::eval::{models, Evaluator};
use crate::graph::{power, product, LabeledGraph, Signature};
use crate::logic::{gen_bisim_formula, monofy, polyfy, Formula, NameSupply};
use crate::pumping::{check_luni, gen_rword_tree, pump, reach_formula, Letter};
use crate::queries::{
    lifted_length_rejected, lifted_word_rejected, one_letter_with_budget, one_lifted_with_budget,
    reach_by_squaring, two_lifted_with_budget, two_letter_with_budget, Witness,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("unknown criterion {0} (expected 1..=12)")]
    UnknownCriterion(usize),
}

/// Knobs for a cross-check run. Identical configs give identical reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Overrides the sample count of every randomized check.
    pub iterations: Option<usize>,
    /// Node cap for the random graphs of the formula corpus.
    pub max_nodes: usize,
    /// Size cap for the random formulas of the formula corpus.
    pub max_formula_size: usize,
    /// Largest `d` used by the formula corpus.
    pub max_d: usize,
    pub step_budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 7,
            iterations: None,
            max_nodes: 5,
            max_formula_size: 12,
            max_d: 2,
            step_budget: crate::queries::DEFAULT_STEP_BUDGET,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let caps = [
            ("iterations", self.iterations.unwrap_or(1)),
            ("max nodes", self.max_nodes),
            ("max formula size", self.max_formula_size),
            ("max d", self.max_d),
            ("step budget", self.step_budget),
        ];
        match caps.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(ConfigError::NotPositive(name)),
            None => Ok(()),
        }
    }

    fn samples(&self, default: usize) -> usize {
        self.iterations.unwrap_or(default)
    }

    /// The generator for sample `index` of criterion `id`.
    fn rng(&self, id: usize, index: usize) -> rand_chacha::ChaCha8Rng {
        rng_for(self.seed, ((id as u64) << 32) | index as u64)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub cases: usize,
    /// Descriptions of the first few failing cases.
    pub failures: Vec<String>,
    pub failure_count: usize,
    pub notes: String,
}

const SHOWN_FAILURES: usize = 5;

impl CriterionReport {
    fn new(id: usize, name: &'static str) -> Self {
        CriterionReport {
            id,
            name,
            cases: 0,
            failures: Vec::new(),
            failure_count: 0,
            notes: String::new(),
        }
    }

    fn fail(&mut self, what: String) {
        self.failure_count += 1;
        if self.failures.len() < SHOWN_FAILURES {
            self.failures.push(what);
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:>2} {}: {}/{} cases agree",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.cases.saturating_sub(self.failure_count),
            self.cases
        )?;
        if !self.notes.is_empty() {
            write!(f, " ({})", self.notes)?;
        }
        for e in &self.failures {
            write!(f, "\n       {e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub config: RunConfig,
    pub criteria: Vec<CriterionReport>,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.criteria.iter().filter(|c| !c.passed()).count()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.criteria {
            writeln!(f, "{c}")?;
        }
        write!(
            f,
            "{} criteria, {} failed",
            self.criteria.len(),
            self.failures()
        )
    }
}

pub const CRITERIA: usize = 12;

pub fn run_criterion(id: usize, cfg: &RunConfig) -> Result<CriterionReport, ConfigError> {
    cfg.validate()?;
    Ok(match id {
        1 => monofy_round_trip(cfg),
        2 => transform_inverses(cfg),
        3 => power_detection(cfg),
        4 => factorization(cfg),
        5 => bisim_formula(cfg),
        6 => one_letter_lifting(cfg),
        7 => two_letter_lifting(cfg),
        8 => squaring(cfg),
        9 => apt_vs_eval(cfg),
        10 => pumping(cfg),
        11 => relative_regularity(cfg),
        12 => bisim_invariance(cfg),
        other => return Err(ConfigError::UnknownCriterion(other)),
    })
}

pub fn run_all(cfg: &RunConfig) -> Result<SuiteReport, ConfigError> {
    let criteria = (1..=CRITERIA)
        .map(|id| run_criterion(id, cfg))
        .collect::<Result<_, _>>()?;
    Ok(SuiteReport {
        config: cfg.clone(),
        criteria,
    })
}

/// Maps `f` over `0..n` on all available cores, keeping the order.
fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = thread::available_parallelism().map_or(1, |p| p.get()).min(n.max(1));
    let chunk = n.div_ceil(workers.max(1)).max(1);
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = (0..n)
            .step_by(chunk)
            .map(|lo| s.spawn(move || (lo..(lo + chunk).min(n)).map(f).collect::<Vec<T>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

fn sig(actions: &[&str], colors: &[&str]) -> Signature {
    Signature::new(actions.iter().copied(), colors.iter().copied()).expect("valid signature")
}

/// One sample of the formula corpus: a graph, `d`, and a `d`-rooted
/// formula of arity `d + 1`.
pub struct CorpusCase {
    pub graph: LabeledGraph,
    pub d: usize,
    pub formula: Formula,
}

pub fn formula_corpus(cfg: &RunConfig) -> Vec<CorpusCase> {
    let base = sig(&["a", "b"], &["f", "g"]);
    (0..cfg.samples(200))
        .map(|k| {
            let mut rng = cfg.rng(1, k);
            let d = rng.gen_range(1..=cfg.max_d);
            // half of the graphs carry a duplicated node so quotients shrink
            let graph = if cfg.max_nodes > 1 && rng.gen_bool(0.5) {
                let g = random_small_graph(&mut rng, &base, cfg.max_nodes - 1);
                split_node(&mut rng, &g)
            } else {
                random_small_graph(&mut rng, &base, cfg.max_nodes)
            };
            let size = rng.gen_range(1..=cfg.max_formula_size);
            let shape = FormulaShape {
                arity: d + 1,
                rooted: true,
                replace: true,
                no_reset_box: false,
            };
            let formula = FormulaGen::new(&base, shape).generate(&mut rng, size);
            CorpusCase { graph, d, formula }
        })
        .collect()
}

fn monofy_round_trip(cfg: &RunConfig) -> CriterionReport {
    let mut r = CriterionReport::new(1, "monofication preserves truth on powers");
    let corpus = formula_corpus(cfg);
    let outcomes = par_map(corpus.len(), |k| {
        let c = &corpus[k];
        let poly = models(&c.graph, &c.formula, c.d + 1).map_err(|e| e.to_string())?;
        let mono = monofy(&c.formula, c.d + 1).map_err(|e| e.to_string())?;
        let pow = power(&c.graph, c.d).map_err(|e| e.to_string())?;
        let lifted = models(&pow, &mono, 1).map_err(|e| e.to_string())?;
        Ok::<_, String>((poly, lifted))
    });
    let mut truths = 0;
    for (k, o) in outcomes.into_iter().enumerate() {
        let c = &corpus[k];
        match o {
            Ok((poly, lifted)) => {
                truths += poly as usize;
                r.check(poly == lifted, || {
                    format!("sample {k}: d={} {} gives {poly} vs {lifted}", c.d, c.formula)
                })
            }
            Err(e) => r.check(false, || format!("sample {k}: {e}")),
        }
    }
    r.notes = format!("{truths} true, {} false", r.cases - truths);
    r
}

fn transform_inverses(cfg: &RunConfig) -> CriterionReport {
    let mut r = CriterionReport::new(2, "polyfy and monofy are mutually inverse");
    let base = sig(&["a", "b"], &["f", "g"]);
    for k in 0..cfg.samples(200) {
        let mut rng = cfg.rng(2, k);
        let d = rng.gen_range(1..=cfg.max_d);
        let size = rng.gen_range(1..=cfg.max_formula_size);
        let rooted = FormulaShape {
            arity: d + 1,
            rooted: true,
            replace: true,
            no_reset_box: false,
        };
        let f = FormulaGen::new(&base, rooted).generate(&mut rng, size);
        let back = monofy(&f, d + 1).and_then(|m| polyfy(&m, d));
        r.check(back.as_ref() == Ok(&f), || {
            format!("sample {k}: polyfy(monofy({f})) = {back:?}")
        });

        let lifted = base.lift(d).expect("liftable");
        let mono_shape = FormulaShape {
            arity: 1,
            rooted: false,
            replace: false,
            no_reset_box: true,
        };
        let g = FormulaGen::new(&lifted, mono_shape).generate(&mut rng, size);
        let back = polyfy(&g, d).and_then(|p| monofy(&p, d + 1));
        r.check(back.as_ref() == Ok(&g), || {
            format!("sample {k}: monofy(polyfy({g})) = {back:?}")
        });
    }
    r
}

/// A random lifted graph: pure noise, a perturbed power, or a bisimilar
/// variant of a product. `max_nodes` bounds the result.
fn random_lifted(rng: &mut impl Rng, base: &Signature, d: usize, max_nodes: usize) -> LabeledGraph {
    let factor_cap = match d {
        1 => max_nodes - 1,
        _ => 2,
    };
    match rng.gen_range(0..3) {
        0 => {
            let lifted = base.lift(d).expect("liftable");
            random_small_graph(rng, &lifted, max_nodes)
        }
        1 => {
            let g = random_small_graph(rng, base, factor_cap);
            let p = power(&g, d).expect("d >= 1");
            let flips = rng.gen_range(0..3);
            perturb(rng, &p, flips)
        }
        _ => {
            let parts: Vec<LabeledGraph> =
                (0..d).map(|_| random_small_graph(rng, base, factor_cap)).collect();
            let refs: Vec<&LabeledGraph> = parts.iter().collect();
            let p = product(&refs).expect("same signature");
            if p.num_nodes() < max_nodes {
                split_node(rng, &p)
            } else {
                p
            }
        }
    }
}

fn power_detection(cfg: &RunConfig) -> CriterionReport {
    let mut r = CriterionReport::new(3, "power detection by d-bisimulation and by formulas agree");
    let base = sig(&["a"], &["f"]);
    let mut powers = 0;
    let n = cfg.samples(100);
    let outcomes = par_map(n, |k| {
        let mut rng = cfg.rng(3, k);
        let d = rng.gen_range(1..=2);
        let g = random_lifted(&mut rng, &base, d, 9);
        power_conditions(&g, d, PowerMethod::Both)
    });
    for (k, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(c) => {
                powers += c.is_power() as usize;
                r.check(true, String::new)
            }
            Err(e) => r.check(false, || format!("random sample {k}: {e}")),
        }
    }
    // constructed powers and mixed products
    let m = cfg.samples(50);
    for k in 0..m {
        let mut rng = cfg.rng(3, n + k);
        if k % 2 == 0 {
            let d = rng.gen_range(1..=2);
            let g = random_small_graph(&mut rng, &base, 3);
            let p = power(&g, d).expect("d >= 1");
            let got = power_conditions(&p, d, PowerMethod::Both);
            r.check(matches!(&got, Ok(c) if c.is_power()), || {
                format!("power sample {k}: {got:?}")
            });
        } else {
            let (g1, g2) = loop {
                let g1 = random_small_graph(&mut rng, &base, 3);
                let g2 = random_small_graph(&mut rng, &base, 3);
                if !bisimilar(&g1, &g2).expect("same signature") {
                    break (g1, g2);
                }
            };
            let p = product(&[&g1, &g2]).expect("same signature");
            let got = power_conditions(&p, 2, PowerMethod::Both);
            r.check(
                matches!(&got, Ok(c) if c.persistent && c.reset && !c.power_rooted),
                || format!("product sample {k}: {got:?}"),
            );
        }
    }
    r.notes = format!("{powers}/{n} random graphs are powers");
    r
}

fn factorization(cfg: &RunConfig) -> CriterionReport {
    let mut r = CriterionReport::new(4, "factors of powers and products");
    let base = sig(&["a", "b"], &["f"]);
    let n = cfg.samples(100);
    let outcomes = par_map(n, |k| {
        let mut rng = cfg.rng(4, k);
        let d = rng.gen_range(1..=3);
        let g = random_small_graph(&mut rng, &base, 4);
        let p = power(&g, d).expect("d >= 1");
        (0..d)
            .map(|i| match factor(&p, i) {
                Ok(h) => bisimilar(&h, &g).map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            })
            .collect::<Vec<_>>()
    });
    for (k, per) in outcomes.into_iter().enumerate() {
        for (i, o) in per.into_iter().enumerate() {
            r.check(matches!(o, Ok(true)), || {
                format!("power sample {k}, factor {i}: {o:?}")
            });
        }
    }
    let m = cfg.samples(50);
    let outcomes = par_map(m, |k| {
        let mut rng = cfg.rng(4, n + k);
        let d = rng.gen_range(2..=3);
        let parts: Vec<LabeledGraph> = (0..d).map(|_| random_small_graph(&mut rng, &base, 3)).collect();
        let refs: Vec<&LabeledGraph> = parts.iter().collect();
        let mut h = product(&refs).expect("same signature");
        if rng.gen_bool(0.5) {
            h = split_node(&mut rng, &h);
        }
        let fam = largest_d_bisimulation(&h).map_err(|e| e.to_string())?;
        if !(is_persistent(&h, &fam).map_err(|e| e.to_string())?
            && has_reset_property(&h, &fam).map_err(|e| e.to_string())?)
        {
            return Err("product is not persistent with resets".to_string());
        }
        let factors = (0..d)
            .map(|i| factor(&h, i))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let refs: Vec<&LabeledGraph> = factors.iter().collect();
        let back = product(&refs).map_err(|e| e.to_string())?;
        bisimilar(&back, &h).map_err(|e| e.to_string())
    });
    for (k, o) in outcomes.into_iter().enumerate() {
        r.check(matches!(o, Ok(true)), || format!("product sample {k}: {o:?}"));
    }
    r
}

fn bisim_formula(cfg: &RunConfig) -> CriterionReport {
    let mut r = CriterionReport::new(5, "bisimulation formulas define the d-bisimulation");
    let base = sig(&["a"], &["f"]);
    let outcomes = par_map(cfg.samples(50), |k| {
        let mut rng = cfg.rng(5, k);
        let d = rng.gen_range(1..=2);
        let g = random_lifted(&mut rng, &base, d, 9);
        let fam = largest_d_bisimulation(&g).map_err(|e| e.to_string())?;
        let ev = Evaluator::new(&g, 2);
        let mut bad = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let f = gen_bisim_formula(i, j, &base, &mut NameSupply::new());
                let set = ev.evaluate(&f, &Default::default()).map_err(|e| e.to_string())?.0;
                let mismatch = g.nodes().any(|v| {
                    g.nodes().any(|w| set.contains(&[v, w]) != fam.related(i, j, v, w))
                });
                if mismatch {
                    bad.push((i, j));
                }
            }
        }
        Ok::<_, String>(bad)
    });
    for (k, o) in outcomes.into_iter().enumerate() {
        r.check(matches!(&o, Ok(b) if b.is_empty()), || {
            format!("sample {k}: mismatching (i,j) {o:?}")
        });
    }
    r
}

/// The 1-letter NFA with `n` states, edge bitmask `edges` (bit `u*n+v`)
/// and accepting bitmask `acc`.
fn nfa_from_masks(base: &Signature, n: usize, edges: u32, acc: u32) -> LabeledGraph {
    let labels = (0..n)
        .map(|v| {
            if acc >> v & 1 == 1 {
                BTreeSet::from([0])
            } else {
                BTreeSet::new()
            }
        })
        .collect();
    let edge_set: BTreeSet<(usize, usize, usize)> = (0..n * n)
        .filter(|b| edges >> b & 1 == 1)
        .map(|b| (b / n, 0, b % n))
        .collect();
    let ids = (0..n).map(|v| v.to_string()).collect();
    LabeledGraph::from_parts(base.clone(), ids, labels, edge_set, 0).expect("valid")
}

fn one_letter_lifting(cfg: &RunConfig) -> CriterionReport {
    let mut r = CriterionReport::new(6, "1-letter non-universality lifts to powers");
    let base = sig(&["a"], &["f"]);
    // every NFA with at most 4 states, root 0
    let mut spaces = Vec::new();
    for n in 1..=4usize {
        spaces.push((n, 1u64 << (n * n), 1u64 << n));
    }
    let total: u64 = spaces.iter().map(|(_, e, a)| e * a).sum();
    const BATCH: u64 = 4096;
    let batches = total.div_ceil(BATCH) as usize;
    let budget = cfg.step_budget;
    let results = par_map(batches, |b| {
        let mut members = 0usize;
        let mut cases = 0usize;
        let mut errors = Vec::new();
        let lo = b as u64 * BATCH;
        for idx in lo..(lo + BATCH).min(total) {
            let mut rest = idx;
            let mut which = 0;
            while rest >= spaces[which].1 * spaces[which].2 {
                rest -= spaces[which].1 * spaces[which].2;
                which += 1;
            }
            let (n, _, accs) = spaces[which];
            let (edges, acc) = ((rest / accs) as u32, (rest % accs) as u32);
            let g = nfa_from_masks(&base, n, edges, acc);
            let verdict = match one_letter_with_budget(&g, budget) {
                Ok(v) => v,
                Err(e) => {
                    errors.push(format!("n={n} edges={edges:#b} acc={acc:#b}: {e}"));
                    continue;
                }
            };
            members += verdict.member as usize;
            for d in 1..=2 {
                cases += 1;
                let p = power(&g, d).expect("d >= 1");
                let ok = match one_lifted_with_budget(&p, d, budget) {
                    Ok(l) if l.member != verdict.member => false,
                    // the lifted witness must also be a witness for G
                    Ok(l) => match l.witness {
                        Some(Witness::Length(m)) => {
                            reach_by_squaring(&g, m).iter().all(|&v| !g.has_color(v, 0))
                                && lifted_length_rejected(&p, d, m).unwrap_or(false)
                        }
                        _ => true,
                    },
                    Err(_) => false,
                };
                if !ok {
                    errors.push(format!("n={n} edges={edges:#b} acc={acc:#b} d={d}"));
                }
            }
        }
        (cases, members, errors)
    });
    let mut members = 0;
    let mut bases = 0;
    for (cases, m, errors) in results {
        r.cases += cases;
        bases += cases / 2;
        members += m;
        for e in errors {
            r.fail(e);
        }
    }
    let share = |x: usize| x as f64 / bases.max(1) as f64;
    if share(members) < 0.1 || share(bases - members) < 0.1 {
        r.fail(format!(
            "unbalanced corpus: {members} members out of {bases} NFAs"
        ));
    }
    r.notes = format!("{bases} NFAs, {members} members");
    r
}

fn two_letter_lifting(cfg: &RunConfig) -> CriterionReport {
    let mut r = CriterionReport::new(7, "2-letter non-universality lifts to powers");
    let base = sig(&["a", "b"], &["f"]);
    let budget = cfg.step_budget;
    let n = cfg.samples(300);
    let outcomes = par_map(n, |k| {
        let mut rng = cfg.rng(7, k);
        let g = random_small_graph(&mut rng, &base, 3);
        let verdict = two_letter_with_budget(&g, budget).map_err(|e| e.to_string())?;
        let mut bad = Vec::new();
        for d in 1..=2 {
            let p = power(&g, d).expect("d >= 1");
            match two_lifted_with_budget(&p, d, budget) {
                Ok(l) if l.member == verdict.member => {}
                other => bad.push(format!("d={d}: base {verdict:?} lifted {other:?}")),
            }
            if let Some(Witness::Word(w)) = &verdict.witness {
                if !lifted_word_rejected(&p, d, w).unwrap_or(false) {
                    bad.push(format!("d={d}: base witness {w:?} accepted by the power"));
                }
            }
        }
        Ok::<_, String>((verdict.member, bad))
    });
    let mut members = 0;
    for (k, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok((m, bad)) => {
                members += m as usize;
                for _ in 0..2 {
                    r.cases += 1;
                }
                for b in bad {
                    r.fail(format!("sample {k}: {b}"));
                }
            }
            Err(e) => r.check(false, || format!("sample {k}: {e}")),
        }
    }
    r.notes = format!("{members}/{n} members");
    r
}

fn squaring(cfg: &RunConfig) -> CriterionReport {
    let mut r = CriterionReport::new(8, "iterated squaring matches breadth-first levels");
    let base = sig(&["a"], &["f"]);
    for k in 0..cfg.samples(100) {
        let mut rng = cfg.rng(8, k);
        let size = rng.gen_range(1..=8);
        let g = random_graph(&mut rng, &base, size, [0.15, 0.3][k % 2]);
        let mut level = BTreeSet::from([g.root()]);
        let mut ok = true;
        for step in 0..=64 {
            let fast: BTreeSet<usize> = reach_by_squaring(&g, step).into_iter().collect();
            if fast != level {
                ok = false;
                break;
            }
            level = level.iter().flat_map(|&v| g.successors(v, 0).to_vec()).collect();
        }
        r.check(ok, || format!("sample {k}"));
    }
    r
}

fn apt_vs_eval(cfg: &RunConfig) -> CriterionReport {
    let mut r = CriterionReport::new(9, "automaton acceptance matches evaluation");
    let base = sig(&["a", "b"], &["f", "g"]);
    let outcomes = par_map(cfg.samples(500), |k| {
        let mut rng = cfg.rng(9, k);
        let g = random_small_graph(&mut rng, &base, 5);
        let shape = FormulaShape {
            arity: 1,
            rooted: false,
            replace: false,
            no_reset_box: false,
        };
        let size = rng.gen_range(1..=10);
        let f = FormulaGen::new(&base, shape).generate(&mut rng, size);
        let apt = formula_to_apt(&f, &base).map_err(|e| e.to_string())?;
        let game = build_acceptance_game(&apt, &g).map_err(|e| e.to_string())?;
        let sol = solve_parity(&game);
        let strategies = verify_strategy(&game, &sol, Player::Exists)
            && verify_strategy(&game, &sol, Player::Forall);
        let accepted = accepts(&apt, &g).map_err(|e| e.to_string())?;
        let truth = models(&g, &f, 1).map_err(|e| e.to_string())?;
        Ok::<_, String>((accepted, truth, strategies, f))
    });
    let mut truths = 0;
    for (k, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok((accepted, truth, strategies, f)) => {
                truths += truth as usize;
                r.check(accepted == truth && strategies, || {
                    format!("sample {k}: {f} accepts={accepted} models={truth} strategies ok={strategies}")
                })
            }
            Err(e) => r.check(false, || format!("sample {k}: {e}")),
        }
    }
    r.notes = format!("{truths} true, {} false", r.cases - truths);
    r
}

fn pumping(cfg: &RunConfig) -> CriterionReport {
    let mut r = CriterionReport::new(10, "pumping between equal winning sets keeps acceptance");
    let base = sig(&["a", "b"], &["f"]);
    let wanted = cfg.samples(50);
    let mut found = 0;
    let mut attempt = 0;
    let limit = wanted * 400;
    while found < wanted && attempt < limit {
        let mut rng = cfg.rng(10, attempt);
        attempt += 1;
        let shape = FormulaShape {
            arity: 1,
            rooted: false,
            replace: false,
            no_reset_box: false,
        };
        let size = rng.gen_range(2..=7);
        let f = FormulaGen::new(&base, shape).generate(&mut rng, size);
        let Ok(apt) = formula_to_apt(&f, &base) else { continue };
        let q = apt.num_states();
        if q > 6 {
            continue;
        }
        let bound = (1usize << q) + 1;
        let spine = bound + rng.gen_range(1..=6);
        let tree = random_spine_tree(&mut rng, &base, spine);
        if !accepts(&apt, tree.graph()).unwrap_or(false) {
            continue;
        }
        found += 1;
        let leaf = tree.graph().node_index(&format!("s{spine}")).expect("spine leaf");
        let path = tree.path_to(leaf);
        let (i, j) = match find_pumping_pair(&apt, &tree, &path) {
            Ok(p) => p,
            Err(e) => {
                r.check(false, || format!("{f}: no pair ({e})"));
                continue;
            }
        };
        r.check(1 <= i && i < j && j <= bound, || format!("{f}: pair ({i},{j}) out of bound {bound}"));
        for k in [0, 2, 3] {
            let ok = pump(&tree, &path, i, j, k)
                .map(|t| accepts(&apt, t.graph()).unwrap_or(false))
                .unwrap_or(false);
            r.check(ok, || format!("{f}: pumping ({i},{j}) with k={k} loses acceptance"));
        }
        let same = pump(&tree, &path, i, j, 1)
            .map(|t| t.canonical_form() == tree.canonical_form())
            .unwrap_or(false);
        r.check(same, || format!("{f}: k=1 changes the tree"));
    }
    if found < wanted {
        r.fail(format!("only {found} accepted trees in {attempt} attempts"));
    }
    r.notes = format!("{found} trees from {attempt} attempts");
    r
}

fn relative_regularity(cfg: &RunConfig) -> CriterionReport {
    let mut r = CriterionReport::new(11, "reachability formula decides L_uni on word trees");
    let base = sig(&["a", "b"], &["f"]);
    let reach = reach_formula(&base, "f");
    let mut hits = 0;
    for k in 0..cfg.samples(50) {
        let mut rng = cfg.rng(11, k);
        let depth = rng.gen_range(0..=8);
        let branching = rng.gen_range(1..=3);
        let p = rng.gen_range(0.0..0.3);
        let word: Vec<Letter> = (0..=depth)
            .map(|_| {
                let colors: Vec<&str> = if rng.gen_bool(p) { vec!["f"] } else { vec![] };
                Letter::new(colors, ["a", "b"].choose(&mut rng).unwrap())
            })
            .collect();
        let tree = match gen_rword_tree(&base, &word, branching, depth) {
            Ok(t) => t,
            Err(e) => {
                r.check(false, || format!("sample {k}: {e}"));
                continue;
            }
        };
        let luni = check_luni(&tree, "f").is_some();
        hits += luni as usize;
        let truth = models(tree.graph(), &reach, 1);
        r.check(matches!(truth, Ok(t) if t == luni), || {
            format!("sample {k}: models={truth:?} luni={luni}")
        });
    }
    r.notes = format!("{hits} in L_uni, {} outside", r.cases - hits);
    r
}

fn bisim_invariance(cfg: &RunConfig) -> CriterionReport {
    let mut r = CriterionReport::new(12, "truth is invariant under bisimulation quotient");
    let corpus = formula_corpus(cfg);
    let outcomes = par_map(corpus.len(), |k| {
        let c = &corpus[k];
        let q = quotient(&c.graph);
        let a = models(&c.graph, &c.formula, c.d + 1).map_err(|e| e.to_string())?;
        let b = models(&q, &c.formula, c.d + 1).map_err(|e| e.to_string())?;
        Ok::<_, String>((a, b))
    });
    let mut shrunk = 0;
    for (k, o) in outcomes.into_iter().enumerate() {
        if quotient(&corpus[k].graph).num_nodes() < corpus[k].graph.num_nodes() {
            shrunk += 1;
        }
        r.check(matches!(o, Ok((a, b)) if a == b), || {
            format!("sample {k}: {} gives {o:?}", corpus[k].formula)
        });
    }
    r.notes = format!("{shrunk} graphs shrink under the quotient");
    r
}
