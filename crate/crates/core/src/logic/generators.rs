//! Formulas characterizing d-bisimilarity and the power-graph conditions.
//!
//! All generated formulas have arity 2 and live over the `d`-lifted
//! signature. Every fixpoint gets a fresh variable so that repeated
//! subformulas still bind each variable exactly once.

use std::collections::BTreeSet;

use super::Formula;
use crate::graph::{lifted_name, reset_name, Signature};

/// Hands out variable names `X0`, `X1`, … that avoid a given set.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    next: usize,
    taken: BTreeSet<String>,
}

impl NameSupply {
    pub fn new() -> Self {
        Self::default()
    }

    /// A supply that never returns a variable occurring in `f`.
    pub fn avoiding(f: &Formula) -> Self {
        let mut taken = BTreeSet::new();
        collect_vars(f, &mut taken);
        NameSupply { next: 0, taken }
    }

    pub fn fresh(&mut self) -> String {
        loop {
            let name = format!("X{}", self.next);
            self.next += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }

    fn reserve(&mut self, f: &Formula) {
        collect_vars(f, &mut self.taken);
    }
}

fn collect_vars(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Var(x) => {
            out.insert(x.clone());
        }
        Formula::Mu { var, .. } | Formula::Nu { var, .. } => {
            out.insert(var.clone());
        }
        _ => {}
    }
    for c in f.children() {
        collect_vars(c, out);
    }
}

/// `νX. ⋀_c ((c@i)@0 ↔ (c@j)@1) ∧ ⋀_a ([a@i]@0 <a@j>@1 X ∧ [a@j]@1 <a@i>@0 X)`
pub fn gen_bisim_formula(
    i: usize,
    j: usize,
    base: &Signature,
    names: &mut NameSupply,
) -> Formula {
    let x = names.fresh();
    let colors = base.colors().iter().map(|c| {
        Formula::iff(
            Formula::color(lifted_name(c, i), 0),
            Formula::color(lifted_name(c, j), 1),
        )
    });
    let moves = base.actions().iter().map(|a| {
        let (ai, aj) = (lifted_name(a, i), lifted_name(a, j));
        Formula::and(
            Formula::boxed(ai.clone(), 0, Formula::diamond(aj.clone(), 1, Formula::var(&x))),
            Formula::boxed(aj, 1, Formula::diamond(ai, 0, Formula::var(&x))),
        )
    });
    Formula::nu(
        x.clone(),
        Formula::and(Formula::conj(colors), Formula::conj(moves)),
    )
}

fn all_box(i: usize, f: Formula, base: &Signature, d: usize, resets: bool, names: &mut NameSupply) -> Formula {
    names.reserve(&f);
    let y = names.fresh();
    let mut boxes = Vec::new();
    for a in base.actions() {
        for j in 0..d {
            boxes.push(Formula::boxed(lifted_name(a, j), i, Formula::var(&y)));
        }
    }
    if resets {
        for j in 0..d {
            boxes.push(Formula::boxed(reset_name(j), i, Formula::var(&y)));
        }
    }
    Formula::nu(y, Formula::and(f, Formula::conj(boxes)))
}

/// `νY. φ ∧ ⋀_a ⋀_j [a@j]@i Y`: `φ` holds wherever component `i` can move
/// along non-reset edges.
pub fn gen_allbox(i: usize, f: Formula, base: &Signature, d: usize, names: &mut NameSupply) -> Formula {
    all_box(i, f, base, d, false, names)
}

/// Like [`gen_allbox`] but also following `rst@j` edges, so that `φ` holds
/// at every node reachable from the current one.
pub fn gen_reach_allbox(
    i: usize,
    f: Formula,
    base: &Signature,
    d: usize,
    names: &mut NameSupply,
) -> Formula {
    all_box(i, f, base, d, true, names)
}

/// Persistence: for reachable pairs, `≈_jj` survives every `a@i` and `rst@i`
/// move of the left component (`j ≠ i`).
pub fn gen_per(base: &Signature, d: usize, names: &mut NameSupply) -> Formula {
    let mut parts = Vec::new();
    for i in 0..d {
        for j in (0..d).filter(|&j| j != i) {
            let premise = gen_bisim_formula(j, j, base, names);
            let mut moves = Vec::new();
            for a in base.actions() {
                moves.push(Formula::boxed(
                    lifted_name(a, i),
                    0,
                    gen_bisim_formula(j, j, base, names),
                ));
            }
            moves.push(Formula::boxed(
                reset_name(i),
                0,
                gen_bisim_formula(j, j, base, names),
            ));
            parts.push(Formula::implies(premise, Formula::conj(moves)));
        }
    }
    let inner = gen_reach_allbox(1, Formula::conj(parts), base, d, names);
    gen_reach_allbox(0, inner, base, d, names)
}

/// Reset property: every reachable `rst@i` target is `≈_ii` to the root.
pub fn gen_rst(base: &Signature, d: usize, names: &mut NameSupply) -> Formula {
    let parts: Vec<Formula> = (0..d)
        .map(|i| Formula::boxed(reset_name(i), 0, gen_bisim_formula(i, i, base, names)))
        .collect();
    gen_reach_allbox(0, Formula::conj(parts), base, d, names)
}

/// Power condition: the evaluated pair is `≈_ij`-related for all `i, j`.
pub fn gen_pow(base: &Signature, d: usize, names: &mut NameSupply) -> Formula {
    let mut parts = Vec::new();
    for i in 0..d {
        for j in 0..d {
            parts.push(gen_bisim_formula(i, j, base, names));
        }
    }
    Formula::conj(parts)
}
