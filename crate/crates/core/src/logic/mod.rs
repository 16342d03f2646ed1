//! Formulas of the polyadic modal μ-calculus.
//!
//! A formula of arity `d` denotes a set of `d`-tuples of nodes. Component
//! indices appear on colors and modalities; `Replace` reindexes the tuple.
//! Derived operators (`ν`, `□`, `∨`, `tt`, `ff`) are kept as constructors.

mod generators;
mod parser;
mod printer;
mod transform;
mod wellformed;

pub use generators::{
    gen_allbox, gen_bisim_formula, gen_per, gen_pow, gen_reach_allbox, gen_rst, NameSupply,
};
pub use parser::{parse, ParseError};
pub use printer::{print, print_raw};
pub use transform::{check_d_rooted, monofy, polyfy, TransformError};
pub use wellformed::{check, free_variables, FormulaError};

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// Color `color` holds at component `index`.
    Color { color: String, index: usize },
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Diamond { action: String, index: usize, body: Box<Formula> },
    Box { action: String, index: usize, body: Box<Formula> },
    Mu { var: String, body: Box<Formula> },
    Nu { var: String, body: Box<Formula> },
    /// Position `i` of `map` holds `σ(i)`; the tuple `(v_σ(0), …)` must satisfy `body`.
    Replace { map: Vec<usize>, body: Box<Formula> },
}

impl Formula {
    pub fn color(color: impl Into<String>, index: usize) -> Self {
        Formula::Color {
            color: color.into(),
            index,
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(f: Formula, g: Formula) -> Self {
        Formula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: Formula, g: Formula) -> Self {
        Formula::Or(Box::new(f), Box::new(g))
    }

    pub fn implies(f: Formula, g: Formula) -> Self {
        Formula::or(Formula::not(f), g)
    }

    /// `(f & g) | (~f & ~g)`
    pub fn iff(f: Formula, g: Formula) -> Self {
        Formula::or(
            Formula::and(f.clone(), g.clone()),
            Formula::and(Formula::not(f), Formula::not(g)),
        )
    }

    pub fn diamond(action: impl Into<String>, index: usize, body: Formula) -> Self {
        Formula::Diamond {
            action: action.into(),
            index,
            body: Box::new(body),
        }
    }

    pub fn boxed(action: impl Into<String>, index: usize, body: Formula) -> Self {
        Formula::Box {
            action: action.into(),
            index,
            body: Box::new(body),
        }
    }

    pub fn mu(var: impl Into<String>, body: Formula) -> Self {
        Formula::Mu {
            var: var.into(),
            body: Box::new(body),
        }
    }

    pub fn nu(var: impl Into<String>, body: Formula) -> Self {
        Formula::Nu {
            var: var.into(),
            body: Box::new(body),
        }
    }

    pub fn replace(map: Vec<usize>, body: Formula) -> Self {
        Formula::Replace {
            map,
            body: Box::new(body),
        }
    }

    /// Left fold with `And`; the empty conjunction is `tt`.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left fold with `Or`; the empty disjunction is `ff`.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Color { .. } | Formula::Var(_) => vec![],
            Formula::Not(f)
            | Formula::Diamond { body: f, .. }
            | Formula::Box { body: f, .. }
            | Formula::Mu { body: f, .. }
            | Formula::Nu { body: f, .. }
            | Formula::Replace { body: f, .. } => vec![f],
            Formula::And(f, g) | Formula::Or(f, g) => vec![f, g],
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&printer::print_raw(self))
    }
}
