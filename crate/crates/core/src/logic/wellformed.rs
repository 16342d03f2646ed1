use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::Formula;
use crate::graph::Signature;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("arity must be at least 1")]
    ZeroArity,
    #[error("unknown color '{0}'")]
    UnknownColor(String),
    #[error("unknown action '{0}'")]
    UnknownAction(String),
    #[error("index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("replacement {map:?} is not a map [{arity}] -> [{arity}]")]
    BadReplace { map: Vec<usize>, arity: usize },
    #[error("variable {0} is bound more than once")]
    Rebound(String),
    #[error("variable {0} occurs under an odd number of negations")]
    NegativeOccurrence(String),
}

/// Checks signature membership, index ranges, unique binders and positivity.
pub fn check(f: &Formula, sig: &Signature, arity: usize) -> Result<(), FormulaError> {
    if arity == 0 {
        return Err(FormulaError::ZeroArity);
    }
    let mut binders = BTreeSet::new();
    let mut scope = HashMap::new();
    walk(f, sig, arity, 0, &mut binders, &mut scope)
}

fn walk(
    f: &Formula,
    sig: &Signature,
    arity: usize,
    negations: usize,
    binders: &mut BTreeSet<String>,
    scope: &mut HashMap<String, usize>,
) -> Result<(), FormulaError> {
    let in_range = |index: usize| {
        if index < arity {
            Ok(())
        } else {
            Err(FormulaError::IndexOutOfRange { index, arity })
        }
    };
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Color { color, index } => {
            if sig.color_index(color).is_none() {
                return Err(FormulaError::UnknownColor(color.clone()));
            }
            in_range(*index)
        }
        Formula::Var(x) => match scope.get(x) {
            Some(&at_binder) if (negations - at_binder) % 2 == 1 => {
                Err(FormulaError::NegativeOccurrence(x.clone()))
            }
            _ => Ok(()),
        },
        Formula::Not(g) => walk(g, sig, arity, negations + 1, binders, scope),
        Formula::And(g, h) | Formula::Or(g, h) => {
            walk(g, sig, arity, negations, binders, scope)?;
            walk(h, sig, arity, negations, binders, scope)
        }
        Formula::Diamond { action, index, body } | Formula::Box { action, index, body } => {
            if sig.action_index(action).is_none() {
                return Err(FormulaError::UnknownAction(action.clone()));
            }
            in_range(*index)?;
            walk(body, sig, arity, negations, binders, scope)
        }
        Formula::Mu { var, body } | Formula::Nu { var, body } => {
            if !binders.insert(var.clone()) {
                return Err(FormulaError::Rebound(var.clone()));
            }
            scope.insert(var.clone(), negations);
            let r = walk(body, sig, arity, negations, binders, scope);
            scope.remove(var);
            r
        }
        Formula::Replace { map, body } => {
            if map.len() != arity || map.iter().any(|&k| k >= arity) {
                return Err(FormulaError::BadReplace {
                    map: map.clone(),
                    arity,
                });
            }
            walk(body, sig, arity, negations, binders, scope)
        }
    }
}

/// Variables with an occurrence outside any binder of the same name.
pub fn free_variables(f: &Formula) -> BTreeSet<String> {
    fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match f {
            Formula::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Formula::Mu { var, body } | Formula::Nu { var, body } => {
                bound.push(var.clone());
                go(body, bound, out);
                bound.pop();
            }
            _ => {
                for c in f.children() {
                    go(c, bound, out);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["a"], ["f"]).unwrap()
    }

    #[test]
    fn accepts_positive_formula() {
        let f = Formula::mu("X", Formula::or(Formula::color("f", 0), Formula::diamond("a", 1, Formula::var("X"))));
        assert_eq!(check(&f, &sig(), 2), Ok(()));
        assert!(free_variables(&f).is_empty());
    }

    #[test]
    fn rejects_bad_index_and_names() {
        assert_eq!(
            check(&Formula::color("f", 2), &sig(), 2),
            Err(FormulaError::IndexOutOfRange { index: 2, arity: 2 })
        );
        assert!(matches!(check(&Formula::color("g", 0), &sig(), 1), Err(FormulaError::UnknownColor(_))));
        assert!(matches!(
            check(&Formula::diamond("b", 0, Formula::True), &sig(), 1),
            Err(FormulaError::UnknownAction(_))
        ));
        assert!(matches!(
            check(&Formula::replace(vec![0], Formula::True), &sig(), 2),
            Err(FormulaError::BadReplace { .. })
        ));
    }

    #[test]
    fn rejects_rebinding_and_negative_occurrences() {
        let twice = Formula::and(Formula::mu("X", Formula::var("X")), Formula::nu("X", Formula::var("X")));
        assert_eq!(check(&twice, &sig(), 1), Err(FormulaError::Rebound("X".into())));
        let neg = Formula::mu("X", Formula::not(Formula::var("X")));
        assert_eq!(check(&neg, &sig(), 1), Err(FormulaError::NegativeOccurrence("X".into())));
        let double = Formula::mu("X", Formula::not(Formula::not(Formula::var("X"))));
        assert_eq!(check(&double, &sig(), 1), Ok(()));
        // negation outside the binder does not count
        let outer = Formula::not(Formula::mu("X", Formula::var("X")));
        assert_eq!(check(&outer, &sig(), 1), Ok(()));
    }

    #[test]
    fn free_variables_found() {
        let f = Formula::and(Formula::var("Y"), Formula::mu("X", Formula::var("X")));
        assert_eq!(free_variables(&f).into_iter().collect::<Vec<_>>(), ["Y"]);
    }
}
