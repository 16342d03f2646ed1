use thiserror::Error;

use super::Formula;
use crate::graph::{lifted_name, reset_name, split_lifted};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("formula is not rooted at component {0}")]
    NotRooted(usize),
    #[error("'{0}' is not a lifted name of dimension {1}")]
    NotLifted(String, usize),
    #[error("{0} has no counterpart in the polyadic formula")]
    Unsupported(&'static str),
}

/// Whether `map` is the identity except for one `j ≠ root` sent to `root`.
fn is_reset_map(map: &[usize], root: usize) -> Option<usize> {
    if map.len() != root + 1 || map[root] != root {
        return None;
    }
    let moved: Vec<usize> = (0..root).filter(|&k| map[k] != k).collect();
    match moved[..] {
        [j] if map[j] == root => Some(j),
        _ => None,
    }
}

/// True iff the last component (index `arity - 1`) is only used through
/// replacements of the form `[j ← root]`.
pub fn check_d_rooted(f: &Formula, arity: usize) -> bool {
    if arity < 2 {
        return false;
    }
    let root = arity - 1;
    fn go(f: &Formula, root: usize) -> bool {
        match f {
            Formula::Color { index, .. } => *index != root,
            Formula::Diamond { index, body, .. } | Formula::Box { index, body, .. } => {
                *index != root && go(body, root)
            }
            Formula::Replace { map, body } => is_reset_map(map, root).is_some() && go(body, root),
            _ => f.children().into_iter().all(|c| go(c, root)),
        }
    }
    go(f, root)
}

/// Turns a rooted formula of arity `d + 1` into an arity-1 formula over the
/// `d`-lifted signature: `c@i` becomes `(c@i)@0`, `<a@i>` becomes `<a@i@0>`
/// and `[j ← d]` becomes `<rst@j>`.
pub fn monofy(f: &Formula, arity: usize) -> Result<Formula, TransformError> {
    if !check_d_rooted(f, arity) {
        return Err(TransformError::NotRooted(arity.saturating_sub(1)));
    }
    Ok(mono(f, arity - 1))
}

fn mono(f: &Formula, root: usize) -> Formula {
    let m = |g: &Formula| Box::new(mono(g, root));
    match f {
        Formula::True | Formula::False | Formula::Var(_) => f.clone(),
        Formula::Color { color, index } => Formula::color(lifted_name(color, *index), 0),
        Formula::Not(g) => Formula::Not(m(g)),
        Formula::And(g, h) => Formula::And(m(g), m(h)),
        Formula::Or(g, h) => Formula::Or(m(g), m(h)),
        Formula::Diamond { action, index, body } => Formula::Diamond {
            action: lifted_name(action, *index),
            index: 0,
            body: m(body),
        },
        Formula::Box { action, index, body } => Formula::Box {
            action: lifted_name(action, *index),
            index: 0,
            body: m(body),
        },
        Formula::Mu { var, body } => Formula::Mu {
            var: var.clone(),
            body: m(body),
        },
        Formula::Nu { var, body } => Formula::Nu {
            var: var.clone(),
            body: m(body),
        },
        Formula::Replace { map, body } => {
            let j = is_reset_map(map, root).expect("checked rooted");
            Formula::Diamond {
                action: reset_name(j),
                index: 0,
                body: m(body),
            }
        }
    }
}

/// Inverse of [`monofy`] for dimension `d`; the result has arity `d + 1`.
pub fn polyfy(f: &Formula, d: usize) -> Result<Formula, TransformError> {
    let split = |name: &str| -> Result<(String, usize), TransformError> {
        match split_lifted(name) {
            Some((base, i)) if i < d => Ok((base.to_string(), i)),
            _ => Err(TransformError::NotLifted(name.to_string(), d)),
        }
    };
    let p = |g: &Formula| polyfy(g, d).map(Box::new);
    Ok(match f {
        Formula::True | Formula::False | Formula::Var(_) => f.clone(),
        Formula::Color { color, index } => {
            if *index != 0 {
                return Err(TransformError::Unsupported("a color at a nonzero index"));
            }
            let (base, i) = split(color)?;
            Formula::color(base, i)
        }
        Formula::Not(g) => Formula::Not(p(g)?),
        Formula::And(g, h) => Formula::And(p(g)?, p(h)?),
        Formula::Or(g, h) => Formula::Or(p(g)?, p(h)?),
        Formula::Diamond { action, index, body } | Formula::Box { action, index, body } => {
            if *index != 0 {
                return Err(TransformError::Unsupported("a modality at a nonzero index"));
            }
            let (base, i) = split(action)?;
            let is_box = matches!(f, Formula::Box { .. });
            if base == "rst" {
                if is_box {
                    return Err(TransformError::Unsupported("a reset box"));
                }
                let mut map: Vec<usize> = (0..=d).collect();
                map[i] = d;
                Formula::Replace { map, body: p(body)? }
            } else if is_box {
                Formula::Box {
                    action: base,
                    index: i,
                    body: p(body)?,
                }
            } else {
                Formula::Diamond {
                    action: base,
                    index: i,
                    body: p(body)?,
                }
            }
        }
        Formula::Mu { var, body } => Formula::Mu {
            var: var.clone(),
            body: p(body)?,
        },
        Formula::Nu { var, body } => Formula::Nu {
            var: var.clone(),
            body: p(body)?,
        },
        Formula::Replace { .. } => return Err(TransformError::Unsupported("a replacement")),
    })
}
