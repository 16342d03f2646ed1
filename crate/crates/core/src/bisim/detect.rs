use std::fmt;

use serde::Serialize;

use super::dbisim::lifted_shape_of;
use super::{has_reset_property, is_persistent, is_power_rooted, largest_d_bisimulation, BisimError};
use crate::eval::Evaluator;
use crate::graph::LabeledGraph;
use crate::logic::{gen_per, gen_pow, gen_rst, NameSupply};

/// The three conditions that together characterize (graphs bisimilar to)
/// `d`-th powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PowerConditions {
    pub persistent: bool,
    pub reset: bool,
    pub power_rooted: bool,
}

impl PowerConditions {
    pub fn is_power(&self) -> bool {
        self.persistent && self.reset && self.power_rooted
    }
}

impl fmt::Display for PowerConditions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "persistent={} reset={} power={}",
            self.persistent, self.reset, self.power_rooted
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerMethod {
    /// Compute the largest d-bisimulation and check the conditions directly.
    DBisim,
    /// Evaluate the characterizing formulas at the root pair.
    Logic,
    /// Run both and fail if they disagree.
    Both,
}

/// Evaluates the three conditions on the part of `g` reachable from the root.
pub fn power_conditions(
    g: &LabeledGraph,
    d: usize,
    method: PowerMethod,
) -> Result<PowerConditions, BisimError> {
    let shape = lifted_shape_of(g)?;
    if shape.d != d {
        return Err(BisimError::NotLifted(format!(
            " of dimension {d} (found dimension {})",
            shape.d
        )));
    }
    let g = g.restrict_to_reachable();
    match method {
        PowerMethod::DBisim => by_dbisim(&g),
        PowerMethod::Logic => by_logic(&g),
        PowerMethod::Both => {
            let (dbisim, logic) = (by_dbisim(&g)?, by_logic(&g)?);
            if dbisim != logic {
                return Err(BisimError::MethodDisagreement { dbisim, logic });
            }
            Ok(dbisim)
        }
    }
}

/// Whether `g` is bisimilar to a `d`-th power.
pub fn detect_power(g: &LabeledGraph, d: usize, method: PowerMethod) -> Result<bool, BisimError> {
    power_conditions(g, d, method).map(|c| c.is_power())
}

fn by_dbisim(g: &LabeledGraph) -> Result<PowerConditions, BisimError> {
    let fam = largest_d_bisimulation(g)?;
    Ok(PowerConditions {
        persistent: is_persistent(g, &fam)?,
        reset: has_reset_property(g, &fam)?,
        power_rooted: is_power_rooted(g, &fam),
    })
}

fn by_logic(g: &LabeledGraph) -> Result<PowerConditions, BisimError> {
    let shape = lifted_shape_of(g)?;
    let (base, d) = (&shape.base, shape.d);
    let eval = Evaluator::new(g, 2);
    let mut names = NameSupply::new();
    Ok(PowerConditions {
        persistent: eval.models(&gen_per(base, d, &mut names))?,
        reset: eval.models(&gen_rst(base, d, &mut names))?,
        power_rooted: eval.models(&gen_pow(base, d, &mut names))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{example_graph, power, product, GraphBuilder, Signature};

    #[test]
    fn square_is_power_by_both_methods() {
        let g2 = power(&example_graph(), 2).unwrap();
        assert!(detect_power(&g2, 2, PowerMethod::Both).unwrap());
        assert!(detect_power(&g2, 2, PowerMethod::Logic).unwrap());
        assert!(matches!(
            detect_power(&g2, 3, PowerMethod::DBisim),
            Err(BisimError::NotLifted(_))
        ));
    }

    #[test]
    fn mixed_product_fails_only_power_condition() {
        let sig = Signature::new(["a"], ["f"]).unwrap();
        let mut b = GraphBuilder::new(sig);
        b.node("s", ["f"]).unwrap();
        b.edge("s", "a", "s").unwrap();
        b.root("s").unwrap();
        let s = b.build().unwrap();
        let p = product(&[&example_graph(), &s]).unwrap();
        let c = power_conditions(&p, 2, PowerMethod::Both).unwrap();
        assert_eq!(
            c,
            PowerConditions {
                persistent: true,
                reset: true,
                power_rooted: false
            }
        );
    }

    #[test]
    fn methods_agree_on_broken_graphs() {
        let sig = Signature::new(["a"], ["f"]).unwrap().lift(2).unwrap();
        let mut b = GraphBuilder::new(sig);
        b.node("x", None::<&str>).unwrap();
        b.node("y", ["f@1"]).unwrap();
        b.node("z", ["f@0"]).unwrap();
        b.edge("x", "a@0", "y").unwrap();
        b.edge("x", "rst@1", "z").unwrap();
        b.root("x").unwrap();
        let g = b.build().unwrap();
        let c = power_conditions(&g, 2, PowerMethod::Both).unwrap();
        assert!(!c.persistent);
    }
}
