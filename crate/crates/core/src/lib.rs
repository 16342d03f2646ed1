//! Polyadic modal μ-calculus over finite labeled graphs: evaluation,
//! products and powers, d-bisimulation, parity tree automata, pumping and
//! the non-universality queries built on them.

pub mod bisim;
pub mod eval;
pub mod graph;
pub mod logic;
pub mod automata;
pub mod pumping;
pub mod queries;
pub mod corpus;
pub mod xcheck;
