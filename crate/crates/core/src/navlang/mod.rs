//! A navigational language over labeled graphs. An expression evaluated from
//! a seed node yields a region (a subgraph) and a set of selected nodes.

mod ast;
mod automaton;
mod eval;
mod parser;

pub use ast::{NavExpression, MAX_REPEAT};
pub use automaton::{compile, Automaton, Guard, StateId, Transition};
pub use eval::{evaluate, region_and_map, RegionResult, Semantics, Zoom};
pub use parser::parse;
