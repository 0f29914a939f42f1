//! Checking, classifying and repairing logic-program translations of
//! controlled-English steamroller problems.
//!
//! The pipeline is:
//!
//! * [`cnl`] parses the controlled-English script into ground-truth axioms,
//! * [`lp`] cleans and parses the logic program and translates it to FOL,
//! * [`sedac`] checks each statement against the ground truth with the
//!   [`entailment`] decision procedure and proposes repairs,
//! * [`reasoner`] answers the query under open- or closed-world semantics,
//! * [`metrics`] runs whole evaluation conditions and scores them.

pub mod cnl;
pub mod corpus;
pub mod entailment;
pub mod fol;
pub mod lexicon;
pub mod lp;
pub mod metrics;
pub mod reasoner;
pub mod sedac;

pub use fol::{Atom, Formula, FormulaSet, Literal, Term};
pub use lexicon::{Lexicon, SymbolClass};
