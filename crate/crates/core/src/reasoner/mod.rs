//! Query answering under open-world (classical entailment) and closed-world
//! (least fixpoint with negation as failure) semantics.

mod datalog;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Problem;
use crate::entailment::entails;
use crate::fol::{Atom, Formula, FormulaSet, FragmentError};
use crate::lp::LPStatement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonerError {
    #[error(transparent)]
    Fragment(#[from] FragmentError),
    #[error("query `{0}` is not a ground literal")]
    NotGround(String),
    #[error("program is not stratified: `{0}` depends negatively on itself")]
    Stratification(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Open,
    Closed,
}

impl std::fmt::Display for Semantics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Semantics::Open => "open",
            Semantics::Closed => "closed",
        })
    }
}

impl std::str::FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "open" => Ok(Semantics::Open),
            "closed" => Ok(Semantics::Closed),
            other => Err(format!(
                "unknown semantics `{other}` (expected open or closed)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Entailed,
    NotEntailed,
    /// The queried atom is in the least fixpoint.
    Derived,
    NotDerived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub answer: bool,
    pub semantics: Semantics,
    pub provenance: Provenance,
}

fn ground_query(query: &Formula) -> Result<(bool, String, String), ReasonerError> {
    match query {
        Formula::GroundLiteral(l) => match &l.atom {
            Atom::Pred { predicate, arg } if !arg.is_var() => {
                Ok((l.positive, predicate.clone(), arg.name().to_string()))
            }
            _ => Err(ReasonerError::NotGround(query.to_string())),
        },
        _ => Err(ReasonerError::NotGround(query.to_string())),
    }
}

/// True iff `axioms` entail the query.
pub fn answer_open_world(axioms: &FormulaSet, query: &Formula) -> Result<Verdict, ReasonerError> {
    ground_query(query)?;
    let e = entails(axioms, query)?;
    Ok(Verdict {
        answer: e.is_entailed(),
        semantics: Semantics::Open,
        provenance: if e.is_entailed() {
            Provenance::Entailed
        } else {
            Provenance::NotEntailed
        },
    })
}

/// Evaluate the query against the least fixpoint of `program`.
pub fn answer_closed_world(
    program: &[LPStatement],
    query: &Formula,
) -> Result<Verdict, ReasonerError> {
    let (positive, predicate, constant) = ground_query(query)?;
    let facts = datalog::fixpoint(program, std::slice::from_ref(&constant))?;
    let derived = facts.contains(&(predicate, vec![constant]));
    Ok(Verdict {
        answer: derived == positive,
        semantics: Semantics::Closed,
        provenance: if derived {
            Provenance::Derived
        } else {
            Provenance::NotDerived
        },
    })
}

/// Answer under either semantics. Closed-world evaluation runs the formulas
/// as a logic program.
pub fn answer(
    axioms: &FormulaSet,
    query: &Formula,
    semantics: Semantics,
) -> Result<Verdict, ReasonerError> {
    match semantics {
        Semantics::Open => answer_open_world(axioms, query),
        Semantics::Closed => {
            let program = crate::lp::program_from_formulas(axioms.iter());
            answer_closed_world(&program, query)
        }
    }
}

/// The correct answer of a problem: open-world entailment from its gold axioms.
pub fn evaluate_gold(problem: &Problem) -> Result<bool, ReasonerError> {
    Ok(answer_open_world(&problem.gold_ax, &problem.query)?.answer)
}
