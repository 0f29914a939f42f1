use thiserror::Error;

use crate::fol::{Atom, Formula, FragmentError, Literal, DEFAULT_VAR};

use super::{LPStatement, LpAtom, LpLiteral, StatementKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("queries are not axioms")]
    Query,
    #[error("statement has {0} distinct variables; at most one is supported")]
    TooManyVariables(usize),
    #[error("predicate `{name}` has arity {arity}; only unary predicates are supported")]
    Arity { name: String, arity: usize },
    #[error("query `{0}` is not ground")]
    UnboundQuery(String),
    #[error("not a query")]
    NotQuery,
    #[error(transparent)]
    Fragment(#[from] FragmentError),
}

fn literal(lit: &LpLiteral) -> Result<Literal, TranslateError> {
    let atom = match &lit.atom {
        LpAtom::Pred { name, args } if args.len() == 1 => Atom::pred(name.clone(), args[0].clone()),
        LpAtom::Pred { name, args } => {
            return Err(TranslateError::Arity {
                name: name.clone(),
                arity: args.len(),
            })
        }
        LpAtom::Eq(l, r) => Atom::eq(l.clone(), r.clone()),
    };
    Ok(Literal {
        positive: lit.positive,
        atom,
    })
}

/// Translate a fact or rule to FOL. `\+` is read as classical negation.
pub fn lp_to_fof(st: &LPStatement) -> Result<Formula, TranslateError> {
    if st.is_query() {
        return Err(TranslateError::Query);
    }
    let vars = st.variables();
    if vars.len() > 1 {
        return Err(TranslateError::TooManyVariables(vars.len()));
    }
    let head = literal(&st.head)?;
    let formula = match (st.kind, vars.first()) {
        (StatementKind::Fact, None) => Formula::ground(head),
        (StatementKind::Fact, Some(v)) => Formula::fact(*v, head),
        (_, var) => {
            let body = st.body.iter().map(literal).collect::<Result<Vec<_>, _>>()?;
            Formula::implication(var.copied().unwrap_or(DEFAULT_VAR), body, head)
        }
    };
    formula.check_fragment()?;
    Ok(formula)
}

/// The ground literal asked by a `?-` statement.
pub fn query_literal(st: &LPStatement) -> Result<Formula, TranslateError> {
    if !st.is_query() {
        return Err(TranslateError::NotQuery);
    }
    if !st.variables().is_empty() {
        return Err(TranslateError::UnboundQuery(st.to_string()));
    }
    let f = Formula::ground(literal(&st.head)?);
    f.check_fragment()?;
    Ok(f)
}

fn lp_literal(lit: &Literal) -> LpLiteral {
    let atom = match &lit.atom {
        Atom::Pred { predicate, arg } => LpAtom::unary(predicate.clone(), arg.clone()),
        Atom::Eq { left, right } => LpAtom::Eq(left.clone(), right.clone()),
    };
    LpLiteral {
        positive: lit.positive,
        atom,
    }
}

impl LPStatement {
    /// Inverse of [`lp_to_fof`]: render a formula as a fact or rule.
    pub fn from_formula(f: &Formula, line: usize) -> LPStatement {
        let (kind, head, body) = match f {
            Formula::GroundLiteral(l) | Formula::UnivFact { literal: l, .. } => {
                (StatementKind::Fact, lp_literal(l), Vec::new())
            }
            Formula::UnivImplication {
                antecedent,
                consequent,
                ..
            } => (
                StatementKind::Rule,
                lp_literal(consequent),
                antecedent.iter().map(lp_literal).collect(),
            ),
        };
        let mut st = LPStatement {
            kind,
            head,
            body,
            raw_text: String::new(),
            line,
        };
        st.raw_text = st.to_string();
        st
    }

    /// A `?-` statement for a ground literal.
    pub fn query_for(f: &Formula, line: usize) -> Option<LPStatement> {
        match f {
            Formula::GroundLiteral(l) => {
                let mut st = LPStatement {
                    kind: StatementKind::Query,
                    head: lp_literal(l),
                    body: Vec::new(),
                    raw_text: String::new(),
                    line,
                };
                st.raw_text = st.to_string();
                Some(st)
            }
            _ => None,
        }
    }
}

/// A logic program for a formula set, one statement per formula.
pub fn program_from_formulas<'a>(
    formulas: impl IntoIterator<Item = &'a Formula>,
) -> Vec<LPStatement> {
    formulas
        .into_iter()
        .enumerate()
        .map(|(i, f)| LPStatement::from_formula(f, i + 1))
        .collect()
}
