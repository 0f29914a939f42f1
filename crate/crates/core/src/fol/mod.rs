//! Monadic first-order formulas with equality, in the shapes produced by the
//! controlled-English grammar and the logic-program translator.
//!
//! Every formula is one of
//!
//! * a ground literal, `integer(wren)` or `~ fruity(wren)`,
//! * a universally quantified literal, `! [X] : integer(X)`,
//! * a universally quantified implication from a conjunction of literals to a
//!   single literal, `! [A] : (integer(A) => ~ fruity(A))`.
//!
//! Text encoding is the TPTP FOF subset printed by [`Formula::to_fof_text`]
//! and read back by [`parse_fof_text`].

mod parse;
mod set;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use parse::{parse_fof_text, ParseError};
pub use set::FormulaSet;

/// Canonical bound-variable name when a formula has no variable of its own.
pub const DEFAULT_VAR: &str = "X";

/// A constant or predicate name: `[a-z][a-zA-Z0-9_]*`.
pub fn is_lower_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A variable name: `[A-Z][a-zA-Z0-9_]*`.
pub fn is_upper_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        }
    }

    fn rename(&self, to: &str) -> Term {
        match self {
            Term::Var(_) => Term::Var(to.to_string()),
            c => c.clone(),
        }
    }

    fn substitute(&self, value: &str) -> Term {
        match self {
            Term::Var(_) => Term::Const(value.to_string()),
            c => c.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A unary predicate application or an equality between a variable and a
/// constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Pred { predicate: String, arg: Term },
    Eq { left: Term, right: Term },
}

impl Atom {
    pub fn pred(predicate: impl Into<String>, arg: Term) -> Self {
        Atom::Pred {
            predicate: predicate.into(),
            arg,
        }
    }

    /// Equality is stored variable-first.
    pub fn eq(left: Term, right: Term) -> Self {
        if !left.is_var() && right.is_var() {
            Atom::Eq {
                left: right,
                right: left,
            }
        } else {
            Atom::Eq { left, right }
        }
    }

    pub fn predicate(&self) -> Option<&str> {
        match self {
            Atom::Pred { predicate, .. } => Some(predicate),
            Atom::Eq { .. } => None,
        }
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Pred { arg, .. } => vec![arg],
            Atom::Eq { left, right } => vec![left, right],
        }
    }

    pub fn has_var(&self) -> bool {
        self.terms().iter().any(|t| t.is_var())
    }

    fn map_terms(&self, f: impl Fn(&Term) -> Term) -> Atom {
        match self {
            Atom::Pred { predicate, arg } => Atom::Pred {
                predicate: predicate.clone(),
                arg: f(arg),
            },
            Atom::Eq { left, right } => Atom::eq(f(left), f(right)),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Pred { predicate, arg } => write!(f, "{predicate}({arg})"),
            Atom::Eq { left, right } => write!(f, "({left} = {right})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            positive: true,
            atom,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            positive: false,
            atom,
        }
    }

    /// Shorthand for `[~] predicate(arg)`.
    pub fn new(positive: bool, predicate: impl Into<String>, arg: Term) -> Self {
        Literal {
            positive,
            atom: Atom::pred(predicate, arg),
        }
    }

    pub fn negated(&self) -> Literal {
        Literal {
            positive: !self.positive,
            atom: self.atom.clone(),
        }
    }

    pub fn predicate(&self) -> Option<&str> {
        self.atom.predicate()
    }

    pub fn is_equality(&self) -> bool {
        matches!(self.atom, Atom::Eq { .. })
    }

    pub fn with_predicate(&self, predicate: &str) -> Literal {
        match &self.atom {
            Atom::Pred { arg, .. } => Literal::new(self.positive, predicate, arg.clone()),
            Atom::Eq { .. } => self.clone(),
        }
    }

    pub fn rename_var(&self, to: &str) -> Literal {
        Literal {
            positive: self.positive,
            atom: self.atom.map_terms(|t| t.rename(to)),
        }
    }

    /// Replace the bound variable by a constant.
    pub fn instantiate(&self, value: &str) -> Literal {
        Literal {
            positive: self.positive,
            atom: self.atom.map_terms(|t| t.substitute(value)),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("~ ")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// Why a formula falls outside the supported fragment.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FragmentError {
    #[error("invalid symbol name `{0}`")]
    BadSymbol(String),
    #[error("variable `{found}` is not bound (bound variable is `{bound}`)")]
    FreeVariable { found: String, bound: String },
    #[error("ground literal contains variable `{0}`")]
    VariableInGround(String),
    #[error("implication has an empty antecedent")]
    EmptyAntecedent,
    #[error("equality `{0}` must be a positive antecedent literal relating the bound variable to a constant")]
    Equality(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    GroundLiteral(Literal),
    UnivFact {
        var: String,
        literal: Literal,
    },
    UnivImplication {
        var: String,
        antecedent: Vec<Literal>,
        consequent: Literal,
    },
}

impl Formula {
    pub fn ground(literal: Literal) -> Self {
        Formula::GroundLiteral(literal)
    }

    pub fn fact(var: impl Into<String>, literal: Literal) -> Self {
        Formula::UnivFact {
            var: var.into(),
            literal,
        }
    }

    pub fn implication(
        var: impl Into<String>,
        antecedent: Vec<Literal>,
        consequent: Literal,
    ) -> Self {
        Formula::UnivImplication {
            var: var.into(),
            antecedent,
            consequent,
        }
    }

    /// `! [var] : (ante(var) => [~] cons(var))` for two unary predicates.
    pub fn rule(var: &str, ante: &str, positive: bool, cons: &str) -> Self {
        Formula::implication(
            var,
            vec![Literal::new(true, ante, Term::var(var))],
            Literal::new(positive, cons, Term::var(var)),
        )
    }

    pub fn to_fof_text(&self) -> String {
        self.to_string()
    }

    pub fn bound_var(&self) -> Option<&str> {
        match self {
            Formula::GroundLiteral(_) => None,
            Formula::UnivFact { var, .. } | Formula::UnivImplication { var, .. } => Some(var),
        }
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Formula::GroundLiteral(_))
    }

    pub fn literals(&self) -> Vec<&Literal> {
        match self {
            Formula::GroundLiteral(l) | Formula::UnivFact { literal: l, .. } => vec![l],
            Formula::UnivImplication {
                antecedent,
                consequent,
                ..
            } => antecedent
                .iter()
                .chain(std::iter::once(consequent))
                .collect(),
        }
    }

    /// All constants mentioned, in order of first occurrence.
    pub fn constants(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for lit in self.literals() {
            for t in lit.atom.terms() {
                if let Some(c) = t.as_const() {
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
        }
        out
    }

    /// All predicate symbols mentioned, in order of first occurrence.
    pub fn predicates(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for lit in self.literals() {
            if let Some(p) = lit.predicate() {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Same formula with the bound variable renamed.
    pub fn rename_var(&self, to: &str) -> Formula {
        match self {
            Formula::GroundLiteral(_) => self.clone(),
            Formula::UnivFact { literal, .. } => Formula::fact(to, literal.rename_var(to)),
            Formula::UnivImplication {
                antecedent,
                consequent,
                ..
            } => Formula::implication(
                to,
                antecedent.iter().map(|l| l.rename_var(to)).collect(),
                consequent.rename_var(to),
            ),
        }
    }

    /// Representative of the alpha-equivalence class.
    pub fn alpha_normal(&self) -> Formula {
        self.rename_var(DEFAULT_VAR)
    }

    pub fn alpha_equal(&self, other: &Formula) -> bool {
        alpha_equal(self, other)
    }

    /// Reject anything outside the monadic-with-equality fragment.
    pub fn check_fragment(&self) -> Result<(), FragmentError> {
        let bound = self.bound_var();
        if let Some(v) = bound {
            if !is_upper_ident(v) {
                return Err(FragmentError::BadSymbol(v.to_string()));
            }
        }
        if let Formula::UnivImplication {
            antecedent,
            consequent,
            ..
        } = self
        {
            if antecedent.is_empty() {
                return Err(FragmentError::EmptyAntecedent);
            }
            if consequent.is_equality() {
                return Err(FragmentError::Equality(consequent.to_string()));
            }
        }
        for lit in self.literals() {
            match &lit.atom {
                Atom::Pred { predicate, .. } if !is_lower_ident(predicate) => {
                    return Err(FragmentError::BadSymbol(predicate.clone()));
                }
                Atom::Eq { left, right } => {
                    let ok = matches!(self, Formula::UnivImplication { .. })
                        && lit.positive
                        && left.is_var()
                        && !right.is_var();
                    if !ok {
                        return Err(FragmentError::Equality(lit.to_string()));
                    }
                }
                _ => {}
            }
            for t in lit.atom.terms() {
                match (t, bound) {
                    (Term::Const(c), _) if !is_lower_ident(c) => {
                        return Err(FragmentError::BadSymbol(c.clone()));
                    }
                    (Term::Var(v), None) => {
                        return Err(FragmentError::VariableInGround(v.clone()));
                    }
                    (Term::Var(v), Some(b)) if v != b => {
                        return Err(FragmentError::FreeVariable {
                            found: v.clone(),
                            bound: b.to_string(),
                        });
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Equality up to renaming of the bound variable.
pub fn alpha_equal(f: &Formula, g: &Formula) -> bool {
    f.alpha_normal() == g.alpha_normal()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::GroundLiteral(l) => write!(f, "{l}"),
            Formula::UnivFact { var, literal } => write!(f, "! [{var}] : {literal}"),
            Formula::UnivImplication {
                var,
                antecedent,
                consequent,
            } => {
                write!(f, "! [{var}] : (")?;
                if antecedent.len() == 1 {
                    write!(f, "{}", antecedent[0])?;
                } else {
                    f.write_str("(")?;
                    for (i, l) in antecedent.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" & ")?;
                        }
                        write!(f, "{l}")?;
                    }
                    f.write_str(")")?;
                }
                write!(f, " => {consequent})")
            }
        }
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_fof_text(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_fof_text())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_fof_text(&text).map_err(serde::de::Error::custom)
    }
}
