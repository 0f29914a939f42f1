//! Decision procedure for the monadic fragment with equality.
//!
//! Everything is grounded over the constants of the task plus a fresh
//! constant, then handed to a small DPLL solver. Equalities between constants
//! are decided syntactically during grounding.

mod dpll;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::fol::{Atom, Formula, FormulaSet, FragmentError, Literal};

use dpll::{solve, Clause, Lit};

/// A candidate entailment `axioms |= goal`.
#[derive(Debug, Clone)]
pub struct EntailmentTask {
    pub axioms: FormulaSet,
    pub goal: Formula,
}

impl EntailmentTask {
    pub fn new(axioms: FormulaSet, goal: Formula) -> Self {
        EntailmentTask { axioms, goal }
    }

    pub fn decide(&self) -> Result<Entailment, FragmentError> {
        entails(&self.axioms, &self.goal)
    }

    /// The task as a TPTP problem, for cross-checking with an external prover.
    pub fn to_tptp(&self) -> String {
        let mut out = String::new();
        for (i, f) in self.axioms.iter().enumerate() {
            let _ = writeln!(out, "fof(ax{}, axiom, {}).", i + 1, f);
        }
        let _ = writeln!(out, "fof(goal, conjecture, {}).", self.goal);
        out
    }
}

/// A Herbrand interpretation over a finite domain of constants.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundModel {
    pub domain: Vec<String>,
    /// predicate -> constant -> truth value
    pub truth: BTreeMap<String, BTreeMap<String, bool>>,
}

impl GroundModel {
    pub fn value(&self, predicate: &str, constant: &str) -> bool {
        self.truth
            .get(predicate)
            .and_then(|m| m.get(constant))
            .copied()
            .unwrap_or(false)
    }

    fn literal_holds(&self, lit: &Literal) -> bool {
        let v = match &lit.atom {
            Atom::Pred { predicate, arg } => self.value(predicate, arg.name()),
            Atom::Eq { left, right } => left.name() == right.name(),
        };
        v == lit.positive
    }

    /// Evaluate a formula, quantifying over `domain`.
    pub fn satisfies(&self, f: &Formula) -> bool {
        match f {
            Formula::GroundLiteral(l) => self.literal_holds(l),
            Formula::UnivFact { literal, .. } => self
                .domain
                .iter()
                .all(|d| self.literal_holds(&literal.instantiate(d))),
            Formula::UnivImplication {
                antecedent,
                consequent,
                ..
            } => self.domain.iter().all(|d| {
                !antecedent
                    .iter()
                    .all(|l| self.literal_holds(&l.instantiate(d)))
                    || self.literal_holds(&consequent.instantiate(d))
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entailment {
    Entailed,
    /// A model of the axioms falsifying the goal.
    NotEntailed(GroundModel),
}

impl Entailment {
    pub fn is_entailed(&self) -> bool {
        matches!(self, Entailment::Entailed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Consistency {
    Consistent(GroundModel),
    Inconsistent,
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::Consistent(_))
    }
}

/// Decide `axioms |= goal`.
pub fn entails(axioms: &FormulaSet, goal: &Formula) -> Result<Entailment, FragmentError> {
    entails_with_fresh(axioms, goal, 1)
}

/// As [`entails`] but with `fresh` anonymous domain elements instead of one.
/// One suffices for this fragment; more are only useful for testing that.
pub fn entails_with_fresh(
    axioms: &FormulaSet,
    goal: &Formula,
    fresh: usize,
) -> Result<Entailment, FragmentError> {
    goal.check_fragment()?;
    let mut g = Grounder::new(axioms.iter().chain(std::iter::once(goal)), fresh)?;
    let base = g.ground_all(axioms.iter());
    let domain = g.domain.clone();
    let instances: Vec<&str> = if goal.bound_var().is_some() {
        domain.iter().map(String::as_str).collect()
    } else {
        vec![domain[0].as_str()]
    };
    for d in instances {
        let Some(units) = g.counterexample_units(goal, d) else {
            continue;
        };
        let mut clauses = base.clone();
        clauses.extend(units.into_iter().map(|l| vec![l]));
        if let Some(assign) = solve(g.atoms.len(), &clauses) {
            return Ok(Entailment::NotEntailed(g.model(&assign)));
        }
    }
    Ok(Entailment::Entailed)
}

pub fn check_consistency(axioms: &FormulaSet) -> Result<Consistency, FragmentError> {
    let mut g = Grounder::new(axioms.iter(), 1)?;
    let clauses = g.ground_all(axioms.iter());
    Ok(match solve(g.atoms.len(), &clauses) {
        Some(assign) => Consistency::Consistent(g.model(&assign)),
        None => Consistency::Inconsistent,
    })
}

/// `true` when `axioms |= goal`. Convenience for callers that already know
/// their input is in the fragment.
pub fn is_entailed(axioms: &FormulaSet, goal: &Formula) -> Result<bool, FragmentError> {
    entails(axioms, goal).map(|e| e.is_entailed())
}

struct Grounder {
    domain: Vec<String>,
    predicates: BTreeSet<String>,
    atoms: Vec<(String, String)>,
    index: HashMap<(String, String), usize>,
}

enum Ground {
    True,
    Lits(Vec<Lit>),
}

impl Grounder {
    fn new<'a>(
        formulas: impl Iterator<Item = &'a Formula>,
        fresh: usize,
    ) -> Result<Self, FragmentError> {
        let mut domain: Vec<String> = Vec::new();
        let mut predicates = BTreeSet::new();
        for f in formulas {
            f.check_fragment()?;
            for c in f.constants() {
                if !domain.iter().any(|d| d == c) {
                    domain.push(c.to_string());
                }
            }
            predicates.extend(f.predicates().into_iter().map(str::to_string));
        }
        let mut n = 0;
        for _ in 0..fresh {
            while domain.iter().any(|d| *d == format!("sk{n}")) {
                n += 1;
            }
            domain.push(format!("sk{n}"));
            n += 1;
        }
        Ok(Grounder {
            domain,
            predicates,
            atoms: Vec::new(),
            index: HashMap::new(),
        })
    }

    fn atom(&mut self, predicate: &str, constant: &str) -> usize {
        let key = (predicate.to_string(), constant.to_string());
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        self.atoms.push(key.clone());
        self.index.insert(key, self.atoms.len() - 1);
        self.atoms.len() - 1
    }

    /// `Some(lit)` for a predicate literal, `Err(value)` for a decided equality.
    fn literal(&mut self, lit: &Literal) -> Result<Lit, bool> {
        match &lit.atom {
            Atom::Pred { predicate, arg } => Ok(Lit {
                var: self.atom(predicate, arg.name()),
                positive: lit.positive,
            }),
            Atom::Eq { left, right } => Err((left.name() == right.name()) == lit.positive),
        }
    }

    /// Clause for `~a1 | ... | ~an | c` at one instance.
    fn implication_clause(&mut self, ante: &[Literal], cons: &Literal, d: &str) -> Ground {
        let mut clause = Vec::new();
        for a in ante {
            match self.literal(&a.instantiate(d)) {
                Ok(l) => clause.push(l.negate()),
                Err(true) => {}
                Err(false) => return Ground::True,
            }
        }
        match self.literal(&cons.instantiate(d)) {
            Ok(l) => clause.push(l),
            Err(true) => return Ground::True,
            Err(false) => {}
        }
        Ground::Lits(clause)
    }

    fn ground_all<'a>(&mut self, formulas: impl Iterator<Item = &'a Formula>) -> Vec<Clause> {
        let mut out = Vec::new();
        let domain = self.domain.clone();
        for f in formulas {
            match f {
                Formula::GroundLiteral(l) => match self.literal(l) {
                    Ok(l) => out.push(vec![l]),
                    Err(true) => {}
                    Err(false) => out.push(Vec::new()),
                },
                Formula::UnivFact { literal, .. } => {
                    for d in &domain {
                        match self.literal(&literal.instantiate(d)) {
                            Ok(l) => out.push(vec![l]),
                            Err(true) => {}
                            Err(false) => out.push(Vec::new()),
                        }
                    }
                }
                Formula::UnivImplication {
                    antecedent,
                    consequent,
                    ..
                } => {
                    for d in &domain {
                        if let Ground::Lits(c) = self.implication_clause(antecedent, consequent, d)
                        {
                            out.push(c);
                        }
                    }
                }
            }
        }
        out
    }

    /// Unit literals asserting that instance `d` of `goal` is false, or
    /// `None` if that instance cannot be false.
    fn counterexample_units(&mut self, goal: &Formula, d: &str) -> Option<Vec<Lit>> {
        let (ante, cons): (&[Literal], &Literal) = match goal {
            Formula::GroundLiteral(l) | Formula::UnivFact { literal: l, .. } => (&[], l),
            Formula::UnivImplication {
                antecedent,
                consequent,
                ..
            } => (antecedent, consequent),
        };
        let mut units = Vec::new();
        for a in ante {
            match self.literal(&a.instantiate(d)) {
                Ok(l) => units.push(l),
                Err(true) => {}
                Err(false) => return None,
            }
        }
        match self.literal(&cons.instantiate(d)) {
            Ok(l) => units.push(l.negate()),
            Err(false) => {}
            Err(true) => return None,
        }
        Some(units)
    }

    fn model(&self, assign: &[bool]) -> GroundModel {
        let mut truth: BTreeMap<String, BTreeMap<String, bool>> = BTreeMap::new();
        for p in &self.predicates {
            let row = truth.entry(p.clone()).or_default();
            for d in &self.domain {
                let v = self
                    .index
                    .get(&(p.clone(), d.clone()))
                    .map(|&i| assign[i])
                    .unwrap_or(false);
                row.insert(d.clone(), v);
            }
        }
        GroundModel {
            domain: self.domain.clone(),
            truth,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(lines: &[&str]) -> FormulaSet {
        lines
            .iter()
            .map(|s| s.parse::<Formula>().unwrap())
            .collect()
    }

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    fn wren() -> FormulaSet {
        set(&[
            "! [A] : (integer(A) => ~ fruity(A))",
            "! [A] : (negative_number(A) => brown(A))",
            "integer(wren)",
        ])
    }

    #[test]
    fn wren_checks() {
        let nl = wren();
        let e = entails(&nl, &f("! [X] : (fruity(X) => integer(X))")).unwrap();
        match e {
            Entailment::NotEntailed(m) => {
                assert!(nl.iter().all(|a| m.satisfies(a)));
                assert!(!m.satisfies(&f("! [X] : (fruity(X) => integer(X))")));
            }
            Entailment::Entailed => panic!("should not be entailed"),
        }
        assert!(is_entailed(&nl, &f("! [X] : (fruity(X) => ~ integer(X))")).unwrap());
        assert!(is_entailed(&nl, &f("~ fruity(wren)")).unwrap());
        assert!(!is_entailed(&nl, &f("! [X] : integer(X)")).unwrap());
        assert!(!is_entailed(&nl, &f("brown(negative)")).unwrap());
    }

    #[test]
    fn tautology_and_empty() {
        assert!(is_entailed(&FormulaSet::new(), &f("! [X] : (p(X) => p(X))")).unwrap());
        assert!(!is_entailed(&FormulaSet::new(), &f("p(a)")).unwrap());
        assert!(check_consistency(&FormulaSet::new())
            .unwrap()
            .is_consistent());
    }

    #[test]
    fn consistency() {
        assert_eq!(
            check_consistency(&set(&["p(a)", "~ p(a)"])).unwrap(),
            Consistency::Inconsistent
        );
        match check_consistency(&wren()).unwrap() {
            Consistency::Consistent(m) => assert!(wren().iter().all(|a| m.satisfies(a))),
            Consistency::Inconsistent => panic!(),
        }
        assert!(is_entailed(&set(&["p(a)", "~ p(a)"]), &f("q(b)")).unwrap());
    }

    #[test]
    fn equality_is_identity() {
        let ax = set(&["! [X] : ((X = tom) => swims(X))"]);
        assert!(is_entailed(&ax, &f("swims(tom)")).unwrap());
        assert!(!is_entailed(&ax, &f("swims(rex)")).unwrap());
        assert!(is_entailed(&set(&["swims(tom)"]), &f("! [X] : ((X = tom) => swims(X))")).unwrap());
        assert!(!is_entailed(&FormulaSet::new(), &f("! [X] : ((X = tom) => swims(X))")).unwrap());
    }

    #[test]
    fn universal_goal_needs_fresh_witness() {
        // p holds of every named constant but not of everything
        let ax = set(&["p(a)", "p(b)"]);
        assert!(!is_entailed(&ax, &f("! [X] : p(X)")).unwrap());
        assert!(is_entailed(&set(&["! [X] : p(X)"]), &f("! [Y] : p(Y)")).unwrap());
    }

    #[test]
    fn chains() {
        let ax = set(&[
            "! [X] : (a(X) => b(X))",
            "! [X] : (b(X) => c(X))",
            "! [X] : ((c(X) & ~ d(X)) => e(X))",
            "a(k)",
        ]);
        assert!(is_entailed(&ax, &f("c(k)")).unwrap());
        assert!(is_entailed(&ax, &f("! [X] : (a(X) => c(X))")).unwrap());
        assert!(!is_entailed(&ax, &f("e(k)")).unwrap());
        assert!(is_entailed(&ax, &f("! [X] : ((a(X) & ~ d(X)) => e(X))")).unwrap());
    }

    #[test]
    fn fragment_errors_propagate() {
        let bad = Formula::implication(
            "X",
            vec![Literal::new(true, "p", crate::fol::Term::var("Y"))],
            Literal::new(true, "q", crate::fol::Term::var("X")),
        );
        assert!(entails(&FormulaSet::new(), &bad).is_err());
        let mut ax = FormulaSet::new();
        ax.insert(bad);
        assert!(check_consistency(&ax).is_err());
    }

    #[test]
    fn tptp_export() {
        let t = EntailmentTask::new(wren(), f("~ fruity(wren)"));
        let text = t.to_tptp();
        assert!(text.starts_with("fof(ax1, axiom, ! [A] : (integer(A) => ~ fruity(A)))."));
        assert!(text.ends_with("fof(goal, conjecture, ~ fruity(wren)).\n"));
        assert!(t.decide().unwrap().is_entailed());
    }
}
