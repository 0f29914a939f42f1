use serde::{Deserialize, Serialize};

use crate::fol::{alpha_equal, Atom, Formula, Literal, Term};
use crate::lexicon::{Lexicon, SymbolClass};

/// Bound variable used when a ground literal is lifted to a rule.
pub const LIFT_VAR: &str = "I";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    Rewrite,
    Derivation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proposal {
    pub formula: Formula,
    pub origin: Origin,
}

/// Candidate replacements for one formula, in generation order. Never
/// contains the formula itself or two alpha-equal entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProposalSet {
    proposals: Vec<Proposal>,
}

impl ProposalSet {
    fn push(&mut self, original: &Formula, formula: Formula, origin: Origin) {
        if alpha_equal(original, &formula) || self.contains(&formula) {
            return;
        }
        self.proposals.push(Proposal { formula, origin });
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.proposals.iter().any(|p| alpha_equal(&p.formula, f))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Proposal> {
        self.proposals.iter()
    }

    pub fn len(&self) -> usize {
        self.proposals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proposals.is_empty()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.proposals.iter().map(|p| &p.formula)
    }
}

impl<'a> IntoIterator for &'a ProposalSet {
    type Item = &'a Proposal;
    type IntoIter = std::slice::Iter<'a, Proposal>;

    fn into_iter(self) -> Self::IntoIter {
        self.proposals.iter()
    }
}

/// The noun a constant stands for when it is really a class name.
fn class_of_constant(c: &str, lex: &Lexicon) -> Option<String> {
    match lex.classify(c) {
        SymbolClass::PluralNoun(n) | SymbolClass::AdjectiveForm(n) => Some(n),
        SymbolClass::SingularNoun => Some(c.to_string()),
        _ => None,
    }
}

fn normalize_literal(l: &Literal, lex: &Lexicon) -> Option<Literal> {
    let p = l.predicate()?;
    lex.normalize_predicate(p).map(|n| l.with_predicate(&n))
}

/// One rewrite step, or `None` if `f` is in normal form.
fn rewrite_step(f: &Formula, lex: &Lexicon) -> Option<Formula> {
    match f {
        Formula::GroundLiteral(l) => {
            if let Atom::Pred {
                predicate,
                arg: Term::Const(c),
            } = &l.atom
            {
                if let Some(noun) = class_of_constant(c, lex) {
                    return Some(Formula::implication(
                        LIFT_VAR,
                        vec![Literal::new(true, noun, Term::var(LIFT_VAR))],
                        Literal::new(l.positive, predicate.clone(), Term::var(LIFT_VAR)),
                    ));
                }
            }
            normalize_literal(l, lex).map(Formula::ground)
        }
        Formula::UnivFact { var, literal } => {
            normalize_literal(literal, lex).map(|l| Formula::fact(var.clone(), l))
        }
        Formula::UnivImplication {
            var,
            antecedent,
            consequent,
        } => {
            for (i, a) in antecedent.iter().enumerate() {
                let demoted = match &a.atom {
                    Atom::Pred {
                        predicate,
                        arg: Term::Var(_),
                    } if a.positive && lex.classify(predicate) == SymbolClass::ProperNoun => {
                        Some(Literal::pos(Atom::eq(
                            Term::var(var.clone()),
                            Term::constant(predicate.clone()),
                        )))
                    }
                    _ => normalize_literal(a, lex),
                };
                if let Some(new) = demoted {
                    let mut ante = antecedent.clone();
                    ante[i] = new;
                    return Some(Formula::implication(var.clone(), ante, consequent.clone()));
                }
            }
            normalize_literal(consequent, lex)
                .map(|c| Formula::implication(var.clone(), antecedent.clone(), c))
        }
    }
}

/// Apply rewrite rules until none fires.
pub fn rewrite_normal_form(f: &Formula, lex: &Lexicon) -> Formula {
    let mut cur = f.clone();
    // every step removes one plural, adjective, verb or proper-noun occurrence
    while let Some(next) = rewrite_step(&cur, lex) {
        cur = next;
    }
    cur
}

/// `! [X] : ((X = c) => L(X))` as the ground literal `L(c)`; anything else
/// unchanged.
pub fn eliminate_equality(f: &Formula) -> Formula {
    if let Formula::UnivImplication {
        antecedent,
        consequent,
        ..
    } = f
    {
        if let [Literal {
            positive: true,
            atom: Atom::Eq {
                right: Term::Const(c),
                ..
            },
        }] = antecedent.as_slice()
        {
            return Formula::ground(consequent.instantiate(c));
        }
    }
    f.clone()
}

/// Derivation rules, each applied once: complement the consequent, and swap
/// a single-literal antecedent with the consequent.
fn derivations(f: &Formula) -> Vec<Formula> {
    let Formula::UnivImplication {
        var,
        antecedent,
        consequent,
    } = f
    else {
        return Vec::new();
    };
    let mut out = vec![Formula::implication(
        var.clone(),
        antecedent.clone(),
        consequent.negated(),
    )];
    if let [a] = antecedent.as_slice() {
        if !a.is_equality() {
            out.push(Formula::implication(
                var.clone(),
                vec![consequent.clone()],
                a.clone(),
            ));
        }
    }
    out
}

/// Candidate fixes for `f`: its rewrite normal form (if different) followed
/// by derivations of the normal form.
pub fn propose(f: &Formula, lex: &Lexicon) -> ProposalSet {
    let mut set = ProposalSet::default();
    let nf = rewrite_normal_form(f, lex);
    set.push(f, nf.clone(), Origin::Rewrite);
    for d in derivations(&nf) {
        set.push(f, d, Origin::Derivation);
    }
    set
}

/// Rewrite-only proposals: at most the normal form.
pub fn propose_rewrites(f: &Formula, lex: &Lexicon) -> ProposalSet {
    let mut set = ProposalSet::default();
    set.push(f, rewrite_normal_form(f, lex), Origin::Rewrite);
    set
}

/// Predicate-level normalization of a query literal.
pub fn normalize_query(q: &Formula, lex: &Lexicon) -> Formula {
    match q {
        Formula::GroundLiteral(l) => match normalize_literal(l, lex) {
            Some(n) => Formula::ground(n),
            None => q.clone(),
        },
        _ => q.clone(),
    }
}
