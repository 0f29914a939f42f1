//! Single-statement corruptions of gold programs, each the inverse of one
//! repair the fixer knows about. Used for recovery tests and synthetic
//! transcripts.

use rand::seq::SliceRandom;
use rand::Rng;

use super::Problem;
use crate::fol::{Formula, Literal, Term};
use crate::lexicon::Lexicon;
use crate::lp::{program_from_formulas, LPStatement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    /// `cat(X)` becomes `cats(X)`.
    Pluralize,
    /// `feline(X)` style adjective form instead of the noun.
    AdjectiveForm,
    /// `! [X] : (cat(X) => p(X))` becomes the fact `p(cats)`.
    Demote,
    NegationFlip,
    /// `a => b` becomes `b => a`.
    Reversal,
}

impl Corruption {
    pub const REWRITE: [Corruption; 3] = [
        Corruption::Pluralize,
        Corruption::AdjectiveForm,
        Corruption::Demote,
    ];
    pub const DERIVATION: [Corruption; 2] = [Corruption::NegationFlip, Corruption::Reversal];
}

pub struct Corrupted {
    pub class: Corruption,
    /// Position of the corrupted statement in the program.
    pub index: usize,
    pub gold: Formula,
    pub bad: Formula,
    pub program: String,
}

fn map_literals(f: &Formula, mut g: impl FnMut(usize, &Literal) -> Literal) -> Formula {
    match f {
        Formula::GroundLiteral(l) => Formula::GroundLiteral(g(0, l)),
        Formula::UnivFact { var, literal } => Formula::fact(var.clone(), g(0, literal)),
        Formula::UnivImplication {
            var,
            antecedent,
            consequent,
        } => {
            let ante: Vec<Literal> = antecedent
                .iter()
                .enumerate()
                .map(|(i, l)| g(i, l))
                .collect();
            let cons = g(antecedent.len(), consequent);
            Formula::implication(var.clone(), ante, cons)
        }
    }
}

fn replace_predicate(
    f: &Formula,
    lex: &Lexicon,
    pick: impl Fn(&Lexicon, &str) -> Option<String>,
    rng: &mut impl Rng,
) -> Option<Formula> {
    let pick = |lex: &Lexicon, p: &str| pick(lex, p).filter(|q| q != p);
    let lits = f.literals();
    let slots: Vec<usize> = (0..lits.len())
        .filter(|i| lits[*i].predicate().and_then(|p| pick(lex, p)).is_some())
        .collect();
    let slot = *slots.choose(rng)?;
    Some(map_literals(f, |i, l| {
        if i == slot {
            l.with_predicate(&pick(lex, l.predicate().unwrap()).unwrap())
        } else {
            l.clone()
        }
    }))
}

pub fn apply(class: Corruption, f: &Formula, lex: &Lexicon, rng: &mut impl Rng) -> Option<Formula> {
    match class {
        Corruption::Pluralize => {
            replace_predicate(f, lex, |lex, p| lex.plural(p).map(str::to_string), rng)
        }
        Corruption::AdjectiveForm => replace_predicate(
            f,
            lex,
            |lex, p| lex.adjective_of(p).map(str::to_string),
            rng,
        ),
        Corruption::Demote => match f {
            Formula::UnivImplication {
                antecedent,
                consequent,
                ..
            } if antecedent.len() == 1
                && antecedent[0].positive
                && !antecedent[0].is_equality() =>
            {
                let plural = lex.plural(antecedent[0].predicate()?)?;
                Some(Formula::ground(Literal::new(
                    consequent.positive,
                    consequent.predicate()?,
                    Term::constant(plural),
                )))
            }
            _ => None,
        },
        Corruption::NegationFlip => match f {
            Formula::GroundLiteral(l) => Some(Formula::ground(l.negated())),
            Formula::UnivImplication {
                var,
                antecedent,
                consequent,
            } => Some(Formula::implication(
                var.clone(),
                antecedent.clone(),
                consequent.negated(),
            )),
            Formula::UnivFact { .. } => None,
        },
        Corruption::Reversal => match f {
            Formula::UnivImplication {
                var,
                antecedent,
                consequent,
            } if antecedent.len() == 1
                && antecedent[0].positive
                && consequent.positive
                && !antecedent[0].is_equality() =>
            {
                Some(Formula::implication(
                    var.clone(),
                    vec![consequent.clone()],
                    antecedent[0].clone(),
                ))
            }
            _ => None,
        },
    }
}

/// Corrupt one randomly chosen statement of the gold program, if any
/// statement admits the corruption.
pub fn corrupt(
    problem: &Problem,
    class: Corruption,
    lex: &Lexicon,
    rng: &mut impl Rng,
) -> Option<Corrupted> {
    let gold: Vec<&Formula> = problem.gold_ax.iter().collect();
    let mut order: Vec<usize> = (0..gold.len()).collect();
    order.shuffle(rng);
    for index in order {
        if let Some(bad) = apply(class, gold[index], lex, rng) {
            let mut formulas: Vec<Formula> = gold.iter().map(|f| (*f).clone()).collect();
            formulas[index] = bad.clone();
            return Some(Corrupted {
                class,
                index,
                gold: gold[index].clone(),
                bad,
                program: render(&formulas, &problem.query),
            });
        }
    }
    None
}

/// Program text for `formulas` followed by the query.
pub fn render(formulas: &[Formula], query: &Formula) -> String {
    let mut out = String::new();
    for st in program_from_formulas(formulas) {
        out.push_str(&st.to_string());
        out.push('\n');
    }
    if let Some(q) = LPStatement::query_for(query, formulas.len() + 1) {
        out.push_str(&q.to_string());
        out.push('\n');
    }
    out
}
