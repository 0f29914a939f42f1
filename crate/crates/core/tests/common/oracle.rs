// Brute-force model enumeration over a finite domain, used as an independent
// check of the entailment procedure. Shared by several test targets.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use sedac_core::fol::{Atom, Formula, Literal, Term};

pub const PREDICATES: [&str; 4] = ["p", "q", "r", "s"];
pub const CONSTANTS: [&str; 3] = ["a", "b", "c"];

pub struct Instance {
    pub axioms: Vec<Formula>,
    pub goal: Formula,
}

fn random_literal<R: Rng>(rng: &mut R, preds: &[&str], arg: Term) -> Literal {
    let p = preds.choose(rng).unwrap();
    Literal::new(rng.gen_bool(0.6), *p, arg)
}

pub fn random_formula<R: Rng>(rng: &mut R, preds: &[&str], consts: &[&str]) -> Formula {
    match rng.gen_range(0..10) {
        0..=2 => {
            let c = Term::constant(*consts.choose(rng).unwrap());
            Formula::ground(random_literal(rng, preds, c))
        }
        3 => Formula::fact("X", random_literal(rng, preds, Term::var("X"))),
        _ => {
            let n = rng.gen_range(1..=2);
            let mut ante: Vec<Literal> = (0..n)
                .map(|_| random_literal(rng, preds, Term::var("X")))
                .collect();
            if rng.gen_bool(0.1) {
                let c = Term::constant(*consts.choose(rng).unwrap());
                ante.insert(0, Literal::pos(Atom::eq(Term::var("X"), c)));
            }
            Formula::implication("X", ante, random_literal(rng, preds, Term::var("X")))
        }
    }
}

/// Up to 4 predicates, up to 3 constants, up to 8 axioms.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let np = rng.gen_range(1..=PREDICATES.len());
    let nc = rng.gen_range(1..=CONSTANTS.len());
    let preds = &PREDICATES[..np];
    let consts = &CONSTANTS[..nc];
    let n_ax = rng.gen_range(0..=8);
    Instance {
        axioms: (0..n_ax)
            .map(|_| random_formula(rng, preds, consts))
            .collect(),
        goal: random_formula(rng, preds, consts),
    }
}

/// Domain: every constant mentioned plus one anonymous element.
pub fn domain(formulas: &[&Formula]) -> Vec<String> {
    let mut d: Vec<String> = Vec::new();
    for f in formulas {
        for c in f.constants() {
            if !d.iter().any(|x| x == c) {
                d.push(c.to_string());
            }
        }
    }
    d.push("anon".into());
    d
}

struct Interp<'a> {
    preds: &'a [String],
    domain: &'a [String],
    bits: u64,
}

impl Interp<'_> {
    fn atom(&self, p: &str, c: &str) -> bool {
        let pi = self.preds.iter().position(|x| x == p).unwrap();
        let ci = self.domain.iter().position(|x| x == c).unwrap();
        self.bits >> (pi * self.domain.len() + ci) & 1 == 1
    }

    fn term<'t>(&self, t: &'t Term, x: Option<&'t str>) -> &'t str {
        match t {
            Term::Const(c) => c,
            Term::Var(_) => x.expect("variable outside quantifier"),
        }
    }

    fn lit(&self, l: &Literal, x: Option<&str>) -> bool {
        let v = match &l.atom {
            Atom::Pred { predicate, arg } => self.atom(predicate, self.term(arg, x)),
            Atom::Eq { left, right } => self.term(left, x) == self.term(right, x),
        };
        v == l.positive
    }

    fn holds(&self, f: &Formula) -> bool {
        match f {
            Formula::GroundLiteral(l) => self.lit(l, None),
            Formula::UnivFact { literal, .. } => {
                self.domain.iter().all(|d| self.lit(literal, Some(d)))
            }
            Formula::UnivImplication {
                antecedent,
                consequent,
                ..
            } => self.domain.iter().all(|d| {
                !antecedent.iter().all(|l| self.lit(l, Some(d))) || self.lit(consequent, Some(d))
            }),
        }
    }
}

fn predicates(formulas: &[&Formula]) -> Vec<String> {
    let mut p: Vec<String> = Vec::new();
    for f in formulas {
        for x in f.predicates() {
            if !p.iter().any(|y| y == x) {
                p.push(x.to_string());
            }
        }
    }
    p
}

/// `true` iff every assignment satisfying `axioms` satisfies `goal`.
pub fn brute_force_entails(axioms: &[Formula], goal: &Formula) -> bool {
    let all: Vec<&Formula> = axioms.iter().chain(std::iter::once(goal)).collect();
    let domain = domain(&all);
    let preds = predicates(&all);
    let n = preds.len() * domain.len();
    assert!(n <= 24, "oracle limited to 2^24 assignments");
    (0..1u64 << n).all(|bits| {
        let i = Interp {
            preds: &preds,
            domain: &domain,
            bits,
        };
        !axioms.iter().all(|a| i.holds(a)) || i.holds(goal)
    })
}

/// `true` iff some assignment satisfies every axiom.
pub fn brute_force_consistent(axioms: &[Formula]) -> bool {
    let all: Vec<&Formula> = axioms.iter().collect();
    let domain = domain(&all);
    let preds = predicates(&all);
    let n = preds.len() * domain.len();
    (0..1u64 << n).any(|bits| {
        let i = Interp {
            preds: &preds,
            domain: &domain,
            bits,
        };
        axioms.iter().all(|a| i.holds(a))
    })
}
