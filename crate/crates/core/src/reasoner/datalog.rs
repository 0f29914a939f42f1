use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::fol::Term;
use crate::lp::{LPStatement, LpAtom, LpLiteral};

use super::ReasonerError;

pub(crate) type GroundAtom = (String, Vec<String>);

type Binding = HashMap<String, String>;

fn resolve(t: &Term, b: &Binding) -> Option<String> {
    match t {
        Term::Const(c) => Some(c.clone()),
        Term::Var(v) => b.get(v).cloned(),
    }
}

/// A rule with a positive head; facts have an empty body.
struct Rule<'a> {
    head: &'a LpAtom,
    body: &'a [LpLiteral],
}

fn predicate_key(atom: &LpAtom) -> Option<(String, usize)> {
    match atom {
        LpAtom::Pred { name, args } => Some((name.clone(), args.len())),
        LpAtom::Eq(..) => None,
    }
}

/// Stratum of every predicate, by relaxation. A predicate whose stratum
/// climbs past the number of predicates sits on a negative cycle.
fn stratify(rules: &[Rule]) -> Result<BTreeMap<(String, usize), usize>, ReasonerError> {
    let mut stratum: BTreeMap<(String, usize), usize> = BTreeMap::new();
    for r in rules {
        if let Some(k) = predicate_key(r.head) {
            stratum.entry(k).or_insert(0);
        }
        for l in r.body {
            if let Some(k) = predicate_key(&l.atom) {
                stratum.entry(k).or_insert(0);
            }
        }
    }
    let limit = stratum.len();
    loop {
        let mut changed = false;
        for r in rules {
            let Some(h) = predicate_key(r.head) else {
                continue;
            };
            for l in r.body {
                let Some(k) = predicate_key(&l.atom) else {
                    continue;
                };
                let need = stratum[&k] + usize::from(!l.positive);
                if stratum[&h] < need {
                    if need > limit {
                        return Err(ReasonerError::Stratification(h.0));
                    }
                    stratum.insert(h.clone(), need);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(stratum);
        }
    }
}

struct Eval<'a> {
    universe: &'a [String],
    facts: BTreeSet<GroundAtom>,
}

impl Eval<'_> {
    /// Extend `b` in every way that makes the body true, then call `emit`.
    fn solve(
        &self,
        body: &[&LpLiteral],
        b: &mut Binding,
        vars: &[String],
        emit: &mut dyn FnMut(&Binding),
    ) {
        // positive predicate literals first: they bind by lookup
        if let Some(pos) = body
            .iter()
            .position(|l| l.positive && matches!(l.atom, LpAtom::Pred { .. }))
        {
            let LpAtom::Pred { name, args } = &body[pos].atom else {
                unreachable!()
            };
            let rest: Vec<&LpLiteral> = body
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != pos)
                .map(|(_, l)| *l)
                .collect();
            let candidates: Vec<GroundAtom> = self
                .facts
                .range((name.clone(), Vec::new())..)
                .take_while(|(n, _)| n == name)
                .filter(|(_, a)| a.len() == args.len())
                .cloned()
                .collect();
            for (_, values) in candidates {
                let mut added = Vec::new();
                let mut ok = true;
                for (t, v) in args.iter().zip(&values) {
                    match resolve(t, b) {
                        Some(x) if x == *v => {}
                        Some(_) => {
                            ok = false;
                            break;
                        }
                        None => {
                            b.insert(t.name().to_string(), v.clone());
                            added.push(t.name().to_string());
                        }
                    }
                }
                if ok {
                    self.solve(&rest, b, vars, emit);
                }
                for v in added {
                    b.remove(&v);
                }
            }
            return;
        }
        // positive equalities bind a variable to a constant
        if let Some(pos) = body
            .iter()
            .position(|l| l.positive && matches!(l.atom, LpAtom::Eq(..)))
        {
            let LpAtom::Eq(l, r) = &body[pos].atom else {
                unreachable!()
            };
            let rest: Vec<&LpLiteral> = body
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != pos)
                .map(|(_, l)| *l)
                .collect();
            match (resolve(l, b), resolve(r, b)) {
                (Some(x), Some(y)) => {
                    if x == y {
                        self.solve(&rest, b, vars, emit);
                    }
                }
                (Some(x), None) | (None, Some(x)) => {
                    let var = if resolve(l, b).is_none() {
                        l.name()
                    } else {
                        r.name()
                    }
                    .to_string();
                    b.insert(var.clone(), x);
                    self.solve(&rest, b, vars, emit);
                    b.remove(&var);
                }
                (None, None) => {
                    let var = l.name().to_string();
                    for c in self.universe {
                        b.insert(var.clone(), c.clone());
                        self.solve(body, b, vars, emit);
                    }
                    b.remove(&var);
                }
            }
            return;
        }
        // remaining variables range over the Herbrand universe
        if let Some(v) = vars.iter().find(|v| !b.contains_key(*v)) {
            let v = v.clone();
            for c in self.universe {
                b.insert(v.clone(), c.clone());
                self.solve(body, b, vars, emit);
            }
            b.remove(&v);
            return;
        }
        // only negative literals left, all ground
        let holds = body.iter().all(|l| {
            let v = match &l.atom {
                LpAtom::Pred { name, args } => {
                    let values = args.iter().map(|t| resolve(t, b).unwrap()).collect();
                    self.facts.contains(&(name.clone(), values))
                }
                LpAtom::Eq(x, y) => resolve(x, b) == resolve(y, b),
            };
            v == l.positive
        });
        if holds {
            emit(b);
        }
    }
}

fn rule_vars(r: &Rule) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in r
        .head
        .terms()
        .into_iter()
        .chain(r.body.iter().flat_map(|l| l.atom.terms()))
    {
        if let Term::Var(v) = t {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
    }
    out
}

/// Least model of the positive-head statements of `program`, stratum by
/// stratum. Rules with a negated head derive nothing.
pub(crate) fn fixpoint(
    program: &[LPStatement],
    extra_constants: &[String],
) -> Result<BTreeSet<GroundAtom>, ReasonerError> {
    let rules: Vec<Rule> = program
        .iter()
        .filter(|s| !s.is_query() && s.head.positive && matches!(s.head.atom, LpAtom::Pred { .. }))
        .map(|s| Rule {
            head: &s.head.atom,
            body: &s.body,
        })
        .collect();
    let strata = stratify(&rules)?;
    let mut universe: Vec<String> = Vec::new();
    for s in program {
        for t in std::iter::once(&s.head)
            .chain(&s.body)
            .flat_map(|l| l.atom.terms())
        {
            if let Term::Const(c) = t {
                if !universe.contains(c) {
                    universe.push(c.clone());
                }
            }
        }
    }
    for c in extra_constants {
        if !universe.contains(c) {
            universe.push(c.clone());
        }
    }
    let mut eval = Eval {
        universe: &universe,
        facts: BTreeSet::new(),
    };
    let top = strata.values().copied().max().unwrap_or(0);
    for level in 0..=top {
        let active: Vec<&Rule> = rules
            .iter()
            .filter(|r| predicate_key(r.head).map(|k| strata[&k]) == Some(level))
            .collect();
        loop {
            let mut new = Vec::new();
            for r in &active {
                let vars = rule_vars(r);
                let LpAtom::Pred { name, args } = r.head else {
                    continue;
                };
                let body: Vec<&LpLiteral> = r.body.iter().collect();
                let mut b = Binding::new();
                eval.solve(&body, &mut b, &vars, &mut |b| {
                    let values = args.iter().map(|t| resolve(t, b).unwrap()).collect();
                    new.push((name.clone(), values));
                });
            }
            let before = eval.facts.len();
            eval.facts.extend(new);
            if eval.facts.len() == before {
                break;
            }
        }
    }
    Ok(eval.facts)
}
