#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn negate(self) -> Lit {
        Lit {
            var: self.var,
            positive: !self.positive,
        }
    }
}

pub(crate) type Clause = Vec<Lit>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Val {
    Unset,
    True,
    False,
}

fn value(assign: &[Val], l: Lit) -> Val {
    match (assign[l.var], l.positive) {
        (Val::Unset, _) => Val::Unset,
        (Val::True, true) | (Val::False, false) => Val::True,
        _ => Val::False,
    }
}

fn set(assign: &mut [Val], trail: &mut Vec<usize>, l: Lit) {
    assign[l.var] = if l.positive { Val::True } else { Val::False };
    trail.push(l.var);
}

/// Unit propagation to fixpoint. `false` on conflict.
fn propagate(clauses: &[Clause], assign: &mut [Val], trail: &mut Vec<usize>) -> bool {
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unset = None;
            let mut n_unset = 0;
            let mut sat = false;
            for &l in c {
                match value(assign, l) {
                    Val::True => {
                        sat = true;
                        break;
                    }
                    Val::Unset => {
                        n_unset += 1;
                        unset = Some(l);
                    }
                    Val::False => {}
                }
            }
            if sat {
                continue;
            }
            match (n_unset, unset) {
                (0, _) => return false,
                (1, Some(l)) => {
                    set(assign, trail, l);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn branch_var(clauses: &[Clause], assign: &[Val]) -> Option<usize> {
    clauses
        .iter()
        .filter(|c| !c.iter().any(|&l| value(assign, l) == Val::True))
        .flat_map(|c| c.iter())
        .find(|&&l| value(assign, l) == Val::Unset)
        .map(|l| l.var)
}

fn search(clauses: &[Clause], assign: &mut [Val]) -> bool {
    let mut trail = Vec::new();
    if !propagate(clauses, assign, &mut trail) {
        undo(assign, &trail);
        return false;
    }
    let Some(v) = branch_var(clauses, assign) else {
        return true;
    };
    for choice in [Val::True, Val::False] {
        assign[v] = choice;
        if search(clauses, assign) {
            return true;
        }
    }
    assign[v] = Val::Unset;
    undo(assign, &trail);
    false
}

fn undo(assign: &mut [Val], trail: &[usize]) {
    for &v in trail {
        assign[v] = Val::Unset;
    }
}

/// Satisfying assignment (unconstrained variables false), or `None`.
pub(crate) fn solve(n_vars: usize, clauses: &[Clause]) -> Option<Vec<bool>> {
    let mut assign = vec![Val::Unset; n_vars];
    if search(clauses, &mut assign) {
        Some(assign.into_iter().map(|v| v == Val::True).collect())
    } else {
        None
    }
}
