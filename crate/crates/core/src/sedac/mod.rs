//! Semantic error detection and correction.
//!
//! Each translated statement is checked for soundness against the axioms
//! obtained from the source text. Unsound statements are repaired by the
//! best sound candidate from [`propose`], if any.

mod propose;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entailment::is_entailed;
use crate::fol::{alpha_equal, Formula, FormulaSet, FragmentError};
use crate::lexicon::Lexicon;
use crate::lp::{lp_to_fof, LPStatement, RepairAction, SyntaxErrorKind, SyntaxRepairLog};

pub use propose::{
    eliminate_equality, normalize_query, propose, propose_rewrites, rewrite_normal_form, Origin,
    Proposal, ProposalSet, LIFT_VAR,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Depth {
    Shallow,
    Deep,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum Status {
    Ok,
    FixableSemanticError {
        fix: Formula,
        score: usize,
        origin: Origin,
    },
    NonFixableSemanticError,
    /// Queries are not soundness-checked.
    Query,
    /// Parsed but outside the fragment; ignored like an unparseable line.
    Untranslatable {
        reason: String,
    },
    /// Removed by syntax repair before parsing.
    Dropped {
        label: SyntaxErrorKind,
    },
}

impl Status {
    pub fn depth(&self) -> Option<Depth> {
        match self {
            Status::FixableSemanticError {
                origin: Origin::Rewrite,
                ..
            } => Some(Depth::Shallow),
            Status::FixableSemanticError { .. } | Status::NonFixableSemanticError => {
                Some(Depth::Deep)
            }
            _ => None,
        }
    }

    pub fn is_semantic_error(&self) -> bool {
        self.depth().is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusEntry {
    pub line: usize,
    pub raw: String,
    pub fof: Option<Formula>,
    #[serde(flatten)]
    pub status: Status,
    pub depth: Option<Depth>,
    /// Syntax repairs applied to this line before parsing.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub syntax: Vec<SyntaxErrorKind>,
}

impl StatusEntry {
    fn new(line: usize, raw: String, fof: Option<Formula>, status: Status) -> Self {
        let depth = status.depth();
        StatusEntry {
            line,
            raw,
            fof,
            status,
            depth,
            syntax: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusReport {
    pub entries: Vec<StatusEntry>,
}

impl StatusReport {
    /// Attach syntax-repair labels to statements and add an entry for every
    /// dropped line, keeping line order.
    pub fn attach_log(&mut self, log: &SyntaxRepairLog) {
        for e in &log.entries {
            match &e.action {
                RepairAction::Fixed { .. } => {
                    if let Some(entry) = self.entries.iter_mut().find(|s| s.line == e.line) {
                        entry.syntax.extend(e.labels.iter().copied());
                    }
                }
                RepairAction::Dropped { text } => {
                    let label = *e
                        .labels
                        .last()
                        .unwrap_or(&SyntaxErrorKind::OtherSyntaxError);
                    let mut entry =
                        StatusEntry::new(e.line, text.clone(), None, Status::Dropped { label });
                    entry.syntax = e.labels.clone();
                    self.entries.push(entry);
                }
            }
        }
        self.entries.sort_by_key(|s| s.line);
    }

    pub fn count(&self, pred: impl Fn(&Status) -> bool) -> usize {
        self.entries.iter().filter(|e| pred(&e.status)).count()
    }

    pub fn count_depth(&self, depth: Depth) -> usize {
        self.entries
            .iter()
            .filter(|e| e.depth == Some(depth))
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Translations of the non-query statements that fall in the fragment.
pub fn lp_axioms(lp: &[LPStatement]) -> FormulaSet {
    lp.iter()
        .filter(|s| !s.is_query())
        .filter_map(|s| lp_to_fof(s).ok())
        .collect()
}

/// Rewrite-only repair, without access to the source text.
pub fn partial_sedac(lp: &[LPStatement], lex: &Lexicon) -> FormulaSet {
    lp.iter()
        .filter(|s| !s.is_query())
        .filter_map(|s| lp_to_fof(s).ok())
        .map(|f| eliminate_equality(&rewrite_normal_form(&f, lex)))
        .collect()
}

fn score(rest: &FormulaSet, fix: &Formula, nl_ax: &FormulaSet) -> Result<usize, FragmentError> {
    let mut ax = rest.clone();
    ax.insert(fix.clone());
    let mut n = 0;
    for g in nl_ax.iter() {
        if is_entailed(&ax, g)? {
            n += 1;
        }
    }
    Ok(n)
}

fn check_one(
    f: &Formula,
    lp_ax: &[Option<Formula>],
    nl_ax: &FormulaSet,
    lex: &Lexicon,
) -> Result<Status, FragmentError> {
    if is_entailed(nl_ax, f)? {
        return Ok(Status::Ok);
    }
    let mut sound = Vec::new();
    for p in propose(f, lex).iter() {
        if is_entailed(nl_ax, &p.formula)? {
            sound.push(p.clone());
        }
    }
    if sound.is_empty() {
        return Ok(Status::NonFixableSemanticError);
    }
    let rest: FormulaSet = lp_ax
        .iter()
        .flatten()
        .filter(|g| !alpha_equal(g, f))
        .cloned()
        .collect();
    let mut best: Option<(usize, Proposal)> = None;
    for p in sound {
        let s = score(&rest, &p.formula, nl_ax)?;
        // ties: rewrite before derivation, then generation order
        let better = match &best {
            None => true,
            Some((bs, bp)) => s > *bs || (s == *bs && p.origin < bp.origin),
        };
        if better {
            best = Some((s, p));
        }
    }
    let (score, p) = best.expect("nonempty");
    Ok(Status::FixableSemanticError {
        fix: p.formula,
        score,
        origin: p.origin,
    })
}

/// Check every statement of `lp` against `nl_ax` and pick repairs.
pub fn full_sedac(
    nl_ax: &FormulaSet,
    lp: &[LPStatement],
    lex: &Lexicon,
) -> Result<StatusReport, FragmentError> {
    let translated: Vec<Option<Formula>> = lp
        .iter()
        .map(|s| {
            if s.is_query() {
                None
            } else {
                lp_to_fof(s).ok()
            }
        })
        .collect();
    let entries = lp
        .par_iter()
        .map(|st| {
            let raw = st.raw_text.clone();
            if st.is_query() {
                return Ok(StatusEntry::new(st.line, raw, None, Status::Query));
            }
            let f = match lp_to_fof(st) {
                Ok(f) => f,
                Err(e) => {
                    let status = Status::Untranslatable {
                        reason: e.to_string(),
                    };
                    return Ok(StatusEntry::new(st.line, raw, None, status));
                }
            };
            let status = check_one(&f, &translated, nl_ax, lex)?;
            Ok(StatusEntry::new(st.line, raw, Some(f), status))
        })
        .collect::<Result<Vec<_>, FragmentError>>()?;
    Ok(StatusReport { entries })
}

/// Keep OK formulas, substitute fixes, drop non-fixable ones. Formulas
/// without a report entry are kept.
pub fn apply_report(lp_ax: &FormulaSet, report: &StatusReport) -> FormulaSet {
    let mut out = FormulaSet::new();
    for f in lp_ax.iter() {
        let entry = report
            .entries
            .iter()
            .find(|e| e.fof.as_ref().is_some_and(|g| alpha_equal(f, g)));
        match entry.map(|e| &e.status) {
            Some(Status::FixableSemanticError { fix, .. }) => {
                out.insert(fix.clone());
            }
            Some(Status::NonFixableSemanticError) => {}
            _ => {
                out.insert(f.clone());
            }
        }
    }
    out
}
