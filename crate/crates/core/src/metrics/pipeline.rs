use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Problem;
use crate::fol::{Formula, FormulaSet};
use crate::lexicon::Lexicon;
use crate::lp::{
    program_from_formulas, query_literal, read_program, read_program_unrepaired, ParsedProgram,
    RepairTable, SyntaxErrorKind,
};
use crate::reasoner::{answer_closed_world, answer_open_world, Semantics};
use crate::sedac::{
    apply_report, full_sedac, lp_axioms, normalize_query, partial_sedac, Depth, Status,
};

use super::{ErrorRecord, ErrorType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    Baseline,
    ZeroShot,
    OneShot,
    SyntaxFix,
    Partial,
    Full,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::Baseline,
        Condition::ZeroShot,
        Condition::OneShot,
        Condition::SyntaxFix,
        Condition::Partial,
        Condition::Full,
    ];

    /// Whether the model is asked for a program (as opposed to an answer).
    pub fn uses_program(self) -> bool {
        self != Condition::Baseline
    }

    /// Whether the one-shot prompt is used.
    pub fn one_shot(self) -> bool {
        matches!(
            self,
            Condition::OneShot | Condition::SyntaxFix | Condition::Partial | Condition::Full
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Condition::Baseline => "baseline",
            Condition::ZeroShot => "zero-shot",
            Condition::OneShot => "one-shot",
            Condition::SyntaxFix => "one-shot+syntax-fix",
            Condition::Partial => "one-shot+partial",
            Condition::Full => "one-shot+full",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Condition::ALL.iter().map(|c| c.name()).collect();
                format!(
                    "unknown condition `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// Where model responses come from: a live endpoint, a transcript store,
/// or a synthetic generator.
pub trait ResponseSource: Sync {
    fn response(
        &self,
        problem: &Problem,
        condition: Condition,
        trial: usize,
    ) -> Result<String, String>;
}

impl<F> ResponseSource for F
where
    F: Fn(&Problem, Condition, usize) -> Result<String, String> + Sync,
{
    fn response(
        &self,
        problem: &Problem,
        condition: Condition,
        trial: usize,
    ) -> Result<String, String> {
        self(problem, condition, trial)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: String,
    pub gold: bool,
    /// `None` when the pipeline produced no answer.
    pub answer: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl Outcome {
    /// The answer used for scoring: a failure counts as the wrong answer.
    pub fn predicted(&self) -> bool {
        self.answer.unwrap_or(!self.gold)
    }

    pub fn correct(&self) -> bool {
        self.predicted() == self.gold
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionRun {
    pub outcomes: Vec<Outcome>,
    pub records: Vec<ErrorRecord>,
}

/// First `true` or `false` word in a free-text answer.
pub fn parse_baseline_answer(text: &str) -> Option<bool> {
    text.split(|c: char| !c.is_ascii_alphabetic())
        .find_map(|w| match w.to_ascii_lowercase().as_str() {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        })
}

fn program_query(prog: &ParsedProgram) -> Result<Formula, String> {
    let q = prog.query().ok_or("program has no query")?;
    query_literal(q).map_err(|e| format!("query: {e}"))
}

fn ask(axioms: &FormulaSet, query: &Formula, semantics: Semantics) -> Result<bool, String> {
    let v = match semantics {
        Semantics::Open => answer_open_world(axioms, query),
        Semantics::Closed => answer_closed_world(&program_from_formulas(axioms.iter()), query),
    };
    v.map(|v| v.answer).map_err(|e| e.to_string())
}

/// Answer one problem from one raw response under a condition.
pub fn solve(
    problem: &Problem,
    raw: &str,
    condition: Condition,
    semantics: Semantics,
    lex: &Lexicon,
    table: &RepairTable,
) -> Result<bool, String> {
    match condition {
        Condition::Baseline => {
            parse_baseline_answer(raw).ok_or_else(|| "no True/False in response".to_string())
        }
        Condition::ZeroShot | Condition::OneShot => {
            let prog = read_program_unrepaired(raw);
            if let Some(e) = prog.log.entries.first() {
                return Err(format!("line {} does not parse", e.line));
            }
            let q = program_query(&prog)?;
            match semantics {
                Semantics::Open => ask(&lp_axioms(&prog.statements), &q, semantics),
                Semantics::Closed => answer_closed_world(&prog.statements, &q)
                    .map(|v| v.answer)
                    .map_err(|e| e.to_string()),
            }
        }
        Condition::SyntaxFix => {
            let prog = read_program(raw, table);
            let q = program_query(&prog)?;
            match semantics {
                Semantics::Open => ask(&lp_axioms(&prog.statements), &q, semantics),
                Semantics::Closed => answer_closed_world(&prog.statements, &q)
                    .map(|v| v.answer)
                    .map_err(|e| e.to_string()),
            }
        }
        Condition::Partial => {
            let prog = read_program(raw, table);
            let q = normalize_query(&program_query(&prog)?, lex);
            ask(&partial_sedac(&prog.statements, lex), &q, semantics)
        }
        Condition::Full => {
            let prog = read_program(raw, table);
            let q = normalize_query(&program_query(&prog)?, lex);
            let report =
                full_sedac(&problem.gold_ax, &prog.statements, lex).map_err(|e| e.to_string())?;
            ask(
                &apply_report(&lp_axioms(&prog.statements), &report),
                &q,
                semantics,
            )
        }
    }
}

/// Error taxonomy of one response: syntax labels from repair, semantic
/// labels from checking the repaired program against the gold axioms.
pub fn classify_errors(
    problem: &Problem,
    raw: &str,
    lex: &Lexicon,
    table: &RepairTable,
) -> ErrorRecord {
    let mut rec = ErrorRecord::new(&problem.id);
    let prog = read_program(raw, table);
    for kind in SyntaxErrorKind::ALL {
        rec.add(ErrorType::from(kind), prog.log.count(kind));
    }
    if let Ok(report) = full_sedac(&problem.gold_ax, &prog.statements, lex) {
        rec.add(
            ErrorType::ShallowSemantic,
            report.count_depth(Depth::Shallow),
        );
        rec.add(ErrorType::DeepSemantic, report.count_depth(Depth::Deep));
        rec.add(
            ErrorType::OtherSyntax,
            report.count(|s| matches!(s, Status::Untranslatable { .. })),
        );
    }
    rec
}

/// Run every problem through one condition. Failures are recorded, never
/// propagated.
pub fn run_condition(
    problems: &[Problem],
    condition: Condition,
    semantics: Semantics,
    source: &dyn ResponseSource,
    lex: &Lexicon,
    table: &RepairTable,
    trial: usize,
) -> ConditionRun {
    let rows: Vec<(Outcome, ErrorRecord)> = problems
        .par_iter()
        .map(|p| {
            let raw = source.response(p, condition, trial);
            let (answer, failure, record) = match raw {
                Err(e) => (None, Some(e), ErrorRecord::new(&p.id)),
                Ok(raw) => {
                    let record = if condition.uses_program() {
                        classify_errors(p, &raw, lex, table)
                    } else {
                        ErrorRecord::new(&p.id)
                    };
                    match solve(p, &raw, condition, semantics, lex, table) {
                        Ok(a) => (Some(a), None, record),
                        Err(e) => (None, Some(e), record),
                    }
                }
            };
            let outcome = Outcome {
                id: p.id.clone(),
                gold: p.gold_answer,
                answer,
                failure,
            };
            (outcome, record)
        })
        .collect();
    let (outcomes, records) = rows.into_iter().unzip();
    ConditionRun { outcomes, records }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate, GeneratorConfig};

    fn problems() -> Vec<Problem> {
        let cfg = GeneratorConfig {
            count: 12,
            seed: 9,
            ..Default::default()
        };
        generate(&cfg, &Lexicon::builtin()).unwrap()
    }

    #[test]
    fn baseline_answers() {
        assert_eq!(parse_baseline_answer("**True**. Because..."), Some(true));
        assert_eq!(
            parse_baseline_answer("The answer is false; not true"),
            Some(false)
        );
        assert_eq!(parse_baseline_answer("untrue"), None);
    }

    #[test]
    fn condition_names_round_trip() {
        for c in Condition::ALL {
            assert_eq!(c.name().parse::<Condition>().unwrap(), c);
        }
        assert!("two-shot".parse::<Condition>().is_err());
    }

    #[test]
    fn gold_programs_are_answered_correctly_everywhere() {
        let ps = problems();
        let lex = Lexicon::builtin();
        let table = RepairTable::default();
        let src = |p: &Problem, _: Condition, _: usize| Ok(p.gold_program());
        for c in Condition::ALL.into_iter().filter(|c| c.uses_program()) {
            for sem in [Semantics::Open, Semantics::Closed] {
                let run = run_condition(&ps, c, sem, &src, &lex, &table, 0);
                for o in &run.outcomes {
                    assert!(o.correct(), "{c} {sem} {o:?}");
                }
                assert!(run.records.iter().all(|r| r.types() == 0), "{c}");
            }
        }
    }

    #[test]
    fn syntax_noise_only_hurts_unrepaired_conditions() {
        let ps = problems();
        let lex = Lexicon::builtin();
        let table = RepairTable::default();
        let src = |p: &Problem, _: Condition, _: usize| {
            Ok(format!("```prolog\n{}```\n", p.gold_program()))
        };
        let one = run_condition(
            &ps,
            Condition::OneShot,
            Semantics::Open,
            &src,
            &lex,
            &table,
            0,
        );
        assert!(one.outcomes.iter().all(|o| o.answer.is_none()));
        assert!(one.records.iter().all(|r| r.has(ErrorType::Communication)));
        let fixed = run_condition(
            &ps,
            Condition::SyntaxFix,
            Semantics::Open,
            &src,
            &lex,
            &table,
            0,
        );
        assert!(fixed.outcomes.iter().all(|o| o.correct()));
    }

    #[test]
    fn source_errors_and_missing_queries_are_failures() {
        let ps = problems();
        let lex = Lexicon::builtin();
        let table = RepairTable::default();
        let src = |p: &Problem, _: Condition, _: usize| {
            if p.gold_answer {
                Err("timeout".to_string())
            } else {
                Ok(p.gold_program()
                    .lines()
                    .filter(|l| !l.starts_with("?-"))
                    .collect::<Vec<_>>()
                    .join("\n"))
            }
        };
        let run = run_condition(&ps, Condition::Full, Semantics::Open, &src, &lex, &table, 0);
        assert_eq!(run.outcomes.len(), ps.len());
        assert!(run
            .outcomes
            .iter()
            .all(|o| o.answer.is_none() && !o.correct()));
        assert!(run
            .outcomes
            .iter()
            .any(|o| o.failure.as_deref() == Some("timeout")));
        assert!(run
            .outcomes
            .iter()
            .any(|o| o.failure.as_deref() == Some("program has no query")));
    }

    #[test]
    fn full_repairs_a_flipped_rule() {
        let ps = problems();
        let lex = Lexicon::builtin();
        let table = RepairTable::default();
        // invert the polarity of every rule head
        let flip = |p: &Problem| {
            p.gold_program()
                .lines()
                .map(|l| match l.strip_prefix("\\+") {
                    Some(rest) if l.contains(":-") => rest.to_string(),
                    _ if l.contains(":-") => format!("\\+{l}"),
                    _ => l.to_string(),
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        let src = |p: &Problem, _: Condition, _: usize| Ok(flip(p));
        let one = run_condition(
            &ps,
            Condition::SyntaxFix,
            Semantics::Open,
            &src,
            &lex,
            &table,
            0,
        );
        let full = run_condition(&ps, Condition::Full, Semantics::Open, &src, &lex, &table, 0);
        assert!(
            full.outcomes.iter().all(|o| o.correct()),
            "{:?}",
            full.outcomes
        );
        assert!(one.outcomes.iter().filter(|o| o.correct()).count() < ps.len());
        assert!(full.records.iter().all(|r| r.has(ErrorType::DeepSemantic)));
    }
}
