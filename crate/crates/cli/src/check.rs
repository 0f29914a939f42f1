use std::fmt::Write;

use sedac_core::cnl::{parse_script, NLScript};
use sedac_core::entailment::is_entailed;
use sedac_core::fol::{Formula, FormulaSet};
use sedac_core::lp::{query_literal, read_program, RepairTable};
use sedac_core::sedac::{
    apply_report, full_sedac, lp_axioms, normalize_query, partial_sedac, Depth, Status,
    StatusReport,
};
use sedac_core::Lexicon;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Everything the `check` command shows for one problem and one program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub nl_ax: FormulaSet,
    pub lp_ax: FormulaSet,
    pub partial: FormulaSet,
    pub full: FormulaSet,
    pub report: StatusReport,
    pub query: Formula,
    /// Whether each axiom set entails the query.
    pub entailed_by_nl: bool,
    pub entailed_by_lp: bool,
    pub entailed_by_partial: bool,
    pub entailed_by_full: bool,
    /// The program's own query, if it has one.
    pub program_query: Option<Formula>,
}

impl CheckResult {
    /// Invariants the repair must satisfy: every fix is entailed by the
    /// problem text, and the fully repaired program never proves what the
    /// text does not.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in &self.report.entries {
            if let Status::FixableSemanticError { fix, .. } = &e.status {
                if !is_entailed(&self.nl_ax, fix).unwrap_or(false) {
                    out.push(format!(
                        "line {}: fix {fix} is not entailed by the text",
                        e.line
                    ));
                }
            }
        }
        if self.entailed_by_full && !self.entailed_by_nl {
            out.push(format!(
                "repaired program proves {} but the text does not",
                self.query
            ));
        }
        out
    }
}

pub fn check(
    nl_text: &str,
    program: &str,
    lex: &Lexicon,
    table: &RepairTable,
) -> Result<CheckResult, CliError> {
    let script = NLScript::from_text(nl_text).map_err(|e| CliError::Input(e.to_string()))?;
    let parsed = parse_script(&script, lex).map_err(|e| CliError::Input(e.to_string()))?;
    let prog = read_program(program, table);
    let lp_ax = lp_axioms(&prog.statements);
    let partial = partial_sedac(&prog.statements, lex);
    let mut report = full_sedac(&parsed.nl_ax, &prog.statements, lex)
        .map_err(|e| CliError::Input(e.to_string()))?;
    report.attach_log(&prog.log);
    let full = apply_report(&lp_ax, &report);
    let q = &parsed.query;
    let ent = |ax: &FormulaSet, g: &Formula| {
        is_entailed(ax, g).map_err(|e| CliError::Input(e.to_string()))
    };
    let program_query = prog.query().and_then(|s| query_literal(s).ok());
    Ok(CheckResult {
        entailed_by_nl: ent(&parsed.nl_ax, q)?,
        entailed_by_lp: ent(&lp_ax, q)?,
        entailed_by_partial: ent(&partial, &normalize_query(q, lex))?,
        entailed_by_full: ent(&full, &normalize_query(q, lex))?,
        nl_ax: parsed.nl_ax,
        lp_ax,
        partial,
        full,
        report,
        query: parsed.query,
        program_query,
    })
}

fn status_text(s: &Status) -> String {
    match s {
        Status::Ok => "OK".to_string(),
        Status::FixableSemanticError { fix, score, origin } => {
            format!("FixableSemanticError fix={fix} score={score} origin={origin:?}")
        }
        Status::NonFixableSemanticError => "NonFixableSemanticError".to_string(),
        Status::Query => "query".to_string(),
        Status::Untranslatable { reason } => format!("untranslatable: {reason}"),
        Status::Dropped { label } => format!("dropped ({label})"),
    }
}

pub fn render_text(r: &CheckResult) -> String {
    let mut s = String::new();
    let block = |s: &mut String, title: &str, set: &FormulaSet| {
        let _ = writeln!(s, "{title}:");
        for f in set.iter() {
            let _ = writeln!(s, "  {f}");
        }
    };
    block(&mut s, "nl_ax", &r.nl_ax);
    block(&mut s, "lp_ax", &r.lp_ax);
    block(&mut s, "partial", &r.partial);
    block(&mut s, "full", &r.full);
    let _ = writeln!(s, "statuses:");
    for e in &r.report.entries {
        let depth = match e.depth {
            Some(Depth::Shallow) => " [shallow]",
            Some(Depth::Deep) => " [deep]",
            None => "",
        };
        let _ = writeln!(
            s,
            "  {:>3}  {:<40} {}{}",
            e.line,
            e.raw,
            status_text(&e.status),
            depth
        );
    }
    let yes = |b: bool| if b { "entailed" } else { "not entailed" };
    let _ = writeln!(s, "query {}:", r.query);
    let _ = writeln!(s, "  nl_ax:   {}", yes(r.entailed_by_nl));
    let _ = writeln!(s, "  lp_ax:   {}", yes(r.entailed_by_lp));
    let _ = writeln!(s, "  partial: {}", yes(r.entailed_by_partial));
    let _ = writeln!(s, "  full:    {}", yes(r.entailed_by_full));
    s
}
