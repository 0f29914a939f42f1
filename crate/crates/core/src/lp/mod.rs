//! Logic-program frontend: syntax repair, parsing and translation to FOL.
//!
//! Input is the surface syntax LLMs are prompted to emit: one clause per
//! line, `head.` facts, `head :- body.` rules and `?- literal.` queries,
//! with `\+` for negation.

mod fix;
mod parse;
mod translate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fol::Term;

pub use fix::{fix_syntax, RepairRule, RepairTable, RepairTableError};
pub use parse::{parse_lp, parse_statement};
pub use translate::{lp_to_fof, program_from_formulas, query_literal, TranslateError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SyntaxErrorKind {
    CommunicationError,
    SymbolError,
    NaturalLanguageError,
    KnowledgeError,
    OtherSyntaxError,
}

impl SyntaxErrorKind {
    pub const ALL: [SyntaxErrorKind; 5] = [
        SyntaxErrorKind::CommunicationError,
        SyntaxErrorKind::SymbolError,
        SyntaxErrorKind::KnowledgeError,
        SyntaxErrorKind::NaturalLanguageError,
        SyntaxErrorKind::OtherSyntaxError,
    ];
}

impl fmt::Display for SyntaxErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SyntaxErrorKind::CommunicationError => "CommunicationError",
            SyntaxErrorKind::SymbolError => "SymbolError",
            SyntaxErrorKind::NaturalLanguageError => "NaturalLanguageError",
            SyntaxErrorKind::KnowledgeError => "KnowledgeError",
            SyntaxErrorKind::OtherSyntaxError => "OtherSyntaxError",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum RepairAction {
    Fixed { before: String, after: String },
    Dropped { text: String },
}

/// One log entry per rewritten or dropped input line. `labels` lists every
/// error class found on the line, in detection order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairEntry {
    pub line: usize,
    pub labels: Vec<SyntaxErrorKind>,
    #[serde(flatten)]
    pub action: RepairAction,
}

impl RepairEntry {
    pub fn is_dropped(&self) -> bool {
        matches!(self.action, RepairAction::Dropped { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SyntaxRepairLog {
    pub entries: Vec<RepairEntry>,
}

impl SyntaxRepairLog {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn dropped(&self) -> usize {
        self.entries.iter().filter(|e| e.is_dropped()).count()
    }

    /// Number of log entries carrying `kind`.
    pub fn count(&self, kind: SyntaxErrorKind) -> usize {
        self.entries
            .iter()
            .filter(|e| e.labels.contains(&kind))
            .count()
    }

    pub fn push_dropped(&mut self, line: usize, label: SyntaxErrorKind, text: &str) {
        self.entries.push(RepairEntry {
            line,
            labels: vec![label],
            action: RepairAction::Dropped {
                text: text.to_string(),
            },
        });
    }

    pub fn extend(&mut self, other: SyntaxRepairLog) {
        self.entries.extend(other.entries);
        self.entries.sort_by_key(|e| e.line);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatementKind {
    Fact,
    Rule,
    Query,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LpAtom {
    Pred { name: String, args: Vec<Term> },
    Eq(Term, Term),
}

impl LpAtom {
    pub fn unary(name: impl Into<String>, arg: Term) -> Self {
        LpAtom::Pred {
            name: name.into(),
            args: vec![arg],
        }
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            LpAtom::Pred { args, .. } => args.iter().collect(),
            LpAtom::Eq(l, r) => vec![l, r],
        }
    }
}

impl fmt::Display for LpAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpAtom::Pred { name, args } if args.is_empty() => f.write_str(name),
            LpAtom::Pred { name, args } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            LpAtom::Eq(l, r) => write!(f, "{l} = {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LpLiteral {
    pub positive: bool,
    pub atom: LpAtom,
}

impl LpLiteral {
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.atom.terms().into_iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Const(_) => None,
        })
    }
}

impl fmt::Display for LpLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("\\+")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// One fact, rule or query. For queries `head` holds the queried literal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPStatement {
    pub kind: StatementKind,
    pub head: LpLiteral,
    pub body: Vec<LpLiteral>,
    pub raw_text: String,
    pub line: usize,
}

impl LPStatement {
    pub fn is_query(&self) -> bool {
        self.kind == StatementKind::Query
    }

    /// Distinct variables in order of appearance.
    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for v in std::iter::once(&self.head)
            .chain(self.body.iter())
            .flat_map(|l| l.variables())
        {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }
}

impl fmt::Display for LPStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind == StatementKind::Query {
            return write!(f, "?- {}.", self.head);
        }
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        f.write_str(".")
    }
}

/// Output of the frontend: parsed statements (with line numbers of the raw
/// input) and every repair or drop that happened on the way.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParsedProgram {
    pub statements: Vec<LPStatement>,
    pub log: SyntaxRepairLog,
}

impl ParsedProgram {
    pub fn query(&self) -> Option<&LPStatement> {
        self.statements.iter().find(|s| s.is_query())
    }
}

/// Repair then parse raw LLM output, keeping raw line numbers.
pub fn read_program(raw: &str, table: &RepairTable) -> ParsedProgram {
    let (lines, log) = fix::clean_lines(raw, table);
    let mut statements = Vec::new();
    for (line, text) in lines {
        let st = parse_statement(&text, line).expect("cleaned lines parse");
        statements.push(st);
    }
    ParsedProgram { statements, log }
}

/// Parse raw output with no repairs at all; anything malformed is logged and
/// skipped. Used for the unrepaired baseline.
pub fn read_program_unrepaired(raw: &str) -> ParsedProgram {
    let (statements, log) = parse_lp(raw);
    ParsedProgram { statements, log }
}

/// Strip a `%` line comment.
pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('%') {
        Some(i) => &line[..i],
        None => line,
    }
}
