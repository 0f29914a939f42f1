//! Line-level syntax repair of LLM output.
//!
//! Stages, in order: strip communication markers, apply the symbol repair
//! table, drop natural-language lines, drop lines that import arithmetic
//! background knowledge, drop whatever still does not parse.

use thiserror::Error;

use super::parse::{parse_statement, tokenize, Tok};
use super::{strip_comment, RepairAction, RepairEntry, SyntaxErrorKind, SyntaxRepairLog};

/// Prose labels LLMs put in front of the program.
const PROSE_PREFIXES: [&str; 10] = [
    "problog program",
    "prolog program",
    "logic program",
    "problog",
    "prolog",
    "program",
    "answer",
    "output",
    "code",
    "query",
];

/// Bare words that are arithmetic operators rather than prose.
const ARITH_WORDS: [&str; 6] = ["is", "mod", "rem", "div", "xor", "abs"];

/// A single symbol repair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepairRule {
    /// Replace a leading `from` with `to`.
    Prefix { from: String, to: String },
    /// Replace every occurrence of `from` with `to`.
    Replace { from: String, to: String },
    /// Remove a `,` left dangling before the terminal period.
    StrayComma,
    /// Append a missing terminal period.
    TerminalPeriod,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("repair table line {line}: {message}")]
pub struct RepairTableError {
    pub line: usize,
    pub message: String,
}

/// Ordered symbol repairs; extensible through a small text format:
///
/// ```text
/// prefix -? ?-
/// replace := :-
/// stray-comma
/// terminal-period
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairTable {
    pub rules: Vec<RepairRule>,
}

impl Default for RepairTable {
    fn default() -> Self {
        RepairTable::parse(
            "prefix -? ?-\n\
             prefix ? ?-\n\
             replace := :-\n\
             replace <- :-\n\
             replace ~ \\+\n\
             replace ¬ \\+\n\
             stray-comma\n\
             terminal-period\n",
        )
        .expect("default repair table")
    }
}

impl RepairTable {
    pub fn parse(text: &str) -> Result<Self, RepairTableError> {
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let rule = match parts.as_slice() {
                ["prefix", from, to] => RepairRule::Prefix {
                    from: from.to_string(),
                    to: to.to_string(),
                },
                ["replace", from, to] => RepairRule::Replace {
                    from: from.to_string(),
                    to: to.to_string(),
                },
                ["stray-comma"] => RepairRule::StrayComma,
                ["terminal-period"] => RepairRule::TerminalPeriod,
                _ => {
                    return Err(RepairTableError {
                        line: i + 1,
                        message: format!("unrecognized rule `{line}`"),
                    })
                }
            };
            rules.push(rule);
        }
        Ok(RepairTable { rules })
    }

    /// Apply every rule in order.
    pub fn apply(&self, line: &str) -> String {
        let mut s = line.trim().to_string();
        for rule in &self.rules {
            s = match rule {
                RepairRule::Prefix { from, to } => match s.strip_prefix(from.as_str()) {
                    Some(rest) if !s.starts_with(to.as_str()) => format!("{to}{rest}"),
                    _ => s,
                },
                RepairRule::Replace { from, to } => s.replace(from.as_str(), to),
                RepairRule::StrayComma => {
                    let body = s.strip_suffix('.').unwrap_or(&s).trim_end();
                    match body.strip_suffix(',') {
                        Some(b) if s.ends_with('.') => format!("{}.", b.trim_end()),
                        Some(b) => b.trim_end().to_string(),
                        None => s,
                    }
                }
                RepairRule::TerminalPeriod => {
                    if s.ends_with('.') {
                        s
                    } else {
                        format!("{s}.")
                    }
                }
            };
        }
        s
    }
}

/// Strip communication markers. Returns the remaining content and whether
/// anything was stripped.
fn strip_communication(line: &str) -> (String, bool) {
    let trimmed = line.trim();
    if trimmed.starts_with("```") {
        let rest = trimmed.trim_start_matches('`');
        let rest = rest
            .strip_prefix("prolog")
            .or_else(|| rest.strip_prefix("problog"))
            .or_else(|| rest.strip_prefix("pl"))
            .unwrap_or(rest);
        return (rest.trim_end_matches('`').trim().to_string(), true);
    }
    let mut s = trimmed.to_string();
    let mut changed = false;
    for marker in ["<<", ">>", "`"] {
        if s.contains(marker) {
            s = s.replace(marker, "");
            changed = true;
        }
    }
    let lower = s.to_ascii_lowercase();
    for prefix in PROSE_PREFIXES {
        if let Some(rest) = lower.strip_prefix(prefix) {
            if let Some(after) = rest.trim_start().strip_prefix(':') {
                let cut = s.len() - after.len();
                s = s[cut..].trim().to_string();
                changed = true;
                break;
            }
        }
    }
    // A prose lead-in such as "Here is the program:".
    if s.ends_with(':') && !s.contains('(') {
        return (String::new(), true);
    }
    (s.trim().to_string(), changed)
}

/// Two or more bare words outside any `name(args)` shape.
fn is_natural_language(line: &str) -> bool {
    let toks = tokenize(line);
    let mut depth = 0i32;
    let mut bare = 0;
    for (i, t) in toks.iter().enumerate() {
        match t {
            Tok::LParen => depth += 1,
            Tok::RParen => depth -= 1,
            Tok::Ident(w) if depth == 0 => {
                let applied = toks.get(i + 1) == Some(&Tok::LParen);
                if !applied && !ARITH_WORDS.contains(&w.as_str()) {
                    bare += 1;
                }
            }
            _ => {}
        }
    }
    bare >= 2
}

/// Arithmetic, comparison or numerals: the program is computing rather than
/// translating.
fn is_knowledge(line: &str) -> bool {
    tokenize(line).iter().any(|t| match t {
        Tok::Number(_) | Tok::Op(_) => true,
        Tok::Ident(w) => ARITH_WORDS.contains(&w.as_str()),
        _ => false,
    })
}

/// Clean every line; returns kept `(raw line number, text)` pairs and the log.
pub(crate) fn clean_lines(
    raw: &str,
    table: &RepairTable,
) -> (Vec<(usize, String)>, SyntaxRepairLog) {
    let mut kept = Vec::new();
    let mut log = SyntaxRepairLog::default();
    for (i, raw_line) in raw.lines().enumerate() {
        let line_no = i + 1;
        let original = strip_comment(raw_line).trim();
        if original.is_empty() {
            continue;
        }
        let mut labels = Vec::new();
        let drop = |labels: &mut Vec<SyntaxErrorKind>, log: &mut SyntaxRepairLog, kind| {
            labels.push(kind);
            log.entries.push(RepairEntry {
                line: line_no,
                labels: std::mem::take(labels),
                action: RepairAction::Dropped {
                    text: original.to_string(),
                },
            });
        };

        let (content, communication) = strip_communication(original);
        if communication {
            labels.push(SyntaxErrorKind::CommunicationError);
        }
        let content = strip_comment(&content).trim().to_string();
        if content.is_empty() {
            log.entries.push(RepairEntry {
                line: line_no,
                labels,
                action: RepairAction::Dropped {
                    text: original.to_string(),
                },
            });
            continue;
        }
        let repaired = table.apply(&content);
        if is_natural_language(&repaired) {
            drop(&mut labels, &mut log, SyntaxErrorKind::NaturalLanguageError);
            continue;
        }
        if is_knowledge(&repaired) {
            drop(&mut labels, &mut log, SyntaxErrorKind::KnowledgeError);
            continue;
        }
        if parse_statement(&repaired, line_no).is_none() {
            drop(&mut labels, &mut log, SyntaxErrorKind::OtherSyntaxError);
            continue;
        }
        if repaired != content {
            labels.push(SyntaxErrorKind::SymbolError);
        }
        if !labels.is_empty() {
            log.entries.push(RepairEntry {
                line: line_no,
                labels,
                action: RepairAction::Fixed {
                    before: original.to_string(),
                    after: repaired.clone(),
                },
            });
        }
        kept.push((line_no, repaired));
    }
    (kept, log)
}

/// Repair LLM output line by line. Total: in the worst case every line is
/// dropped. `fix_syntax(cleaned)` returns `cleaned` unchanged with an empty
/// log.
pub fn fix_syntax(raw: &str, table: &RepairTable) -> (String, SyntaxRepairLog) {
    let (kept, log) = clean_lines(raw, table);
    let mut cleaned = String::new();
    for (_, text) in kept {
        cleaned.push_str(&text);
        cleaned.push('\n');
    }
    (cleaned, log)
}
