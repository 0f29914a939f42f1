//! Controlled-English grammar producing canonical first-order axioms.
//!
//! Hand-written recursive descent over lowercase word tokens; productions
//! are listed in `docs/grammar.md`. Plural nouns come out singular,
//! adjective forms of nouns come out as the noun (`even` -> `even_number`)
//! and verbs come out as their stem, so every sentence has exactly one
//! canonical formula.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fol::{Formula, FormulaSet, Literal, Term};
use crate::lexicon::{Lexicon, SymbolClass};

/// Bound variable used for every quantified sentence.
pub const NL_VAR: &str = "A";

const QUERY_PREFIX: &str = "true or false:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse \"{sentence}\": {message} at token {index} (`{token}`)")]
pub struct CnlError {
    pub sentence: String,
    pub index: usize,
    pub token: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("script has {0} query sentences, expected exactly one")]
    QueryCount(usize),
    #[error("statement {index} does not end with '.': \"{sentence}\"")]
    Unterminated { index: usize, sentence: String },
    #[error("{} sentence(s) failed to parse: {}", .0.len(), .0.iter().map(|(i, e)| format!("[{i}] {e}")).collect::<Vec<_>>().join("; "))]
    Sentences(Vec<(usize, CnlError)>),
}

/// A problem script: statements followed by one `True or false:` query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NLScript {
    pub statements: Vec<String>,
    pub query_sentence: String,
}

impl NLScript {
    /// Split free text into sentences. Sentences may share lines or be one
    /// per line; the query is the sentence starting with `True or false:`.
    pub fn from_text(text: &str) -> Result<Self, ScriptError> {
        let mut statements = Vec::new();
        let mut queries = Vec::new();
        let mut current = String::new();
        let flush =
            |current: &mut String, statements: &mut Vec<String>, queries: &mut Vec<String>| {
                let s = current.trim().to_string();
                current.clear();
                if s.is_empty() {
                    return;
                }
                if s.to_ascii_lowercase().starts_with(QUERY_PREFIX) {
                    queries.push(s);
                } else {
                    statements.push(s);
                }
            };
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                flush(&mut current, &mut statements, &mut queries);
                continue;
            }
            for ch in line.chars() {
                current.push(ch);
                if ch == '.' || ch == '?' {
                    flush(&mut current, &mut statements, &mut queries);
                }
            }
            // The query prefix ends with ':' so sentences never wrap lines.
            flush(&mut current, &mut statements, &mut queries);
        }
        flush(&mut current, &mut statements, &mut queries);
        if queries.len() != 1 {
            return Err(ScriptError::QueryCount(queries.len()));
        }
        for (index, s) in statements.iter().enumerate() {
            if !s.ends_with('.') {
                return Err(ScriptError::Unterminated {
                    index,
                    sentence: s.clone(),
                });
            }
        }
        Ok(NLScript {
            statements,
            query_sentence: queries.pop().unwrap(),
        })
    }

    /// The script as one paragraph followed by the query.
    pub fn to_text(&self) -> String {
        format!("{}\n\n{}", self.statements.join(" "), self.query_sentence)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedProblem {
    pub nl_ax: FormulaSet,
    pub query: Formula,
    pub source_map: Vec<(String, Formula)>,
}

struct Sentence<'a> {
    text: &'a str,
    words: Vec<String>,
    lex: &'a Lexicon,
}

impl<'a> Sentence<'a> {
    fn new(text: &'a str, lex: &'a Lexicon) -> Self {
        let body = text.trim().trim_end_matches(['.', '?']);
        let words = body
            .split_whitespace()
            .map(|w| w.trim_matches(',').to_ascii_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        Sentence { text, words, lex }
    }

    fn fail(&self, index: usize, message: &str) -> CnlError {
        CnlError {
            sentence: self.text.trim().to_string(),
            index,
            token: self
                .words
                .get(index)
                .cloned()
                .unwrap_or_else(|| "<end>".to_string()),
            message: message.to_string(),
        }
    }

    fn word(&self, i: usize) -> Option<&str> {
        self.words.get(i).map(String::as_str)
    }

    /// Longest multiword noun at `pos`; returns (singular predicate, width).
    fn noun(&self, pos: usize, plural: bool) -> Option<(String, usize)> {
        for width in (1..=3).rev() {
            if pos + width > self.words.len() {
                continue;
            }
            let sym = self.words[pos..pos + width].join("_");
            match self.lex.classify(&sym) {
                SymbolClass::PluralNoun(sg) if plural => return Some((sg, width)),
                SymbolClass::SingularNoun if !plural || self.lex.plural(&sym) == Some(&sym) => {
                    return Some((sym, width))
                }
                _ => {}
            }
        }
        None
    }

    /// Predicate for an adjective, normalizing adjective forms of nouns.
    fn adjective(&self, pos: usize) -> Option<String> {
        let w = self.word(pos)?;
        match self.lex.classify(w) {
            SymbolClass::PropertyAdjective => Some(w.to_string()),
            SymbolClass::AdjectiveForm(noun) => Some(noun),
            _ => None,
        }
    }

    /// Parse a verb phrase starting at `pos` and return (positive, predicate).
    /// The phrase must run to the end of the sentence.
    fn verb_phrase(&self, pos: usize, plural: bool) -> Result<(bool, String), CnlError> {
        let (copula, aux, conj) = if plural {
            ("are", "do", SymbolClass::VerbStem)
        } else {
            ("is", "does", SymbolClass::Verb3sg(String::new()))
        };
        let w = self
            .word(pos)
            .ok_or_else(|| self.fail(pos, "expected a verb phrase"))?;
        let (positive, pred, next) = if w == copula {
            let mut i = pos + 1;
            let positive = if self.word(i) == Some("not") {
                i += 1;
                false
            } else {
                true
            };
            if !plural && matches!(self.word(i), Some("a") | Some("an")) {
                let (noun, width) = self
                    .noun(i + 1, false)
                    .ok_or_else(|| self.fail(i + 1, "expected a singular noun"))?;
                (positive, noun, i + 1 + width)
            } else if let Some((noun, width)) = self.noun(i, true).filter(|_| plural) {
                (positive, noun, i + width)
            } else if let Some(adj) = self.adjective(i) {
                (positive, adj, i + 1)
            } else if plural {
                return Err(self.fail(i, "expected a plural noun or adjective"));
            } else {
                return Err(self.fail(i, "expected `a`/`an` or an adjective"));
            }
        } else if w == aux {
            if self.word(pos + 1) != Some("not") {
                return Err(self.fail(pos + 1, "expected `not`"));
            }
            let stem = self
                .word(pos + 2)
                .filter(|s| self.lex.classify(s) == SymbolClass::VerbStem)
                .ok_or_else(|| self.fail(pos + 2, "expected a verb stem"))?;
            (false, stem.to_string(), pos + 3)
        } else {
            match (self.lex.classify(w), conj) {
                (SymbolClass::Verb3sg(stem), SymbolClass::Verb3sg(_)) => (true, stem, pos + 1),
                (SymbolClass::VerbStem, SymbolClass::VerbStem) => (true, w.to_string(), pos + 1),
                _ => return Err(self.fail(pos, "expected a copula or verb")),
            }
        };
        if next != self.words.len() {
            return Err(self.fail(next, "unexpected trailing words"));
        }
        Ok((positive, pred))
    }

    fn parse(&self) -> Result<Formula, CnlError> {
        let first = self.word(0).ok_or_else(|| self.fail(0, "empty sentence"))?;
        let var = || Term::var(NL_VAR);
        let rule = |noun: String, positive: bool, pred: String| {
            Formula::implication(
                NL_VAR,
                vec![Literal::new(true, noun, var())],
                Literal::new(positive, pred, var()),
            )
        };
        match first {
            "each" | "every" | "any" | "a" | "an" | "no" => {
                let (noun, width) = self
                    .noun(1, false)
                    .ok_or_else(|| self.fail(1, "expected a singular noun"))?;
                let (positive, pred) = self.verb_phrase(1 + width, false)?;
                if first == "no" && !positive {
                    return Err(self.fail(1 + width, "double negation is not supported"));
                }
                Ok(rule(noun, positive && first != "no", pred))
            }
            "all" => {
                let (noun, width) = self
                    .noun(1, true)
                    .ok_or_else(|| self.fail(1, "expected a plural noun"))?;
                let (positive, pred) = self.verb_phrase(1 + width, true)?;
                Ok(rule(noun, positive, pred))
            }
            w if self.lex.classify(w) == SymbolClass::ProperNoun => {
                let (positive, pred) = self.verb_phrase(1, false)?;
                Ok(Formula::ground(Literal::new(
                    positive,
                    pred,
                    Term::constant(w),
                )))
            }
            _ => {
                let (noun, width) = self
                    .noun(0, true)
                    .ok_or_else(|| self.fail(0, "expected a determiner, plural noun or name"))?;
                let (positive, pred) = self.verb_phrase(width, true)?;
                Ok(rule(noun, positive, pred))
            }
        }
    }
}

/// Translate one controlled-English statement to its canonical formula.
pub fn nl_to_fof(sentence: &str, lex: &Lexicon) -> Result<Formula, CnlError> {
    Sentence::new(sentence, lex).parse()
}

/// Parse a `True or false: ...` sentence (the prefix is optional) into a
/// ground literal.
pub fn parse_query(sentence: &str, lex: &Lexicon) -> Result<Formula, CnlError> {
    let trimmed = sentence.trim();
    let body = if trimmed.to_ascii_lowercase().starts_with(QUERY_PREFIX) {
        &trimmed[QUERY_PREFIX.len()..]
    } else {
        trimmed
    };
    let s = Sentence::new(body, lex);
    let f = s.parse()?;
    if !f.is_ground() {
        return Err(s.fail(0, "query must be about a named individual"));
    }
    Ok(f)
}

pub fn parse_script(script: &NLScript, lex: &Lexicon) -> Result<ParsedProblem, ScriptError> {
    let mut failures = Vec::new();
    let mut nl_ax = FormulaSet::new();
    let mut source_map = Vec::new();
    for (i, s) in script.statements.iter().enumerate() {
        match nl_to_fof(s, lex) {
            Ok(f) => {
                nl_ax.insert(f.clone());
                source_map.push((s.clone(), f));
            }
            Err(e) => failures.push((i, e)),
        }
    }
    let query = parse_query(&script.query_sentence, lex);
    if let Err(e) = &query {
        failures.push((script.statements.len(), e.clone()));
    }
    if !failures.is_empty() {
        return Err(ScriptError::Sentences(failures));
    }
    Ok(ParsedProblem {
        nl_ax,
        query: query.unwrap(),
        source_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{alpha_equal, parse_fof_text};

    fn lex() -> Lexicon {
        Lexicon::builtin()
    }

    fn fof(s: &str) -> String {
        nl_to_fof(s, &lex()).unwrap().to_fof_text()
    }

    #[test]
    fn worked_example_sentences() {
        assert_eq!(
            fof("Each integer is not fruity."),
            "! [A] : (integer(A) => ~ fruity(A))"
        );
        assert_eq!(
            fof("Negative numbers are brown."),
            "! [A] : (negative_number(A) => brown(A))"
        );
        assert_eq!(fof("Wren is an integer."), "integer(wren)");
    }

    #[test]
    fn plural_and_singular_agree() {
        let a = nl_to_fof("Cats swim.", &lex()).unwrap();
        let b = nl_to_fof("Every cat swims.", &lex()).unwrap();
        let expected = parse_fof_text("! [X] : (cat(X) => swim(X))").unwrap();
        assert!(alpha_equal(&a, &expected));
        assert!(alpha_equal(&b, &expected));
    }

    #[test]
    fn determiners_and_negation() {
        assert_eq!(
            fof("Any fraction is large."),
            "! [A] : (fraction(A) => large(A))"
        );
        assert_eq!(fof("A cat is a feline."), "! [A] : (cat(A) => feline(A))");
        assert_eq!(
            fof("All fractions are integers."),
            "! [A] : (fraction(A) => integer(A))"
        );
        assert_eq!(
            fof("Fractions are not even."),
            "! [A] : (fraction(A) => ~ even_number(A))"
        );
        assert_eq!(fof("No bird swims."), "! [A] : (bird(A) => ~ swim(A))");
        assert_eq!(
            fof("Every bird does not swim."),
            "! [A] : (bird(A) => ~ swim(A))"
        );
        assert_eq!(fof("Birds do not swim."), "! [A] : (bird(A) => ~ swim(A))");
        assert_eq!(fof("Alex is not large."), "~ large(alex)");
        assert_eq!(fof("Alex is even."), "even_number(alex)");
        assert_eq!(fof("Whiskers swims."), "swim(whiskers)");
        assert_eq!(fof("Sheep are slow."), "! [A] : (sheep(A) => slow(A))");
        assert_eq!(
            fof("Even numbers are natural numbers."),
            "! [A] : (even_number(A) => natural_number(A))"
        );
    }

    #[test]
    fn reports_first_bad_token() {
        let err = nl_to_fof("Each integer is quite fruity.", &lex()).unwrap_err();
        assert_eq!(err.index, 3);
        assert_eq!(err.token, "quite");
        let err = nl_to_fof("Every glorp is large.", &lex()).unwrap_err();
        assert_eq!(err.token, "glorp");
        let err = nl_to_fof("Wren is an integer today.", &lex()).unwrap_err();
        assert_eq!(err.token, "today");
    }

    #[test]
    fn script_parsing() {
        let script = NLScript::from_text(
            "Each integer is not fruity.\nNegative numbers are brown.\nWren is an integer.\nTrue or false: Wren is not fruity.",
        )
        .unwrap();
        let p = parse_script(&script, &lex()).unwrap();
        assert_eq!(p.nl_ax.len(), 3);
        assert_eq!(p.query.to_fof_text(), "~ fruity(wren)");

        let empty = NLScript::from_text("True or false: Tom is a cat.").unwrap();
        let p = parse_script(&empty, &lex()).unwrap();
        assert!(p.nl_ax.is_empty());
        assert_eq!(p.query.to_fof_text(), "cat(tom)");
    }

    #[test]
    fn script_errors() {
        assert_eq!(
            NLScript::from_text("Cats swim."),
            Err(ScriptError::QueryCount(0))
        );
        let script = NLScript {
            statements: vec!["Cats swim.".into(), "Glorps are big.".into()],
            query_sentence: "True or false: Tom swims.".into(),
        };
        match parse_script(&script, &lex()) {
            Err(ScriptError::Sentences(f)) => {
                assert_eq!(f.len(), 1);
                assert_eq!(f[0].0, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
