//! Vocabulary tables: noun number, adjective normalization, proper nouns and
//! verb stems.
//!
//! Symbols are predicate/constant names, so multiword entries such as
//! `negative number` are stored as `negative_number`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::fol::is_lower_ident;

const DEFAULT_LEXICON: &str = include_str!("../data/default.lex");

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SymbolClass {
    /// Plural form; carries the singular predicate.
    PluralNoun(String),
    SingularNoun,
    /// Adjective form of a noun; carries the normalized noun predicate.
    AdjectiveForm(String),
    /// An adjective that is a property in its own right (`fruity`).
    PropertyAdjective,
    ProperNoun,
    /// Third-person singular verb; carries the stem.
    Verb3sg(String),
    VerbStem,
    Unknown,
}

impl SymbolClass {
    fn role(&self) -> &'static str {
        match self {
            SymbolClass::PluralNoun(_) => "plural noun",
            SymbolClass::SingularNoun => "singular noun",
            SymbolClass::AdjectiveForm(_) => "adjective form",
            SymbolClass::PropertyAdjective => "adjective",
            SymbolClass::ProperNoun => "proper noun",
            SymbolClass::Verb3sg(_) => "verb",
            SymbolClass::VerbStem => "verb stem",
            SymbolClass::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("line {line}: `{symbol}` is already a {first}, cannot also be a {second}")]
    Conflict {
        line: usize,
        symbol: String,
        first: &'static str,
        second: &'static str,
    },
    #[error("line {line}: duplicate entry `{symbol}`")]
    Duplicate { line: usize, symbol: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Nouns,
    Adjectives,
    Proper,
    Verbs,
}

/// Multiword text to predicate name: `negative number` -> `negative_number`.
pub fn symbol_of(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect::<Vec<_>>()
        .join("_")
}

/// Predicate name back to surface words.
pub fn words_of(symbol: &str) -> String {
    symbol.replace('_', " ")
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    /// singular -> plural
    nouns: BTreeMap<String, String>,
    adjective_to_noun: BTreeMap<String, String>,
    properties: BTreeSet<String>,
    proper_nouns: BTreeSet<String>,
    /// third person singular -> stem
    verbs: BTreeMap<String, String>,
    index: HashMap<String, SymbolClass>,
}

impl Lexicon {
    /// The bundled steamroller vocabulary.
    pub fn builtin() -> Self {
        load_lexicon(DEFAULT_LEXICON).expect("bundled lexicon is well formed")
    }

    /// The bundled vocabulary extended with a user document.
    pub fn builtin_with(extra: &str) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::builtin();
        lex.add_document(extra)?;
        Ok(lex)
    }

    pub fn classify(&self, symbol: &str) -> SymbolClass {
        self.index
            .get(symbol)
            .cloned()
            .unwrap_or(SymbolClass::Unknown)
    }

    pub fn plural(&self, singular: &str) -> Option<&str> {
        self.nouns.get(singular).map(String::as_str)
    }

    /// Adjective forms that normalize to `noun`.
    pub fn adjective_of(&self, noun: &str) -> Option<&str> {
        self.adjective_to_noun
            .iter()
            .find(|(_, n)| n.as_str() == noun)
            .map(|(a, _)| a.as_str())
    }

    pub fn third_person(&self, stem: &str) -> Option<&str> {
        self.verbs
            .iter()
            .find(|(_, s)| s.as_str() == stem)
            .map(|(v, _)| v.as_str())
    }

    pub fn nouns(&self) -> impl Iterator<Item = (&str, &str)> {
        self.nouns.iter().map(|(s, p)| (s.as_str(), p.as_str()))
    }

    pub fn adjective_forms(&self) -> impl Iterator<Item = (&str, &str)> {
        self.adjective_to_noun
            .iter()
            .map(|(a, n)| (a.as_str(), n.as_str()))
    }

    pub fn properties(&self) -> impl Iterator<Item = &str> {
        self.properties.iter().map(String::as_str)
    }

    pub fn proper_nouns(&self) -> impl Iterator<Item = &str> {
        self.proper_nouns.iter().map(String::as_str)
    }

    pub fn verbs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.verbs.iter().map(|(v, s)| (v.as_str(), s.as_str()))
    }

    /// Predicate a symbol normalizes to in predicate position: plural nouns
    /// to singular, adjective forms to nouns, verbs to stems.
    pub fn normalize_predicate(&self, symbol: &str) -> Option<String> {
        match self.classify(symbol) {
            SymbolClass::PluralNoun(n)
            | SymbolClass::AdjectiveForm(n)
            | SymbolClass::Verb3sg(n) => Some(n),
            _ => None,
        }
    }

    fn register(
        &mut self,
        line: usize,
        symbol: &str,
        class: SymbolClass,
    ) -> Result<(), LexiconError> {
        if !is_lower_ident(symbol) {
            return Err(LexiconError::Malformed {
                line,
                message: format!("`{symbol}` is not a valid symbol"),
            });
        }
        match self.index.get(symbol) {
            None => {
                self.index.insert(symbol.to_string(), class);
                Ok(())
            }
            Some(existing) if *existing == class => Err(LexiconError::Duplicate {
                line,
                symbol: symbol.to_string(),
            }),
            Some(existing) => Err(LexiconError::Conflict {
                line,
                symbol: symbol.to_string(),
                first: existing.role(),
                second: class.role(),
            }),
        }
    }

    fn add_row(
        &mut self,
        section: Section,
        line: usize,
        cols: &[String],
    ) -> Result<(), LexiconError> {
        let malformed = |message: &str| LexiconError::Malformed {
            line,
            message: message.to_string(),
        };
        match (section, cols) {
            (Section::Nouns, [sg, pl]) => {
                self.register(line, sg, SymbolClass::SingularNoun)?;
                if pl != sg {
                    self.register(line, pl, SymbolClass::PluralNoun(sg.clone()))?;
                }
                self.nouns.insert(sg.clone(), pl.clone());
            }
            (Section::Nouns, _) => return Err(malformed("noun rows are `singular,plural`")),
            (Section::Adjectives, [adj]) => {
                self.register(line, adj, SymbolClass::PropertyAdjective)?;
                self.properties.insert(adj.clone());
            }
            (Section::Adjectives, [adj, noun]) => {
                if !is_lower_ident(noun) {
                    return Err(malformed(&format!(
                        "`{noun}` is not a valid predicate name"
                    )));
                }
                self.register(line, adj, SymbolClass::AdjectiveForm(noun.clone()))?;
                self.adjective_to_noun.insert(adj.clone(), noun.clone());
            }
            (Section::Adjectives, _) => {
                return Err(malformed(
                    "adjective rows are `adjective` or `adjective,noun`",
                ))
            }
            (Section::Proper, [name]) => {
                self.register(line, name, SymbolClass::ProperNoun)?;
                self.proper_nouns.insert(name.clone());
            }
            (Section::Proper, _) => return Err(malformed("proper noun rows have one column")),
            (Section::Verbs, [third, stem]) => {
                self.register(line, third, SymbolClass::Verb3sg(stem.clone()))?;
                self.register(line, stem, SymbolClass::VerbStem)?;
                self.verbs.insert(third.clone(), stem.clone());
            }
            (Section::Verbs, _) => return Err(malformed("verb rows are `third_person,stem`")),
        }
        Ok(())
    }

    fn add_document(&mut self, source: &str) -> Result<(), LexiconError> {
        let mut section = None;
        for (i, raw) in source.lines().enumerate() {
            let line = i + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            if let Some(name) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
                section = Some(match name.trim() {
                    "nouns" => Section::Nouns,
                    "adjectives" => Section::Adjectives,
                    "proper" => Section::Proper,
                    "verbs" => Section::Verbs,
                    other => {
                        return Err(LexiconError::Malformed {
                            line,
                            message: format!("unknown section `{other}`"),
                        })
                    }
                });
                continue;
            }
            let Some(section) = section else {
                return Err(LexiconError::Malformed {
                    line,
                    message: "entry before any section header".into(),
                });
            };
            let cols: Vec<String> = text.split(',').map(symbol_of).collect();
            if cols.iter().any(String::is_empty) {
                return Err(LexiconError::Malformed {
                    line,
                    message: "empty column".into(),
                });
            }
            self.add_row(section, line, &cols)?;
        }
        Ok(())
    }
}

/// Load a lexicon document (`[nouns]`, `[adjectives]`, `[proper]`, `[verbs]`
/// sections of comma-separated rows, `#` comments).
pub fn load_lexicon(source: &str) -> Result<Lexicon, LexiconError> {
    let mut lex = Lexicon::default();
    lex.add_document(source)?;
    Ok(lex)
}
