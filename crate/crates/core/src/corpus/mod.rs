//! Synthetic steamroller problems: generation and JSONL storage.

pub mod corrupt;
mod generate;

use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnl::{parse_script, NLScript, ParsedProblem, ScriptError};
use crate::fol::{Formula, FormulaSet};
use crate::lexicon::Lexicon;

pub use generate::{generate, GenerateError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ontology {
    /// Chains follow real taxonomies.
    True,
    /// Chains pair classes that are not related in reality.
    False,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distractors {
    None,
    Relevant,
}

macro_rules! text_enum {
    ($t:ty { $($v:ident => $s:literal),* }) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(Self::$v => $s),* })
            }
        }

        impl FromStr for $t {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($s => Ok(Self::$v),)*
                    other => Err(format!("unknown value `{other}`")),
                }
            }
        }
    };
}

text_enum!(Ontology { True => "true", False => "false" });
text_enum!(Distractors { None => "none", Relevant => "relevant" });

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub hops: u8,
    pub ontology: Ontology,
    pub distractors: Distractors,
    pub count: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            hops: 3,
            ontology: Ontology::False,
            distractors: Distractors::Relevant,
            count: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub id: String,
    pub nl: NLScript,
    pub gold_ax: FormulaSet,
    pub query: Formula,
    pub gold_answer: bool,
    /// Membership fact and rules of the proof chain, bottom up.
    pub proof: Vec<Formula>,
    /// Absent for hand-written problems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<GeneratorConfig>,
}

impl Problem {
    /// A problem from hand-written text; the gold axioms are its parse and
    /// the answer is computed.
    pub fn from_text(id: &str, text: &str, lex: &Lexicon) -> Result<Problem, CorpusError> {
        let bad = |message: String| CorpusError::Record { index: 0, message };
        let nl = NLScript::from_text(text).map_err(|e| bad(e.to_string()))?;
        let parsed = parse_script(&nl, lex).map_err(|e| bad(e.to_string()))?;
        let mut p = Problem {
            id: id.to_string(),
            nl,
            gold_ax: parsed.nl_ax,
            query: parsed.query,
            gold_answer: false,
            proof: Vec::new(),
            config: None,
        };
        p.gold_answer = crate::reasoner::evaluate_gold(&p).map_err(|e| bad(e.to_string()))?;
        Ok(p)
    }

    pub fn parse(&self, lex: &Lexicon) -> Result<ParsedProblem, ScriptError> {
        parse_script(&self.nl, lex)
    }

    /// A faithful logic program for the problem, query last.
    pub fn gold_program(&self) -> String {
        let mut out = String::new();
        for st in crate::lp::program_from_formulas(self.gold_ax.iter()) {
            out.push_str(&st.to_string());
            out.push('\n');
        }
        if let Some(q) = crate::lp::LPStatement::query_for(&self.query, self.gold_ax.len() + 1) {
            out.push_str(&q.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("record {index}: {message}")]
    Record { index: usize, message: String },
}

/// One JSON object per line.
pub fn save(problems: &[Problem], path: &Path) -> Result<(), CorpusError> {
    let mut out = io::BufWriter::new(fs::File::create(path)?);
    for p in problems {
        let line = serde_json::to_string(p).expect("problem serializes");
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_jsonl(problems: &[Problem]) -> String {
    problems
        .iter()
        .map(|p| serde_json::to_string(p).expect("problem serializes") + "\n")
        .collect()
}

pub fn from_jsonl(text: &str) -> Result<Vec<Problem>, CorpusError> {
    read_records(text.as_bytes())
}

pub fn load(path: &Path) -> Result<Vec<Problem>, CorpusError> {
    read_records(BufReader::new(fs::File::open(path)?))
}

fn read_records(reader: impl BufRead) -> Result<Vec<Problem>, CorpusError> {
    let mut out = Vec::new();
    let mut index = 0;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p = serde_json::from_str(&line).map_err(|e| CorpusError::Record {
            index,
            message: e.to_string(),
        })?;
        out.push(p);
        index += 1;
    }
    Ok(out)
}

/// Ids of problems whose stored answer disagrees with the reasoner.
pub fn revalidate(problems: &[Problem]) -> Vec<String> {
    problems
        .iter()
        .filter(|p| crate::reasoner::evaluate_gold(p).ok() != Some(p.gold_answer))
        .map(|p| p.id.clone())
        .collect()
}
