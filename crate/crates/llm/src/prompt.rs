use std::fmt;
use std::str::FromStr;

use sedac_core::corpus::Problem;
use sedac_core::metrics::Condition;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PromptMode {
    Baseline,
    ZeroShot,
    OneShot,
    ChainOfThoughtOneShot,
}

impl PromptMode {
    pub const ALL: [PromptMode; 4] = [
        PromptMode::Baseline,
        PromptMode::ZeroShot,
        PromptMode::OneShot,
        PromptMode::ChainOfThoughtOneShot,
    ];

    /// The prompt whose response a condition consumes. All repair
    /// conditions reuse the one-shot transcripts.
    pub fn for_condition(c: Condition) -> PromptMode {
        match c {
            Condition::Baseline => PromptMode::Baseline,
            Condition::ZeroShot => PromptMode::ZeroShot,
            _ => PromptMode::OneShot,
        }
    }

    pub fn needs_example(self) -> bool {
        matches!(
            self,
            PromptMode::OneShot | PromptMode::ChainOfThoughtOneShot
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            PromptMode::Baseline => "baseline",
            PromptMode::ZeroShot => "zero-shot",
            PromptMode::OneShot => "one-shot",
            PromptMode::ChainOfThoughtOneShot => "cot-one-shot",
        }
    }
}

impl fmt::Display for PromptMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PromptMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PromptMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown prompt mode `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("{0} prompt needs a worked example")]
    MissingExample(PromptMode),
    #[error("template must contain `{{problem}}` exactly once")]
    Placeholder,
}

pub const PROBLEM_SLOT: &str = "{problem}";
pub const EXAMPLE_SLOT: &str = "{example}";

const RULES: &str = "**Format and Rules:**
- Specific statements become facts: 'Whiskers is a cat' -> 'cat(whiskers).'
- General 'is a' statements become rules: 'All cats are birds' -> 'bird(X) :- cat(X).'
- Use '\\+' for negations: 'No bird swims' -> '\\+swims(X) :- bird(X).'
- Frame queries with '?-': 'Does Whiskers swim?' -> '?- swims(whiskers).'
";

pub const CAT_BIRD_EXAMPLE: &str = "**Example:**
English: 'All cats are birds. No bird swims. Whiskers is a cat. Does Whiskers swim?'
Problog: cat(whiskers).
bird(X) :- cat(X).
\\+swims(X) :- bird(X).
?- swims(whiskers).
";

pub const CAT_BIRD_REASONING: &str = "**Example:**
English: 'All cats are birds. No bird swims. Whiskers is a cat. True or false: Whiskers swims.'
Reasoning: Whiskers is a cat. All cats are birds, so Whiskers is a bird. No bird swims, so Whiskers does not swim.
Answer: False
";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub mode: PromptMode,
    /// Contains `{problem}` once and, for example-based modes, `{example}`.
    pub instruction: String,
    pub example: Option<String>,
}

impl PromptTemplate {
    pub fn builtin(mode: PromptMode) -> Self {
        let (instruction, example) = match mode {
            PromptMode::Baseline => (
                "Read the statements below and decide whether the final claim follows from them.\n\
                 Reply with a single word, 'True' or 'False'.\n\
                 Statements: '{problem}'\n\
                 Answer:"
                    .to_string(),
                None,
            ),
            PromptMode::ZeroShot => (
                format!(
                    "Convert the given English statements into a Prolog program.\n\
                     Use the format and rules below. \n{RULES}\
                     Now, convert the following statements into a Prolog program:\n\
                     Question: '{{problem}}'\n\
                     Problog Program:"
                ),
                None,
            ),
            PromptMode::OneShot => (
                format!(
                    "Convert the given English statements into a Prolog program.\n\
                     Use the format and rules below, including an example for guidance. \n{RULES}\n\
                     {{example}}\
                     Now, convert the following statements into a Prolog program:\n\
                     Question: '{{problem}}'\n\
                     Problog Program:"
                ),
                Some(CAT_BIRD_EXAMPLE.to_string()),
            ),
            PromptMode::ChainOfThoughtOneShot => (
                "Answer the question about the English statements below.\n\
                 Reason step by step, then give the answer as 'True' or 'False' on the last line.\n\n\
                 {example}\
                 Now answer the following:\n\
                 English: '{problem}'\n\
                 Reasoning:"
                    .to_string(),
                Some(CAT_BIRD_REASONING.to_string()),
            ),
        };
        PromptTemplate {
            mode,
            instruction,
            example,
        }
    }

    pub fn render(&self, problem: &Problem) -> Result<String, PromptError> {
        if self.instruction.matches(PROBLEM_SLOT).count() != 1 {
            return Err(PromptError::Placeholder);
        }
        let example = match (&self.example, self.mode.needs_example()) {
            (Some(e), _) => e.as_str(),
            (None, true) => return Err(PromptError::MissingExample(self.mode)),
            (None, false) => "",
        };
        let text = problem_text(problem);
        // fill the example first so problem text is never rescanned
        Ok(self
            .instruction
            .replace(EXAMPLE_SLOT, example)
            .replacen(PROBLEM_SLOT, &text, 1))
    }
}

/// Statements and query as one line.
pub fn problem_text(problem: &Problem) -> String {
    let mut parts = problem.nl.statements.clone();
    parts.push(problem.nl.query_sentence.clone());
    parts.join(" ")
}

pub fn render_prompt(mode: PromptMode, problem: &Problem) -> Result<String, PromptError> {
    PromptTemplate::builtin(mode).render(problem)
}
