//! Deterministic stand-in for a model: responses built from the gold
//! program with seeded syntax and semantic errors.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sedac_core::corpus::corrupt::{apply, render, Corruption};
use sedac_core::corpus::Problem;
use sedac_core::fol::Formula;
use sedac_core::Lexicon;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::prompt::{render_prompt, PromptMode};
use crate::transcript::Transcript;

pub const SYNTHETIC_MODEL: &str = "synthetic";

/// Per-response probabilities of each error class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMix {
    pub communication: f64,
    pub symbol: f64,
    pub knowledge: f64,
    pub natural_language: f64,
    pub other_syntax: f64,
    /// A rewrite-class corruption of one proof statement.
    pub shallow: f64,
    /// A negation flip or reversal of one proof statement.
    pub deep: f64,
    /// A proof statement left out entirely.
    pub omission: f64,
    /// Baseline answers only.
    pub wrong_answer: f64,
}

impl ErrorMix {
    pub fn for_mode(mode: PromptMode) -> Self {
        match mode {
            PromptMode::ZeroShot => ErrorMix {
                communication: 0.40,
                symbol: 0.25,
                knowledge: 0.10,
                natural_language: 0.20,
                other_syntax: 0.05,
                shallow: 0.35,
                deep: 0.30,
                omission: 0.08,
                wrong_answer: 0.0,
            },
            PromptMode::OneShot => ErrorMix {
                communication: 0.15,
                symbol: 0.12,
                knowledge: 0.08,
                natural_language: 0.08,
                other_syntax: 0.04,
                shallow: 0.36,
                deep: 0.28,
                omission: 0.05,
                wrong_answer: 0.0,
            },
            PromptMode::Baseline => ErrorMix {
                wrong_answer: 0.35,
                ..ErrorMix::none()
            },
            PromptMode::ChainOfThoughtOneShot => ErrorMix {
                wrong_answer: 0.15,
                ..ErrorMix::none()
            },
        }
    }

    pub fn none() -> Self {
        ErrorMix {
            communication: 0.0,
            symbol: 0.0,
            knowledge: 0.0,
            natural_language: 0.0,
            other_syntax: 0.0,
            shallow: 0.0,
            deep: 0.0,
            omission: 0.0,
            wrong_answer: 0.0,
        }
    }
}

fn rng_for(problem_id: &str, mode: PromptMode, trial: usize, seed: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(problem_id.as_bytes());
    h.update([0]);
    h.update(mode.name().as_bytes());
    h.update([0]);
    h.update(trial.to_le_bytes());
    h.update(seed.to_le_bytes());
    let digest = h.finalize();
    let mut s = [0u8; 32];
    s.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(s)
}

fn answer_text(answer: bool, rng: &mut ChaCha8Rng) -> String {
    let word = if answer { "True" } else { "False" };
    match rng.gen_range(0..3) {
        0 => word.to_string(),
        1 => format!("{word}."),
        _ => format!("The answer is {word}."),
    }
}

/// Apply `class` to one of the proof statements not yet touched.
fn corrupt_proof(
    formulas: &mut [Formula],
    proof: &[usize],
    touched: &mut Vec<usize>,
    classes: &[Corruption],
    lex: &Lexicon,
    rng: &mut ChaCha8Rng,
) {
    let mut slots: Vec<usize> = proof
        .iter()
        .copied()
        .filter(|i| !touched.contains(i))
        .collect();
    slots.shuffle(rng);
    for i in slots {
        let mut cs = classes.to_vec();
        cs.shuffle(rng);
        for c in cs {
            if let Some(bad) = apply(c, &formulas[i], lex, rng) {
                formulas[i] = bad;
                touched.push(i);
                return;
            }
        }
    }
}

fn program_response(
    problem: &Problem,
    mix: &ErrorMix,
    lex: &Lexicon,
    rng: &mut ChaCha8Rng,
) -> String {
    let mut formulas: Vec<Formula> = problem.gold_ax.iter().cloned().collect();
    let proof: Vec<usize> = problem
        .proof
        .iter()
        .filter_map(|p| formulas.iter().position(|f| f.alpha_equal(p)))
        .collect();
    let mut touched = Vec::new();
    if rng.gen_bool(mix.shallow) {
        corrupt_proof(
            &mut formulas,
            &proof,
            &mut touched,
            &Corruption::REWRITE,
            lex,
            rng,
        );
    }
    if rng.gen_bool(mix.deep) {
        corrupt_proof(
            &mut formulas,
            &proof,
            &mut touched,
            &Corruption::DERIVATION,
            lex,
            rng,
        );
    }
    let mut omitted = None;
    if rng.gen_bool(mix.omission) {
        omitted = proof
            .iter()
            .copied()
            .filter(|i| !touched.contains(i))
            .collect::<Vec<_>>()
            .choose(rng)
            .copied();
    }
    let kept: Vec<Formula> = formulas
        .into_iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != omitted)
        .map(|(_, f)| f)
        .collect();
    let mut lines: Vec<String> = render(&kept, &problem.query)
        .lines()
        .map(str::to_string)
        .collect();

    if rng.gen_bool(mix.symbol) {
        let n = lines.len();
        let query = &mut lines[n - 1];
        match rng.gen_range(0..3) {
            0 => *query = query.replacen("?-", "-?", 1),
            1 => *query = query.trim_end_matches('.').to_string(),
            _ => {
                if let Some(rule) = lines.iter_mut().find(|l| l.contains(":-")) {
                    *rule = rule.replacen(":-", ":=", 1);
                }
            }
        }
    }
    let subject = problem
        .query
        .constants()
        .first()
        .map(|c| c.to_string())
        .unwrap_or_default();
    let stray = |rng: &mut ChaCha8Rng, lines: &Vec<String>| {
        rng.gen_range(0..lines.len().saturating_sub(1).max(1))
    };
    if rng.gen_bool(mix.knowledge) {
        let at = stray(rng, &lines);
        lines.insert(at, "even(X) :- number(X), X mod 2 =:= 0.".to_string());
    }
    if rng.gen_bool(mix.other_syntax) {
        let at = stray(rng, &lines);
        lines.insert(at, "number(X :- integer(X).".to_string());
    }
    if rng.gen_bool(mix.natural_language) {
        let pred = problem
            .query
            .predicates()
            .first()
            .map(|p| p.replace('_', " "))
            .unwrap_or_default();
        lines.push(format!("{subject} is {pred}."));
    }
    if rng.gen_bool(mix.communication) {
        if rng.gen_bool(0.5) {
            lines.insert(0, "```prolog".to_string());
            lines.push("```".to_string());
        } else {
            lines.insert(0, "Here is the Prolog program:".to_string());
        }
    }
    lines.join("\n") + "\n"
}

/// The synthetic model's response. Deterministic in all arguments.
pub fn synthetic_response(
    problem: &Problem,
    mode: PromptMode,
    trial: usize,
    seed: u64,
    lex: &Lexicon,
) -> String {
    let mix = ErrorMix::for_mode(mode);
    let mut rng = rng_for(&problem.id, mode, trial, seed);
    match mode {
        PromptMode::Baseline => {
            let wrong = rng.gen_bool(mix.wrong_answer);
            answer_text(problem.gold_answer != wrong, &mut rng)
        }
        PromptMode::ChainOfThoughtOneShot => {
            let wrong = rng.gen_bool(mix.wrong_answer);
            let steps: Vec<String> = problem.proof.iter().map(|f| f.to_fof_text()).collect();
            format!(
                "Following the chain {}.\nAnswer: {}\n",
                steps.join(", then "),
                if problem.gold_answer != wrong {
                    "True"
                } else {
                    "False"
                }
            )
        }
        PromptMode::ZeroShot | PromptMode::OneShot => {
            program_response(problem, &mix, lex, &mut rng)
        }
    }
}

pub fn synthetic_transcript(
    problem: &Problem,
    mode: PromptMode,
    trial: usize,
    seed: u64,
    lex: &Lexicon,
) -> Transcript {
    Transcript {
        problem_id: problem.id.clone(),
        mode,
        model: SYNTHETIC_MODEL.to_string(),
        trial,
        prompt: render_prompt(mode, problem).expect("builtin templates render"),
        response: synthetic_response(problem, mode, trial, seed, lex),
        timestamp: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sedac_core::corpus::{generate, GeneratorConfig};
    use sedac_core::lp::{read_program, RepairTable};
    use sedac_core::metrics::parse_baseline_answer;

    fn problems() -> Vec<Problem> {
        let cfg = GeneratorConfig {
            count: 40,
            seed: 2,
            ..Default::default()
        };
        generate(&cfg, &Lexicon::builtin()).unwrap()
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let lex = Lexicon::builtin();
        let ps = problems();
        let a: Vec<String> = ps
            .iter()
            .map(|p| synthetic_response(p, PromptMode::OneShot, 0, 1, &lex))
            .collect();
        let b: Vec<String> = ps
            .iter()
            .map(|p| synthetic_response(p, PromptMode::OneShot, 0, 1, &lex))
            .collect();
        let c: Vec<String> = ps
            .iter()
            .map(|p| synthetic_response(p, PromptMode::OneShot, 1, 1, &lex))
            .collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn error_free_mix_gives_gold_program() {
        let lex = Lexicon::builtin();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for p in problems() {
            assert_eq!(
                program_response(&p, &ErrorMix::none(), &lex, &mut rng),
                p.gold_program()
            );
        }
    }

    #[test]
    fn one_shot_mix_shows_every_syntax_class() {
        let lex = Lexicon::builtin();
        let table = RepairTable::default();
        let mut seen = std::collections::BTreeSet::new();
        for p in problems() {
            for trial in 0..3 {
                let raw = synthetic_response(&p, PromptMode::ZeroShot, trial, 0, &lex);
                for e in read_program(&raw, &table).log.entries {
                    seen.extend(e.labels);
                }
            }
        }
        assert_eq!(seen.len(), 5, "{seen:?}");
    }

    #[test]
    fn baseline_answers_parse() {
        let lex = Lexicon::builtin();
        let ps = problems();
        let correct = ps
            .iter()
            .filter(|p| {
                parse_baseline_answer(&synthetic_response(p, PromptMode::Baseline, 0, 0, &lex))
                    == Some(p.gold_answer)
            })
            .count();
        assert!(correct > 15 && correct < 40, "{correct}");
        for p in &ps {
            let cot = synthetic_response(p, PromptMode::ChainOfThoughtOneShot, 0, 0, &lex);
            assert!(cot.lines().last().unwrap().starts_with("Answer: "));
        }
    }
}
