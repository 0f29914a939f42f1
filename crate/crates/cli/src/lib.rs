//! The `sedac` command line: problem generation, translation with a chat
//! model (live, replayed or synthetic), syntax repair, statement checking,
//! query answering and whole-condition evaluation.

pub mod check;
pub mod eval;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use sedac_core::corpus::{self, generate, Distractors, GeneratorConfig, Ontology, Problem};
use sedac_core::lp::{fix_syntax, RepairTable};
use sedac_core::metrics::{solve, Condition, ResponseSource};
use sedac_core::reasoner::{answer, evaluate_gold, Semantics};
use sedac_core::Lexicon;
use sedac_llm::{
    ChatClient, EndpointConfig, PromptMode, TranscriptStore, Translator, SYNTHETIC_MODEL,
};
use serde::Serialize;
use thiserror::Error;

use crate::eval::{EvalOutput, EvalSettings, Grouping};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} requires --replay-dir")]
    NeedsReplayDir(&'static str),
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Client(#[from] sedac_llm::ClientError),
    #[error(transparent)]
    Store(#[from] sedac_llm::StoreError),
    #[error("{failed} of {total} translations failed; first: {first}")]
    Translate {
        failed: usize,
        total: usize,
        first: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "sedac",
    version,
    about = "Check, repair and evaluate logic-program translations of steamroller problems"
)]
pub struct Cli {
    /// Extra lexicon entries, merged over the builtin lexicon.
    #[arg(long, global = true, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
    /// open or closed. eval runs both when unset; answer defaults to open.
    #[arg(long, global = true)]
    pub semantics: Option<Semantics>,
    /// Pipeline condition for `answer` (e.g. one-shot+full).
    #[arg(long, global = true)]
    pub condition: Option<Condition>,
    /// Transcript store used by translate and eval.
    #[arg(long, global = true, value_name = "DIR")]
    pub replay_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Exit with status 1 if an invariant is violated.
    #[arg(long, global = true)]
    pub check: bool,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Syntax repair table replacing the default one.
    #[arg(long, global = true, value_name = "FILE")]
    pub repair_table: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a problem set as JSON lines.
    Generate {
        #[arg(long, default_value_t = 3)]
        hops: u8,
        #[arg(long, default_value = "false")]
        ontology: Ontology,
        #[arg(long, default_value = "relevant")]
        distractors: Distractors,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Record model responses for a problem set into --replay-dir.
    Translate {
        #[arg(long, value_name = "FILE")]
        problems: PathBuf,
        /// Prompt mode; repeat for several.
        #[arg(long = "mode", default_value = "one-shot")]
        modes: Vec<PromptMode>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Endpoint config (TOML) for a live model.
        #[arg(long, value_name = "FILE", conflicts_with = "synthetic")]
        endpoint: Option<PathBuf>,
        /// Use the deterministic synthetic model.
        #[arg(long)]
        synthetic: bool,
        #[arg(long, default_value_t = 4)]
        workers: usize,
    },
    /// Repair the syntax of a logic program and show the log.
    Fix { file: PathBuf },
    /// Check each statement of a program against a problem text.
    Check {
        #[arg(long, value_name = "FILE")]
        nl: PathBuf,
        #[arg(long, value_name = "FILE")]
        program: PathBuf,
    },
    /// Answer a problem's query, from its text or from a program.
    Answer {
        #[arg(long, value_name = "FILE")]
        nl: PathBuf,
        #[arg(long, value_name = "FILE")]
        program: Option<PathBuf>,
    },
    /// Evaluate conditions over recorded transcripts.
    Eval {
        /// Defaults to problems.jsonl in the replay dir.
        #[arg(long, value_name = "FILE")]
        problems: Option<PathBuf>,
        /// Model whose transcripts to use; repeat for several.
        #[arg(long = "model", default_value = SYNTHETIC_MODEL)]
        models: Vec<String>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        /// Comma-separated; all conditions when unset.
        #[arg(long, value_delimiter = ',')]
        conditions: Vec<Condition>,
        /// Report each model separately or pool them.
        #[arg(long, default_value = "per-model")]
        group: Grouping,
        /// Only problems the syntax-repaired program answers wrongly.
        #[arg(long)]
        divergent: bool,
        /// With --check, the accuracy gain required at each repair step, in points.
        #[arg(long, default_value_t = 0.0)]
        min_step: f64,
    },
    /// Render a JSON report written by `eval --format json`.
    Report {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        min_step: f64,
    },
}

/// What a command produced: the document to print and any invariant
/// violations (only acted on under --check).
#[derive(Debug, Default)]
pub struct Output {
    pub text: String,
    pub violations: Vec<String>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn lexicon(cli: &Cli) -> Result<Lexicon, CliError> {
    match &cli.lexicon {
        None => Ok(Lexicon::builtin()),
        Some(p) => Lexicon::builtin_with(&read(p)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
    }
}

fn repair_table(cli: &Cli) -> Result<RepairTable, CliError> {
    match &cli.repair_table {
        None => Ok(RepairTable::default()),
        Some(p) => RepairTable::parse(&read(p)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
    }
}

fn problem_from_file(path: &Path, lex: &Lexicon) -> Result<Problem, CliError> {
    let id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("problem");
    Ok(Problem::from_text(id, &read(path)?, lex)?)
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let lex = lexicon(cli)?;
    let table = repair_table(cli)?;
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Generate {
            hops,
            ontology,
            distractors,
            count,
        } => {
            let cfg = GeneratorConfig {
                hops: *hops,
                ontology: *ontology,
                distractors: *distractors,
                count: *count,
                seed: cli.seed.unwrap_or(0),
            };
            let problems = generate(&cfg, &lex).map_err(|e| CliError::Input(e.to_string()))?;
            Ok(Output {
                text: corpus::to_jsonl(&problems),
                violations: corpus::revalidate(&problems)
                    .into_iter()
                    .map(|id| format!("{id}: stored answer disagrees with the reasoner"))
                    .collect(),
            })
        }
        Command::Translate {
            problems,
            modes,
            trials,
            endpoint,
            synthetic,
            workers,
        } => {
            let dir = cli
                .replay_dir
                .as_ref()
                .ok_or(CliError::NeedsReplayDir("translate"))?;
            let problems = corpus::load(problems)?;
            let store = TranscriptStore::open(dir)?;
            let translator = if *synthetic {
                Translator::synthetic(store, cli.seed.unwrap_or(0), lex.clone())
            } else {
                let config = match endpoint {
                    Some(p) => EndpointConfig::load(p)?,
                    None => EndpointConfig::default(),
                };
                Translator::live(ChatClient::from_env(config)?, store)
            };
            let mut total = 0;
            let mut errors = Vec::new();
            for &mode in modes {
                for trial in 0..*trials {
                    for r in translator.translate_batch(&problems, mode, trial, *workers) {
                        total += 1;
                        if let Err(e) = r {
                            errors.push(e.to_string());
                        }
                    }
                }
            }
            if let Some(first) = errors.first() {
                return Err(CliError::Translate {
                    failed: errors.len(),
                    total,
                    first: first.clone(),
                });
            }
            Ok(Output {
                text: format!(
                    "{total} transcripts for model {} in {}\n",
                    translator.model(),
                    dir.display()
                ),
                violations: Vec::new(),
            })
        }
        Command::Fix { file } => {
            let (cleaned, log) = fix_syntax(&read(file)?, &table);
            let text = if json {
                to_json(&serde_json::json!({ "program": cleaned, "log": log }))
            } else {
                let mut s = cleaned;
                for e in &log.entries {
                    let labels: Vec<String> = e.labels.iter().map(|l| l.to_string()).collect();
                    s.push_str(&format!(
                        "% line {}: {} {}\n",
                        e.line,
                        labels.join(","),
                        action_text(&e.action)
                    ));
                }
                s
            };
            Ok(Output {
                text,
                violations: Vec::new(),
            })
        }
        Command::Check { nl, program } => {
            let r = check::check(&read(nl)?, &read(program)?, &lex, &table)?;
            Ok(Output {
                text: if json {
                    to_json(&r)
                } else {
                    check::render_text(&r)
                },
                violations: r.violations(),
            })
        }
        Command::Answer { nl, program } => {
            let problem = problem_from_file(nl, &lex)?;
            let semantics = cli.semantics.unwrap_or(Semantics::Open);
            let verdict = match program {
                Some(p) => {
                    let condition = cli.condition.unwrap_or(Condition::Full);
                    solve(&problem, &read(p)?, condition, semantics, &lex, &table)
                        .map_err(CliError::Input)?
                }
                None => {
                    answer(&problem.gold_ax, &problem.query, semantics)
                        .map_err(|e| CliError::Input(e.to_string()))?
                        .answer
                }
            };
            let gold = evaluate_gold(&problem).map_err(|e| CliError::Input(e.to_string()))?;
            let text = if json {
                to_json(
                    &serde_json::json!({ "answer": verdict, "semantics": semantics, "text_answer": gold }),
                )
            } else {
                format!("{}\n", if verdict { "True" } else { "False" })
            };
            let violations = if program.is_none() && verdict != gold {
                vec![format!(
                    "{semantics}-world answer {verdict} differs from the text's {gold}"
                )]
            } else {
                Vec::new()
            };
            Ok(Output { text, violations })
        }
        Command::Eval {
            problems,
            models,
            trials,
            conditions,
            group,
            divergent,
            min_step,
        } => {
            let dir = cli
                .replay_dir
                .as_ref()
                .ok_or(CliError::NeedsReplayDir("eval"))?;
            let path = problems
                .clone()
                .unwrap_or_else(|| dir.join("problems.jsonl"));
            let problems = corpus::load(&path)?;
            let translators = models
                .iter()
                .map(|m| Ok(Translator::replay(TranscriptStore::open(dir)?, m)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let sources: Vec<(String, &dyn ResponseSource)> = translators
                .iter()
                .map(|t| (t.model().to_string(), t as &dyn ResponseSource))
                .collect();
            let settings = EvalSettings {
                conditions: if conditions.is_empty() {
                    Condition::ALL.to_vec()
                } else {
                    conditions.clone()
                },
                semantics: match cli.semantics {
                    Some(s) => vec![s],
                    None => vec![Semantics::Open, Semantics::Closed],
                },
                trials: *trials,
                divergent: *divergent,
                lex: &lex,
                table: &table,
            };
            let out = eval::evaluate(&problems, &sources, *group, &settings);
            Ok(render_eval(&out, json, *min_step))
        }
        Command::Report { input, min_step } => {
            let out: EvalOutput = serde_json::from_str(&read(input)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
            Ok(render_eval(&out, json, *min_step))
        }
    }
}

fn render_eval(out: &EvalOutput, json: bool, min_step: f64) -> Output {
    Output {
        text: if json {
            to_json(out)
        } else {
            eval::render_text(out)
        },
        violations: eval::violations(out, min_step / 100.0),
    }
}

fn action_text(a: &sedac_core::lp::RepairAction) -> String {
    match a {
        sedac_core::lp::RepairAction::Fixed { before, after } => {
            format!("fixed `{before}` -> `{after}`")
        }
        sedac_core::lp::RepairAction::Dropped { text } => format!("dropped `{text}`"),
    }
}

/// Write the output where --out says.
pub fn emit(cli: &Cli, out: &Output) -> Result<(), CliError> {
    match &cli.out {
        Some(p) => fs::write(p, &out.text).map_err(|source| CliError::Io {
            path: p.clone(),
            source,
        }),
        None => {
            print!("{}", out.text);
            Ok(())
        }
    }
}
