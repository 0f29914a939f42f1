use std::fmt::Write;
use std::str::FromStr;

use sedac_core::corpus::Problem;
use sedac_core::lp::RepairTable;
use sedac_core::metrics::{
    render_text as render_report, run_condition, Condition, ConditionRun, ConditionSummary,
    ErrorRecord, Report, ResponseSource,
};
use sedac_core::reasoner::Semantics;
use sedac_core::Lexicon;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    /// One report per model.
    PerModel,
    /// All models' outcomes in one report.
    Pooled,
}

impl FromStr for Grouping {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-model" => Ok(Grouping::PerModel),
            "pooled" => Ok(Grouping::Pooled),
            other => Err(format!(
                "unknown grouping `{other}` (expected per-model or pooled)"
            )),
        }
    }
}

pub struct EvalSettings<'a> {
    pub conditions: Vec<Condition>,
    pub semantics: Vec<Semantics>,
    pub trials: usize,
    /// Keep only problems the syntax-repaired one-shot program gets wrong.
    pub divergent: bool,
    pub lex: &'a Lexicon,
    pub table: &'a RepairTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub name: String,
    pub report: Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutput {
    pub groups: Vec<GroupReport>,
}

/// Runs of every (condition, semantics) pair for one model, trial by trial.
struct ModelRuns {
    problems: usize,
    runs: Vec<((Condition, Semantics), Vec<ConditionRun>)>,
    records: Vec<ErrorRecord>,
}

fn divergent_subset(
    problems: &[Problem],
    source: &dyn ResponseSource,
    s: &EvalSettings,
) -> Vec<Problem> {
    let run = run_condition(
        problems,
        Condition::SyntaxFix,
        Semantics::Open,
        source,
        s.lex,
        s.table,
        0,
    );
    problems
        .iter()
        .zip(&run.outcomes)
        .filter(|(_, o)| !o.correct())
        .map(|(p, _)| p.clone())
        .collect()
}

fn run_model(problems: &[Problem], source: &dyn ResponseSource, s: &EvalSettings) -> ModelRuns {
    let subset;
    let problems = if s.divergent {
        subset = divergent_subset(problems, source, s);
        &subset[..]
    } else {
        problems
    };
    let mut runs = Vec::new();
    let mut records = Vec::new();
    for &c in &s.conditions {
        for &sem in &s.semantics {
            let trials: Vec<ConditionRun> = (0..s.trials)
                .map(|t| run_condition(problems, c, sem, source, s.lex, s.table, t))
                .collect();
            // each transcript once: program prompts under the first semantics
            if matches!(c, Condition::ZeroShot | Condition::OneShot) && sem == s.semantics[0] {
                records.extend(trials.iter().flat_map(|r| r.records.iter().cloned()));
            }
            runs.push(((c, sem), trials));
        }
    }
    ModelRuns {
        problems: problems.len(),
        runs,
        records,
    }
}

fn summarize(models: &[ModelRuns]) -> Report {
    let first = &models[0];
    let mut summaries = Vec::new();
    for (i, ((c, sem), _)) in first.runs.iter().enumerate() {
        // trial k of the pooled run is the union of every model's trial k
        let trials = first.runs[i].1.len();
        let pooled: Vec<ConditionRun> = (0..trials)
            .map(|t| {
                let mut run = ConditionRun::default();
                for m in models {
                    run.outcomes.extend(m.runs[i].1[t].outcomes.iter().cloned());
                    run.records.extend(m.runs[i].1[t].records.iter().cloned());
                }
                run
            })
            .collect();
        summaries.push(ConditionSummary::from_runs(*c, *sem, &pooled));
    }
    let records: Vec<ErrorRecord> = models
        .iter()
        .flat_map(|m| m.records.iter().cloned())
        .collect();
    Report::new(models.iter().map(|m| m.problems).sum(), summaries, &records)
}

pub fn evaluate(
    problems: &[Problem],
    sources: &[(String, &dyn ResponseSource)],
    grouping: Grouping,
    settings: &EvalSettings,
) -> EvalOutput {
    let runs: Vec<(String, ModelRuns)> = sources
        .iter()
        .map(|(name, src)| (name.clone(), run_model(problems, *src, settings)))
        .collect();
    let groups = match grouping {
        Grouping::PerModel => runs
            .iter()
            .map(|(name, m)| GroupReport {
                name: name.clone(),
                report: summarize(std::slice::from_ref(m)),
            })
            .collect(),
        Grouping::Pooled => {
            let (names, models): (Vec<String>, Vec<ModelRuns>) = runs.into_iter().unzip();
            vec![GroupReport {
                name: names.join("+"),
                report: summarize(&models),
            }]
        }
    };
    EvalOutput { groups }
}

/// Repair conditions in the order they should raise accuracy.
pub const LADDER: [Condition; 4] = [
    Condition::OneShot,
    Condition::SyntaxFix,
    Condition::Partial,
    Condition::Full,
];

/// Steps up the ladder that gain less than `min_step` accuracy (a fraction;
/// 0 only forbids drops).
pub fn violations(out: &EvalOutput, min_step: f64) -> Vec<String> {
    let mut v = Vec::new();
    for g in &out.groups {
        let sems: Vec<Semantics> = g.report.conditions.iter().map(|c| c.semantics).collect();
        for sem in [Semantics::Open, Semantics::Closed] {
            if !sems.contains(&sem) {
                continue;
            }
            let acc = |c: Condition| {
                g.report
                    .conditions
                    .iter()
                    .find(|s| s.condition == c && s.semantics == sem)
                    .and_then(|s| s.accuracy)
            };
            for w in LADDER.windows(2) {
                if let (Some(a), Some(b)) = (acc(w[0]), acc(w[1])) {
                    // small slack so an exact min_step is not lost to rounding
                    if b - a < min_step - 1e-9 {
                        v.push(format!(
                            "{} ({sem}): accuracy goes from {} {:.3} to {} {:.3}",
                            g.name, w[0], a, w[1], b
                        ));
                    }
                }
            }
        }
    }
    v
}

pub fn render_text(out: &EvalOutput) -> String {
    let mut s = String::new();
    for g in &out.groups {
        let _ = writeln!(s, "== {} ==", g.name);
        s.push_str(&render_report(&g.report));
        s.push('\n');
    }
    s
}
