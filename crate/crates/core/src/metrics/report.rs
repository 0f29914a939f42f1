use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::reasoner::Semantics;

use super::{
    correlation_matrix, Condition, ConditionRun, Confusion, ErrorRecord, ErrorType, EvalMetrics,
};

/// Mean number of distinct error types over the records of failed problems.
pub fn errors_per_failure(run: &ConditionRun) -> Option<f64> {
    let failed: Vec<&ErrorRecord> = run
        .outcomes
        .iter()
        .zip(&run.records)
        .filter(|(o, _)| !o.correct())
        .map(|(_, r)| r)
        .collect();
    if failed.is_empty() {
        return None;
    }
    let total: usize = failed.iter().map(|r| r.types()).sum();
    Some(total as f64 / failed.len() as f64)
}

/// Half the spread of a value across trials.
pub fn half_range(values: &[f64]) -> Option<f64> {
    let lo = values.iter().copied().reduce(f64::min)?;
    let hi = values.iter().copied().reduce(f64::max)?;
    Some((hi - lo) / 2.0)
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition: Condition,
    pub semantics: Semantics,
    pub trials: Vec<EvalMetrics>,
    pub accuracy: Option<f64>,
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub accuracy_half_range: Option<f64>,
    /// Problems with at least one error of each type, summed over trials.
    pub error_problems: Vec<(ErrorType, usize)>,
    pub errors_per_failure: Option<f64>,
}

impl ConditionSummary {
    pub fn from_runs(condition: Condition, semantics: Semantics, runs: &[ConditionRun]) -> Self {
        let trials: Vec<EvalMetrics> = runs
            .iter()
            .map(|r| Confusion::from_outcomes(&r.outcomes).metrics())
            .collect();
        let col = |f: fn(&EvalMetrics) -> Option<f64>| -> Vec<f64> {
            trials.iter().filter_map(f).collect()
        };
        let acc = col(|m| m.accuracy);
        let error_problems = ErrorType::ALL
            .iter()
            .map(|t| {
                (
                    *t,
                    runs.iter()
                        .flat_map(|r| &r.records)
                        .filter(|r| r.has(*t))
                        .count(),
                )
            })
            .collect();
        let pooled = ConditionRun {
            outcomes: runs.iter().flat_map(|r| r.outcomes.clone()).collect(),
            records: runs.iter().flat_map(|r| r.records.clone()).collect(),
        };
        ConditionSummary {
            condition,
            semantics,
            accuracy: mean(&acc),
            recall: mean(&col(|m| m.recall)),
            precision: mean(&col(|m| m.precision)),
            accuracy_half_range: if trials.len() > 1 {
                half_range(&acc)
            } else {
                None
            },
            trials,
            error_problems,
            errors_per_failure: errors_per_failure(&pooled),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub problems: usize,
    pub conditions: Vec<ConditionSummary>,
    /// Rows and columns follow `ErrorType::ALL`.
    pub correlation: Option<Vec<Vec<Option<f64>>>>,
}

impl Report {
    /// `records` feed the correlation matrix; usually those of the program
    /// conditions of one model.
    pub fn new(
        problems: usize,
        conditions: Vec<ConditionSummary>,
        records: &[ErrorRecord],
    ) -> Self {
        Report {
            problems,
            conditions,
            correlation: correlation_matrix(records).ok(),
        }
    }
}

fn pct(v: Option<f64>) -> String {
    v.map_or("n/a".to_string(), |v| format!("{:.1}", v * 100.0))
}

pub fn render_text(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "problems: {}", report.problems);
    let _ = writeln!(
        s,
        "{:<22} {:<7} {:>6} {:>6} {:>6} {:>6} {:>9}",
        "condition", "world", "acc", "±", "rec", "prec", "err/fail"
    );
    for c in &report.conditions {
        let _ = writeln!(
            s,
            "{:<22} {:<7} {:>6} {:>6} {:>6} {:>6} {:>9}",
            c.condition.name(),
            c.semantics.to_string(),
            pct(c.accuracy),
            pct(c.accuracy_half_range),
            pct(c.recall),
            pct(c.precision),
            c.errors_per_failure
                .map_or("n/a".to_string(), |v| format!("{v:.2}")),
        );
    }
    let with_errors: Vec<&ConditionSummary> = report
        .conditions
        .iter()
        .filter(|c| c.error_problems.iter().any(|(_, n)| *n > 0))
        .collect();
    if !with_errors.is_empty() {
        let _ = writeln!(s, "\nproblems with errors");
        for c in with_errors {
            let cells: Vec<String> = c
                .error_problems
                .iter()
                .map(|(t, n)| format!("{t}={n}"))
                .collect();
            let _ = writeln!(
                s,
                "  {} ({}): {}",
                c.condition,
                c.semantics,
                cells.join(" ")
            );
        }
    }
    if let Some(m) = &report.correlation {
        let _ = writeln!(s, "\nerror correlation");
        let _ = write!(s, "{:>17}", "");
        for t in ErrorType::ALL {
            let _ = write!(s, " {:>6}", &t.name()[..t.name().len().min(6)]);
        }
        s.push('\n');
        for (t, row) in ErrorType::ALL.iter().zip(m) {
            let _ = write!(s, "{:>17}", t.name());
            for v in row {
                let _ = write!(
                    s,
                    " {:>6}",
                    v.map_or("-".to_string(), |v| format!("{v:.2}"))
                );
            }
            s.push('\n');
        }
    }
    s
}

pub fn render_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}
