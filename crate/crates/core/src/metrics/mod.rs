//! Evaluation: running conditions, confusion metrics, error taxonomy
//! statistics and reports.

mod pipeline;
mod report;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::SyntaxErrorKind;

pub use pipeline::{
    classify_errors, parse_baseline_answer, run_condition, solve, Condition, ConditionRun, Outcome,
    ResponseSource,
};
pub use report::{
    errors_per_failure, half_range, render_json, render_text, ConditionSummary, Report,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorType {
    Communication,
    Symbol,
    Knowledge,
    NaturalLanguage,
    OtherSyntax,
    ShallowSemantic,
    DeepSemantic,
}

impl ErrorType {
    pub const ALL: [ErrorType; 7] = [
        ErrorType::Communication,
        ErrorType::Symbol,
        ErrorType::Knowledge,
        ErrorType::NaturalLanguage,
        ErrorType::OtherSyntax,
        ErrorType::ShallowSemantic,
        ErrorType::DeepSemantic,
    ];

    pub fn is_syntactic(self) -> bool {
        !matches!(self, ErrorType::ShallowSemantic | ErrorType::DeepSemantic)
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorType::Communication => "communication",
            ErrorType::Symbol => "symbol",
            ErrorType::Knowledge => "knowledge",
            ErrorType::NaturalLanguage => "natural-language",
            ErrorType::OtherSyntax => "other-syntax",
            ErrorType::ShallowSemantic => "shallow-semantic",
            ErrorType::DeepSemantic => "deep-semantic",
        }
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<SyntaxErrorKind> for ErrorType {
    fn from(k: SyntaxErrorKind) -> Self {
        match k {
            SyntaxErrorKind::CommunicationError => ErrorType::Communication,
            SyntaxErrorKind::SymbolError => ErrorType::Symbol,
            SyntaxErrorKind::KnowledgeError => ErrorType::Knowledge,
            SyntaxErrorKind::NaturalLanguageError => ErrorType::NaturalLanguage,
            SyntaxErrorKind::OtherSyntaxError => ErrorType::OtherSyntax,
        }
    }
}

/// Per-problem error counts by type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub id: String,
    pub counts: BTreeMap<ErrorType, usize>,
}

impl ErrorRecord {
    pub fn new(id: &str) -> Self {
        ErrorRecord {
            id: id.to_string(),
            counts: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, t: ErrorType, n: usize) {
        if n > 0 {
            *self.counts.entry(t).or_default() += n;
        }
    }

    pub fn count(&self, t: ErrorType) -> usize {
        self.counts.get(&t).copied().unwrap_or(0)
    }

    pub fn has(&self, t: ErrorType) -> bool {
        self.count(t) > 0
    }

    /// Number of distinct error types present.
    pub fn types(&self) -> usize {
        ErrorType::ALL.iter().filter(|t| self.has(**t)).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("problem `{0}` has a verdict but no gold label")]
    UnknownId(String),
    #[error("problem `{0}` has a gold label but no verdict")]
    MissingVerdict(String),
    #[error("need at least 2 records, got {0}")]
    TooFewRecords(usize),
}

/// Confusion counts with gold `true` as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn add(&mut self, predicted: bool, gold: bool) {
        match (predicted, gold) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn from_outcomes(outcomes: &[Outcome]) -> Self {
        let mut c = Confusion::default();
        for o in outcomes {
            c.add(o.predicted(), o.gold);
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn metrics(&self) -> EvalMetrics {
        let ratio = |a: usize, b: usize| {
            if b == 0 {
                None
            } else {
                Some(a as f64 / b as f64)
            }
        };
        EvalMetrics {
            confusion: *self,
            accuracy: ratio(self.tp + self.tn, self.total()),
            recall: ratio(self.tp, self.tp + self.fn_),
            precision: ratio(self.tp, self.tp + self.fp),
        }
    }
}

/// Undefined ratios (empty denominators) are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub confusion: Confusion,
    pub accuracy: Option<f64>,
    pub recall: Option<f64>,
    pub precision: Option<f64>,
}

/// Align verdicts with gold labels by problem id.
pub fn compute_metrics(
    verdicts: &[(String, bool)],
    gold: &[(String, bool)],
) -> Result<EvalMetrics, MetricsError> {
    let gold_map: BTreeMap<&str, bool> = gold.iter().map(|(id, g)| (id.as_str(), *g)).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut c = Confusion::default();
    for (id, v) in verdicts {
        let g = gold_map
            .get(id.as_str())
            .ok_or_else(|| MetricsError::UnknownId(id.clone()))?;
        c.add(*v, *g);
        seen.insert(id.as_str());
    }
    if let Some((id, _)) = gold.iter().find(|(id, _)| !seen.contains(id.as_str())) {
        return Err(MetricsError::MissingVerdict(id.clone()));
    }
    Ok(c.metrics())
}

/// Pearson correlation of the per-problem presence indicators of every pair
/// of error types. Entries involving a constant indicator are `None`.
pub fn correlation_matrix(records: &[ErrorRecord]) -> Result<Vec<Vec<Option<f64>>>, MetricsError> {
    if records.len() < 2 {
        return Err(MetricsError::TooFewRecords(records.len()));
    }
    let cols: Vec<Vec<f64>> = ErrorType::ALL
        .iter()
        .map(|t| {
            records
                .iter()
                .map(|r| if r.has(*t) { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let n = records.len() as f64;
    let stats: Vec<(f64, f64)> = cols
        .iter()
        .map(|c| {
            let mean = c.iter().sum::<f64>() / n;
            let ss = c.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
            (mean, ss)
        })
        .collect();
    let k = cols.len();
    let mut m = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            let (mi, si) = stats[i];
            let (mj, sj) = stats[j];
            if si == 0.0 || sj == 0.0 {
                continue;
            }
            if i == j {
                m[i][j] = Some(1.0);
                continue;
            }
            let cov: f64 = cols[i]
                .iter()
                .zip(&cols[j])
                .map(|(a, b)| (a - mi) * (b - mj))
                .sum();
            m[i][j] = Some(cov / (si * sj).sqrt());
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Labels = Vec<(String, bool)>;

    fn labels(pairs: &[(bool, bool)]) -> (Labels, Labels) {
        let v = pairs
            .iter()
            .enumerate()
            .map(|(i, (p, _))| (format!("p{i}"), *p))
            .collect();
        let g = pairs
            .iter()
            .enumerate()
            .map(|(i, (_, g))| (format!("p{i}"), *g))
            .collect();
        (v, g)
    }

    #[test]
    fn definitions() {
        let mut pairs = vec![(true, true); 8];
        pairs.extend([(true, false); 2]);
        pairs.extend([(false, true); 2]);
        pairs.extend([(false, false); 8]);
        let (v, g) = labels(&pairs);
        let m = compute_metrics(&v, &g).unwrap();
        assert_eq!(m.recall, Some(0.8));
        assert_eq!(m.precision, Some(0.8));
        assert_eq!(m.accuracy, Some(0.8));
    }

    #[test]
    fn all_correct_and_empty() {
        let (v, g) = labels(&[(true, true), (false, false), (true, true)]);
        let m = compute_metrics(&v, &g).unwrap();
        assert_eq!(
            (m.accuracy, m.recall, m.precision),
            (Some(1.0), Some(1.0), Some(1.0))
        );
        let m = compute_metrics(&[], &[]).unwrap();
        assert_eq!(m.confusion.total(), 0);
        assert_eq!(m.accuracy, None);
    }

    #[test]
    fn id_mismatch() {
        let (v, g) = labels(&[(true, true), (false, false)]);
        assert!(matches!(
            compute_metrics(&v[..1], &g),
            Err(MetricsError::MissingVerdict(_))
        ));
        let extra = vec![("zz".to_string(), true)];
        assert!(matches!(
            compute_metrics(&extra, &g),
            Err(MetricsError::UnknownId(_))
        ));
    }

    fn rec(id: usize, types: &[ErrorType]) -> ErrorRecord {
        let mut r = ErrorRecord::new(&format!("p{id}"));
        for t in types {
            r.add(*t, 1);
        }
        r
    }

    #[test]
    fn correlation_extremes() {
        use ErrorType::*;
        let recs: Vec<ErrorRecord> = (0..10)
            .map(|i| {
                if i % 2 == 0 {
                    rec(i, &[Symbol, Knowledge])
                } else {
                    rec(i, &[NaturalLanguage])
                }
            })
            .collect();
        let m = correlation_matrix(&recs).unwrap();
        let idx = |t: ErrorType| ErrorType::ALL.iter().position(|x| *x == t).unwrap();
        assert_eq!(m[idx(Symbol)][idx(Knowledge)], Some(1.0));
        assert_eq!(m[idx(Symbol)][idx(NaturalLanguage)], Some(-1.0));
        assert_eq!(m[idx(Symbol)][idx(Symbol)], Some(1.0));
        assert_eq!(m[idx(Communication)][idx(Symbol)], None);
        assert_eq!(m[idx(Communication)][idx(Communication)], None);
        assert!(correlation_matrix(&recs[..1]).is_err());
    }

    #[test]
    fn record_counts() {
        let mut r = ErrorRecord::new("x");
        r.add(ErrorType::Symbol, 2);
        r.add(ErrorType::Knowledge, 0);
        r.add(ErrorType::DeepSemantic, 1);
        assert_eq!(r.types(), 2);
        assert!(!r.has(ErrorType::Knowledge));
        assert_eq!(r.count(ErrorType::Symbol), 2);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"id":"x","counts":{"Symbol":2,"DeepSemantic":1}}"#);
    }
}
