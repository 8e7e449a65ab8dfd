//! Evaluation metrics: accuracy, group consistency, macro F1, correlations,
//! McNemar's test and negation-stratified reports.

mod consistency;
mod correlation;
mod mcnemar;
mod report;

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{EditKind, Importance};

pub use consistency::{group_consistency, ConsistencyScope, ConsistencyScore};
pub use correlation::{average_ranks, pearson, spearman};
pub use mcnemar::{mcnemar, mcnemar_from_counts, McNemarMethod, McNemarResult, EXACT_THRESHOLD};
pub use report::{
    stratified_report, ConsistencyReport, Diagnostics, EvalReport, HeadlineMetric, Strata, StratumMetrics,
};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no records to evaluate")]
    EmptyInput,
    #[error("input lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("at least two points are needed for a correlation")]
    TooFewPoints,
    #[error("correlation is undefined for a constant vector")]
    UndefinedCorrelation,
    #[error("label {0:?} is not numeric")]
    NonNumeric(String),
    #[error("record {0} has no group id or edit kind")]
    Ungrouped(String),
    #[error("group {group} has more than one {kind} record")]
    MalformedGroup { group: String, kind: EditKind },
    #[error("example ids do not line up: {0}")]
    Alignment(String),
}

/// How predicted and gold labels are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMatch {
    #[default]
    Exact,
    /// Trimmed, case-insensitive comparison (used for CondaQA answers).
    CaseInsensitive,
}

impl LabelMatch {
    pub fn key(self, label: &str) -> String {
        match self {
            LabelMatch::Exact => label.to_string(),
            LabelMatch::CaseInsensitive => label.trim().to_lowercase(),
        }
    }

    pub fn same(self, a: &str, b: &str) -> bool {
        self.key(a) == self.key(b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub example_id: String,
    pub group_id: Option<String>,
    pub edit_kind: Option<EditKind>,
    pub predicted: String,
    pub gold: String,
    pub has_negation: Option<bool>,
    pub importance: Option<Importance>,
}

impl PredictionRecord {
    pub fn new(example_id: impl Into<String>, predicted: impl Into<String>, gold: impl Into<String>) -> Self {
        Self {
            example_id: example_id.into(),
            group_id: None,
            edit_kind: None,
            predicted: predicted.into(),
            gold: gold.into(),
            has_negation: None,
            importance: None,
        }
    }

    pub fn is_correct(&self, policy: LabelMatch) -> bool {
        policy.same(&self.predicted, &self.gold)
    }
}

/// Rejects duplicate example ids.
pub fn check_unique_ids(records: &[PredictionRecord]) -> Result<(), MetricsError> {
    let mut seen = HashSet::new();
    for r in records {
        if !seen.insert(r.example_id.as_str()) {
            return Err(MetricsError::Alignment(format!(
                "duplicate example id {}",
                r.example_id
            )));
        }
    }
    Ok(())
}

pub fn accuracy(records: &[PredictionRecord], policy: LabelMatch) -> Result<f64, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let correct = records.iter().filter(|r| r.is_correct(policy)).count();
    Ok(correct as f64 / records.len() as f64)
}

/// Unweighted mean of per-class F1 over the classes present in gold.
pub fn macro_f1(records: &[PredictionRecord], policy: LabelMatch) -> Result<f64, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let pairs: Vec<(String, String)> = records
        .iter()
        .map(|r| (policy.key(&r.predicted), policy.key(&r.gold)))
        .collect();
    let classes: BTreeSet<&str> = pairs.iter().map(|(_, g)| g.as_str()).collect();
    let total: f64 = classes
        .iter()
        .map(|&class| {
            let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
            for (p, g) in &pairs {
                match (p == class, g == class) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    (false, false) => {}
                }
            }
            let denom = 2 * tp + fp + fn_;
            if denom == 0 {
                0.0
            } else {
                2.0 * tp as f64 / denom as f64
            }
        })
        .sum();
    Ok(total / classes.len() as f64)
}

/// Parses predicted and gold labels as numbers, for correlation metrics.
pub fn numeric_pairs(records: &[PredictionRecord]) -> Result<(Vec<f64>, Vec<f64>), MetricsError> {
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| MetricsError::NonNumeric(s.to_string()))
    };
    let mut predicted = Vec::with_capacity(records.len());
    let mut gold = Vec::with_capacity(records.len());
    for r in records {
        predicted.push(parse(&r.predicted)?);
        gold.push(parse(&r.gold)?);
    }
    Ok((predicted, gold))
}
