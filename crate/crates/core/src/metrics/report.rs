use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    accuracy, group_consistency, macro_f1, numeric_pairs, pearson, spearman, ConsistencyScope, LabelMatch,
    McNemarResult, MetricsError, PredictionRecord,
};
use crate::corpus::Importance;

/// The metric a task is scored with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadlineMetric {
    Accuracy,
    MacroF1,
    /// Pearson and Spearman, for regression labels.
    Correlation,
}

impl HeadlineMetric {
    pub fn names(self) -> &'static [&'static str] {
        match self {
            HeadlineMetric::Accuracy => &["accuracy"],
            HeadlineMetric::MacroF1 => &["macro_f1"],
            HeadlineMetric::Correlation => &["pearson", "spearman"],
        }
    }
}

/// Metric values for one slice of the records. A value is `None` (`null` in
/// JSON, "n/a" in tables) when the slice is empty or the metric is undefined
/// on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumMetrics {
    pub n: usize,
    pub values: BTreeMap<String, Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strata {
    pub overall: StratumMetrics,
    pub without_negation: StratumMetrics,
    pub with_negation: StratumMetrics,
    pub important: StratumMetrics,
    pub unimportant: StratumMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub all: Option<f64>,
    pub par: Option<f64>,
    pub sco: Option<f64>,
    pub aff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Groups left out of each consistency denominator for lacking a member.
    pub excluded_groups: BTreeMap<String, usize>,
    /// Records with no negation flag; they only count towards `overall`.
    pub unknown_negation: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub accuracy: Option<f64>,
    pub consistency: Option<ConsistencyReport>,
    pub strata: Strata,
    pub mcnemar: Option<McNemarResult>,
    pub diagnostics: Diagnostics,
}

impl EvalReport {
    /// Adds the four group-consistency scores; records must carry group ids
    /// and edit kinds.
    pub fn with_consistency(mut self, records: &[PredictionRecord], policy: LabelMatch) -> Result<Self, MetricsError> {
        let mut report = ConsistencyReport::default();
        for scope in ConsistencyScope::ALL_SCOPES {
            let score = group_consistency(records, scope, policy)?;
            let slot = match scope {
                ConsistencyScope::All => &mut report.all,
                ConsistencyScope::Par => &mut report.par,
                ConsistencyScope::Sco => &mut report.sco,
                ConsistencyScope::Aff => &mut report.aff,
            };
            *slot = score.value();
            self.diagnostics
                .excluded_groups
                .insert(scope.to_string(), score.excluded);
        }
        self.consistency = Some(report);
        Ok(self)
    }

    pub fn with_mcnemar(mut self, result: McNemarResult) -> Self {
        self.mcnemar = Some(result);
        self
    }
}

fn undefined_as_none(r: Result<f64, MetricsError>) -> Result<Option<f64>, MetricsError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(MetricsError::EmptyInput | MetricsError::TooFewPoints | MetricsError::UndefinedCorrelation) => Ok(None),
        Err(e) => Err(e),
    }
}

fn stratum(
    records: &[&PredictionRecord],
    headline: HeadlineMetric,
    policy: LabelMatch,
) -> Result<StratumMetrics, MetricsError> {
    let owned: Vec<PredictionRecord> = records.iter().map(|r| (*r).clone()).collect();
    let mut values = BTreeMap::new();
    match headline {
        HeadlineMetric::Accuracy => {
            values.insert("accuracy".to_string(), undefined_as_none(accuracy(&owned, policy))?);
        }
        HeadlineMetric::MacroF1 => {
            values.insert("macro_f1".to_string(), undefined_as_none(macro_f1(&owned, policy))?);
        }
        HeadlineMetric::Correlation => {
            let (predicted, gold) = numeric_pairs(&owned)?;
            values.insert("pearson".to_string(), undefined_as_none(pearson(&predicted, &gold))?);
            values.insert("spearman".to_string(), undefined_as_none(spearman(&predicted, &gold))?);
        }
    }
    Ok(StratumMetrics { n: owned.len(), values })
}

/// Headline metric overall and per negation stratum. Fails only when a
/// correlation is requested over non-numeric labels.
pub fn stratified_report(
    records: &[PredictionRecord],
    headline: HeadlineMetric,
    policy: LabelMatch,
) -> Result<EvalReport, MetricsError> {
    let select = |keep: &dyn Fn(&PredictionRecord) -> bool| -> Vec<&PredictionRecord> {
        records.iter().filter(|r| keep(r)).collect()
    };
    let strata = Strata {
        overall: stratum(&select(&|_| true), headline, policy)?,
        without_negation: stratum(&select(&|r| r.has_negation == Some(false)), headline, policy)?,
        with_negation: stratum(&select(&|r| r.has_negation == Some(true)), headline, policy)?,
        important: stratum(
            &select(&|r| r.has_negation == Some(true) && r.importance == Some(Importance::Important)),
            headline,
            policy,
        )?,
        unimportant: stratum(
            &select(&|r| r.has_negation == Some(true) && r.importance == Some(Importance::Unimportant)),
            headline,
            policy,
        )?,
    };
    Ok(EvalReport {
        n: records.len(),
        accuracy: undefined_as_none(accuracy(records, policy))?,
        consistency: None,
        strata,
        mcnemar: None,
        diagnostics: Diagnostics {
            excluded_groups: BTreeMap::new(),
            unknown_negation: records.iter().filter(|r| r.has_negation.is_none()).count(),
        },
    })
}
