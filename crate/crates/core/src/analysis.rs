//! Data-level statistics: negation rates, cue histograms and augmentation
//! coverage.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{AugmentedExample, TextSource};
use crate::lexicon::{CueKind, CueLexicon};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("no texts to analyse")]
    EmptyInput,
}

/// Fraction of texts containing at least one cue.
pub fn negation_rate<S: AsRef<str>>(lexicon: &CueLexicon, texts: &[S]) -> Result<f64, AnalysisError> {
    if texts.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let negated = texts.iter().filter(|t| lexicon.contains_negation(t.as_ref())).count();
    Ok(negated as f64 / texts.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CueHistogram {
    pub counts: BTreeMap<String, usize>,
    pub by_kind: BTreeMap<CueKind, usize>,
}

impl CueHistogram {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn merge(&mut self, other: &CueHistogram) {
        for (surface, n) in &other.counts {
            *self.counts.entry(surface.clone()).or_default() += n;
        }
        for (kind, n) in &other.by_kind {
            *self.by_kind.entry(*kind).or_default() += n;
        }
    }
}

pub fn cue_histogram<S: AsRef<str>>(lexicon: &CueLexicon, texts: &[S]) -> CueHistogram {
    let mut hist = CueHistogram::default();
    for text in texts {
        for m in lexicon.detect(text.as_ref()) {
            *hist.counts.entry(m.cue.surface.clone()).or_default() += 1;
            *hist.by_kind.entry(m.cue.kind).or_default() += 1;
        }
    }
    hist
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceStats {
    pub n: usize,
    pub negation_rate: f64,
}

/// Coverage of an augmentation run. Rates are `None` when nothing was
/// applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpretationStats {
    /// Appended generated or gold texts (the negated sentence itself is not
    /// counted).
    pub n: usize,
    pub examples: usize,
    pub skipped_fraction: Option<f64>,
    pub negation_rate: Option<f64>,
    pub fallback_rate: Option<f64>,
    pub per_source: BTreeMap<TextSource, SourceStats>,
    /// Share of interpretations judged meaning-preserving; needs human
    /// labels, so it stays empty unless supplied.
    pub meaning_preserving: Option<f64>,
}

fn ratio(part: usize, whole: usize) -> Option<f64> {
    (whole > 0).then(|| part as f64 / whole as f64)
}

pub fn coverage_report(examples: &[AugmentedExample]) -> InterpretationStats {
    let mut tally: BTreeMap<TextSource, (usize, usize)> = BTreeMap::new();
    let (mut n, mut negated, mut fallback) = (0, 0, 0);
    for part in examples.iter().flat_map(|e| &e.applied) {
        if part.source == TextSource::Sentence {
            continue;
        }
        n += 1;
        negated += usize::from(part.has_negation);
        fallback += usize::from(part.is_fallback);
        let entry = tally.entry(part.source).or_default();
        entry.0 += 1;
        entry.1 += usize::from(part.has_negation);
    }
    let skipped = examples.iter().filter(|e| e.skipped).count();
    InterpretationStats {
        n,
        examples: examples.len(),
        skipped_fraction: ratio(skipped, examples.len()),
        negation_rate: ratio(negated, n),
        fallback_rate: ratio(fallback, n),
        per_source: tally
            .into_iter()
            .map(|(source, (count, neg))| {
                (
                    source,
                    SourceStats {
                        n: count,
                        negation_rate: neg as f64 / count as f64,
                    },
                )
            })
            .collect(),
        meaning_preserving: None,
    }
}
