//! Affirmative interpretations from an external generation service.
//!
//! Two service modes exist. In `hb` mode the service is an affirmative
//! interpretation generator and its single output is taken as is. In `cg`
//! mode the service is a plain paraphraser: several candidates are requested
//! and the first one without a negation cue is kept. When every candidate
//! carries a cue the rank-0 candidate is kept and flagged as a fallback.

mod client;
mod mock;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::CueLexicon;

pub use client::HttpGenerator;
pub use mock::{MockServer, MockService, MockServiceError};

pub const DEFAULT_NUM_CANDIDATES: usize = 5;

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("cannot generate from an empty sentence")]
    EmptyInput,
    #[error("sentence has no negation cue: {0:?}")]
    NotNegated(String),
    #[error("endpoint {url} unreachable after {attempts} attempt(s): {message}")]
    Unreachable {
        url: String,
        attempts: u32,
        message: String,
    },
    #[error("service returned status {status}: {body}")]
    Service { status: u16, body: String },
    #[error("service returned no candidates")]
    EmptyGeneration,
    #[error("malformed service response: {0}")]
    InvalidResponse(String),
    #[error("candidate list is empty")]
    NoCandidates,
    #[error("endpoint is configured for mode {actual}, operation needs {expected}")]
    WrongMode {
        expected: GenerationMode,
        actual: GenerationMode,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenerationMode {
    /// Dedicated affirmative-interpretation generator, one output.
    Hb,
    /// General paraphraser, several ranked outputs.
    Cg,
}

impl GenerationMode {
    /// Value of the `mode` field on the wire.
    pub fn wire_name(self) -> &'static str {
        match self {
            GenerationMode::Hb => "affirmative",
            GenerationMode::Cg => "paraphrase",
        }
    }

    pub fn from_wire(s: &str) -> Option<Self> {
        match s {
            "affirmative" => Some(GenerationMode::Hb),
            "paraphrase" => Some(GenerationMode::Cg),
            _ => None,
        }
    }
}

impl fmt::Display for GenerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenerationMode::Hb => "hb",
            GenerationMode::Cg => "cg",
        })
    }
}

impl std::str::FromStr for GenerationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hb" => Ok(GenerationMode::Hb),
            "cg" => Ok(GenerationMode::Cg),
            other => Err(format!("unknown generation mode {other:?} (expected hb or cg)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationEndpoint {
    pub base_url: String,
    pub mode: GenerationMode,
    /// Ignored in `hb` mode.
    pub num_candidates: usize,
    pub timeout: Duration,
    pub max_retries: u32,
    /// Delay before the first retry; doubles on each further attempt.
    pub backoff: Duration,
}

impl GenerationEndpoint {
    pub fn new(base_url: impl Into<String>, mode: GenerationMode) -> Self {
        Self {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            mode,
            num_candidates: DEFAULT_NUM_CANDIDATES,
            timeout: Duration::from_secs(30),
            max_retries: 3,
            backoff: Duration::from_millis(200),
        }
    }

    pub fn with_num_candidates(mut self, n: usize) -> Self {
        self.num_candidates = n.max(1);
        self
    }

    pub fn with_retries(mut self, max_retries: u32, backoff: Duration) -> Self {
        self.max_retries = max_retries;
        self.backoff = backoff;
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Number of candidates requested from the service.
    pub fn requested(&self) -> usize {
        match self.mode {
            GenerationMode::Hb => 1,
            GenerationMode::Cg => self.num_candidates.max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParaphraseCandidate {
    pub text: String,
    pub rank: usize,
}

impl ParaphraseCandidate {
    pub fn ranked(texts: impl IntoIterator<Item = impl Into<String>>) -> Vec<Self> {
        texts
            .into_iter()
            .enumerate()
            .map(|(rank, text)| ParaphraseCandidate {
                text: text.into(),
                rank,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InterpretationSource {
    #[serde(rename = "HB")]
    Hb,
    #[serde(rename = "CG")]
    Cg,
    #[serde(rename = "Gold")]
    Gold,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffirmativeInterpretation {
    pub text: String,
    pub source: InterpretationSource,
    pub has_negation: bool,
    pub is_fallback: bool,
    pub origin_sentence: String,
}

impl AffirmativeInterpretation {
    /// Builds an interpretation, computing `has_negation` with the lexicon.
    pub fn new(
        lexicon: &CueLexicon,
        text: impl Into<String>,
        source: InterpretationSource,
        is_fallback: bool,
        origin_sentence: impl Into<String>,
    ) -> Self {
        let text = text.into();
        let has_negation = lexicon.contains_negation(&text);
        Self {
            text,
            source,
            has_negation,
            is_fallback,
            origin_sentence: origin_sentence.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionOutcome {
    pub selected: Option<ParaphraseCandidate>,
    pub all_negated: bool,
}

/// Something that turns a sentence into ranked candidates for one mode.
pub trait Paraphraser: Sync {
    fn mode(&self) -> GenerationMode;

    fn request_paraphrases(&self, sentence: &str) -> Result<Vec<ParaphraseCandidate>, GenerationError>;
}

/// Picks the lowest-rank candidate without a negation cue.
pub fn select_affirmative(
    lexicon: &CueLexicon,
    candidates: &[ParaphraseCandidate],
) -> Result<SelectionOutcome, GenerationError> {
    if candidates.is_empty() {
        return Err(GenerationError::NoCandidates);
    }
    let selected = candidates
        .iter()
        .filter(|c| !lexicon.contains_negation(&c.text))
        .min_by_key(|c| c.rank)
        .cloned();
    Ok(SelectionOutcome {
        all_negated: selected.is_none(),
        selected,
    })
}

fn require_mode(generator: &dyn Paraphraser, expected: GenerationMode) -> Result<(), GenerationError> {
    if generator.mode() != expected {
        return Err(GenerationError::WrongMode {
            expected,
            actual: generator.mode(),
        });
    }
    Ok(())
}

fn require_negated(lexicon: &CueLexicon, sentence: &str) -> Result<(), GenerationError> {
    if sentence.trim().is_empty() {
        return Err(GenerationError::EmptyInput);
    }
    if !lexicon.contains_negation(sentence) {
        return Err(GenerationError::NotNegated(sentence.to_string()));
    }
    Ok(())
}

/// Single-output affirmative generation; negated outputs are kept as they are.
pub fn affirmative_hb(
    generator: &dyn Paraphraser,
    lexicon: &CueLexicon,
    sentence: &str,
) -> Result<AffirmativeInterpretation, GenerationError> {
    require_mode(generator, GenerationMode::Hb)?;
    require_negated(lexicon, sentence)?;
    let candidates = generator.request_paraphrases(sentence)?;
    let first = candidates
        .into_iter()
        .min_by_key(|c| c.rank)
        .ok_or(GenerationError::EmptyGeneration)?;
    Ok(AffirmativeInterpretation::new(
        lexicon,
        first.text,
        InterpretationSource::Hb,
        false,
        sentence,
    ))
}

/// Generate-then-filter affirmative generation with rank-0 fallback.
pub fn affirmative_cg(
    generator: &dyn Paraphraser,
    lexicon: &CueLexicon,
    sentence: &str,
) -> Result<AffirmativeInterpretation, GenerationError> {
    require_mode(generator, GenerationMode::Cg)?;
    require_negated(lexicon, sentence)?;
    let candidates = generator.request_paraphrases(sentence)?;
    if candidates.is_empty() {
        return Err(GenerationError::EmptyGeneration);
    }
    let outcome = select_affirmative(lexicon, &candidates)?;
    let (chosen, is_fallback) = match outcome.selected {
        Some(c) => (c, false),
        None => (candidates.into_iter().min_by_key(|c| c.rank).expect("non-empty"), true),
    };
    let interp = AffirmativeInterpretation::new(lexicon, chosen.text, InterpretationSource::Cg, is_fallback, sentence);
    debug_assert!(interp.is_fallback || !interp.has_negation);
    Ok(interp)
}

/// Rank-0 paraphrase with no negation filtering.
pub fn first_paraphrase_unfiltered(
    generator: &dyn Paraphraser,
    sentence: &str,
) -> Result<ParaphraseCandidate, GenerationError> {
    require_mode(generator, GenerationMode::Cg)?;
    if sentence.trim().is_empty() {
        return Err(GenerationError::EmptyInput);
    }
    generator
        .request_paraphrases(sentence)?
        .into_iter()
        .min_by_key(|c| c.rank)
        .ok_or(GenerationError::EmptyGeneration)
}
