//! Corpus readers, edited-sentence extraction and input composition.

pub mod augment;
pub mod condaqa;
pub mod nlu;
pub mod pipeline;
pub mod sentences;

use thiserror::Error;

pub use augment::{
    build_augmented_input, find_target_sentence, AppliedPart, AugmentationStrategy, AugmentedExample, Part, PartText,
    TextSource,
};
pub use condaqa::{
    derive_gold_affirmative, extract_edited_sentence, parse_condaqa, record_sentence, CondaqaRecord, EditKind,
};
pub use nlu::{parse_nlu, Importance, NluLabel, NluRecord, NluTask};
pub use pipeline::{
    augment_condaqa, augment_nlu, AugmentError, AugmentOptions, AugmentedRecord, Generators, SentenceOrigin,
};
pub use sentences::split_sentences;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: missing field {field:?}")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("line {line}: {message}")]
    Invariant { line: usize, message: String },
    #[error("alignment failed: {0}")]
    Alignment(String),
    #[error("sentence index {index} out of range; edited passage has {count} sentence(s)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("invalid strategy: {0}")]
    Strategy(String),
    #[error("no text available for strategy part {0}")]
    MissingPart(Part),
}

impl CorpusError {
    /// Errors raised while locating the edited sentence.
    pub fn is_alignment(&self) -> bool {
        matches!(self, CorpusError::Alignment(_) | CorpusError::IndexOutOfRange { .. })
    }
}

/// Collapses whitespace runs to single spaces and trims the ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
