//! Negation cue detection, affirmative-interpretation generation, corpus
//! augmentation and evaluation metrics for negation-bearing NLU datasets.

pub mod analysis;
pub mod corpus;
pub mod generation;
pub mod lexicon;
pub mod metrics;

pub use lexicon::{contains_negation, detect_cues, tokenize, Cue, CueKind, CueLexicon, CueMatch, LexiconError};
