//! CondaQA records.
//!
//! Input is JSONL with the fields `group_id`, `original_passage`, `sentence`,
//! `cue`, `edited_passage`, `edit_type`, `question` and `answer`. The field
//! names of the public release are accepted as aliases:
//!
//! | canonical          | release alias          |
//! |--------------------|------------------------|
//! | `group_id`         | `QuestionID`           |
//! | `original_passage` | `original passage`     |
//! | `sentence`         | `original sentence`    |
//! | `cue`              | `original cue`         |
//! | `edited_passage`   | `sentence1`            |
//! | `edit_type`        | `PassageEditID` (0..3) |
//! | `question`         | `sentence2`            |
//! | `answer`           | `label`                |

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::sentences::sentences;
use super::{normalize_whitespace, CorpusError};
use crate::generation::{AffirmativeInterpretation, InterpretationSource};
use crate::lexicon::CueLexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditKind {
    Original,
    Paraphrase,
    Scope,
    Affirmative,
}

impl EditKind {
    pub const EDITS: [EditKind; 3] = [EditKind::Paraphrase, EditKind::Scope, EditKind::Affirmative];

    pub fn as_str(self) -> &'static str {
        match self {
            EditKind::Original => "original",
            EditKind::Paraphrase => "paraphrase",
            EditKind::Scope => "scope",
            EditKind::Affirmative => "affirmative",
        }
    }

    fn from_index(i: u64) -> Option<Self> {
        match i {
            0 => Some(EditKind::Original),
            1 => Some(EditKind::Paraphrase),
            2 => Some(EditKind::Scope),
            3 => Some(EditKind::Affirmative),
            _ => None,
        }
    }
}

impl fmt::Display for EditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EditKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lowered = s.trim().to_ascii_lowercase();
        let head = lowered.split_whitespace().next().unwrap_or_default();
        match head {
            "original" => Ok(EditKind::Original),
            "paraphrase" => Ok(EditKind::Paraphrase),
            "scope" => Ok(EditKind::Scope),
            "affirmative" => Ok(EditKind::Affirmative),
            _ => Err(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondaqaRecord {
    pub group_id: String,
    pub original_passage: String,
    pub negated_sentence: String,
    pub cue: String,
    pub edited_passage: String,
    pub edit_kind: EditKind,
    pub question: String,
    pub answer: String,
}

impl CondaqaRecord {
    /// Identifier used for predictions and augmented output.
    pub fn example_id(&self) -> String {
        format!("{}/{}", self.group_id, self.edit_kind)
    }

    /// The passage shown to the model for this record.
    pub fn passage(&self) -> &str {
        &self.edited_passage
    }
}

const FIELDS: [(&str, &[&str]); 8] = [
    ("group_id", &["QuestionID", "PassageID"]),
    ("original_passage", &["original passage"]),
    ("sentence", &["original sentence"]),
    ("cue", &["original cue"]),
    ("edited_passage", &["sentence1"]),
    ("edit_type", &["PassageEditID"]),
    ("question", &["sentence2"]),
    ("answer", &["label"]),
];

fn lookup<'a>(obj: &'a serde_json::Map<String, Value>, field: &str) -> Option<&'a Value> {
    let aliases = FIELDS
        .iter()
        .find(|(name, _)| *name == field)
        .map_or(&[][..], |(_, a)| *a);
    std::iter::once(field)
        .chain(aliases.iter().copied())
        .find_map(|k| obj.get(k).filter(|v| !v.is_null()))
}

fn text_field(obj: &serde_json::Map<String, Value>, field: &'static str, line: usize) -> Result<String, CorpusError> {
    match lookup(obj, field) {
        Some(Value::String(s)) => Ok(normalize_whitespace(s)),
        Some(Value::Number(n)) => Ok(n.to_string()),
        Some(Value::Bool(b)) => Ok(b.to_string()),
        Some(_) => Err(CorpusError::Schema {
            line,
            message: format!("field {field:?} must be a string"),
        }),
        None => Err(CorpusError::MissingField { line, field }),
    }
}

fn parse_record(line_text: &str, line: usize) -> Result<CondaqaRecord, CorpusError> {
    let value: Value = serde_json::from_str(line_text).map_err(|e| CorpusError::Parse {
        line,
        message: e.to_string(),
    })?;
    let Value::Object(obj) = value else {
        return Err(CorpusError::Schema {
            line,
            message: "record is not a JSON object".into(),
        });
    };
    let edit_kind = match lookup(&obj, "edit_type") {
        Some(Value::String(s)) => s.parse::<EditKind>().ok(),
        Some(Value::Number(n)) => n.as_u64().and_then(EditKind::from_index),
        Some(_) => None,
        None => {
            return Err(CorpusError::MissingField {
                line,
                field: "edit_type",
            })
        }
    }
    .ok_or_else(|| CorpusError::Schema {
        line,
        message: "edit_type must be original, paraphrase, scope or affirmative (or 0..3)".into(),
    })?;
    let original_passage = text_field(&obj, "original_passage", line)?;
    let edited_passage = match (edit_kind, lookup(&obj, "edited_passage")) {
        (EditKind::Original, None) => original_passage.clone(),
        _ => text_field(&obj, "edited_passage", line)?,
    };
    let record = CondaqaRecord {
        group_id: text_field(&obj, "group_id", line)?,
        negated_sentence: text_field(&obj, "sentence", line)?,
        cue: text_field(&obj, "cue", line)?,
        question: text_field(&obj, "question", line)?,
        answer: text_field(&obj, "answer", line)?,
        original_passage,
        edited_passage,
        edit_kind,
    };
    if !record.original_passage.contains(&record.negated_sentence) {
        return Err(CorpusError::Invariant {
            line,
            message: "negated sentence does not occur in the original passage".into(),
        });
    }
    if record.edit_kind == EditKind::Original && record.edited_passage != record.original_passage {
        return Err(CorpusError::Invariant {
            line,
            message: "original record has an edited passage that differs from the original".into(),
        });
    }
    Ok(record)
}

/// Parses CondaQA JSONL. Blank lines are skipped; line numbers are 1-based.
pub fn parse_condaqa<R: BufRead>(reader: R) -> Result<Vec<CondaqaRecord>, CorpusError> {
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_record(&line, line_no)?);
    }
    Ok(records)
}

/// Finds the original sentence containing `negated_sentence` and returns the
/// edited-passage sentence at the same index.
pub fn extract_edited_sentence(
    original_passage: &str,
    negated_sentence: &str,
    edited_passage: &str,
) -> Result<String, CorpusError> {
    let original = normalize_whitespace(original_passage);
    let needle = normalize_whitespace(negated_sentence);
    let edited = normalize_whitespace(edited_passage);
    if needle.is_empty() {
        return Err(CorpusError::Alignment("negated sentence is empty".into()));
    }
    let index = sentences(&original)
        .iter()
        .position(|s| s.contains(needle.as_str()))
        .ok_or_else(|| CorpusError::Alignment(format!("no sentence of the original passage contains {needle:?}")))?;
    let edited_sentences = sentences(&edited);
    edited_sentences
        .get(index)
        .map(|s| s.to_string())
        .ok_or(CorpusError::IndexOutOfRange {
            index,
            count: edited_sentences.len(),
        })
}

/// The sentence of this record's passage that corresponds to the negated one.
pub fn record_sentence(record: &CondaqaRecord) -> Result<String, CorpusError> {
    if record.edit_kind == EditKind::Original {
        return Ok(record.negated_sentence.clone());
    }
    extract_edited_sentence(
        &record.original_passage,
        &record.negated_sentence,
        &record.edited_passage,
    )
}

/// A gold affirmative interpretation exists for paraphrase edits whose edited
/// sentence carries no negation cue.
pub fn derive_gold_affirmative(
    lexicon: &CueLexicon,
    record: &CondaqaRecord,
) -> Result<Option<AffirmativeInterpretation>, CorpusError> {
    if record.edit_kind != EditKind::Paraphrase {
        return Ok(None);
    }
    let edited = record_sentence(record)?;
    if lexicon.contains_negation(&edited) {
        return Ok(None);
    }
    Ok(Some(AffirmativeInterpretation::new(
        lexicon,
        edited,
        InterpretationSource::Gold,
        false,
        record.negated_sentence.clone(),
    )))
}
