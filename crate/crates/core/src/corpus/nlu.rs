//! TSV adapters for the five NLU tasks.
//!
//! Each file starts with a header row. The `label` column is required; `id`,
//! `has_negation` and `importance` are optional metadata. Every other column
//! is an input segment, taken in header order:
//!
//! | task            | segments                         | label          |
//! |-----------------|----------------------------------|----------------|
//! | `commonsenseqa` | question + 5 choices             | choice letter  |
//! | `stsb`          | sentence 1, sentence 2           | score in [0,5] |
//! | `qnli`          | question, sentence               | class name     |
//! | `wic`           | sentence 1, sentence 2           | class name     |
//! | `wsc`           | text                             | class name     |

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::augment::find_target_sentence;
use super::{normalize_whitespace, CorpusError};
use crate::lexicon::CueLexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NluTask {
    CommonsenseQa,
    Stsb,
    Qnli,
    Wic,
    Wsc,
}

impl NluTask {
    pub const ALL: [NluTask; 5] = [
        NluTask::CommonsenseQa,
        NluTask::Stsb,
        NluTask::Qnli,
        NluTask::Wic,
        NluTask::Wsc,
    ];

    pub fn segment_count(self) -> usize {
        match self {
            NluTask::CommonsenseQa => 6,
            NluTask::Stsb | NluTask::Qnli | NluTask::Wic => 2,
            NluTask::Wsc => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NluTask::CommonsenseQa => "commonsenseqa",
            NluTask::Stsb => "stsb",
            NluTask::Qnli => "qnli",
            NluTask::Wic => "wic",
            NluTask::Wsc => "wsc",
        }
    }

    /// STS-B is scored with correlations; the rest with macro F1.
    pub fn is_regression(self) -> bool {
        self == NluTask::Stsb
    }
}

impl fmt::Display for NluTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NluTask {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        NluTask::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Importance {
    Important,
    Unimportant,
    None,
    #[default]
    Unknown,
}

impl FromStr for Importance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "important" => Ok(Importance::Important),
            "unimportant" | "not important" | "non-important" => Ok(Importance::Unimportant),
            "none" | "" => Ok(Importance::None),
            "unknown" => Ok(Importance::Unknown),
            other => Err(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NluLabel {
    Score(f64),
    Class(String),
}

impl fmt::Display for NluLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NluLabel::Score(x) => write!(f, "{x}"),
            NluLabel::Class(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NluRecord {
    pub id: String,
    pub task: NluTask,
    pub segments: Vec<String>,
    pub label: NluLabel,
    pub has_negation: bool,
    pub importance: Importance,
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

struct Layout {
    segments: Vec<usize>,
    label: usize,
    id: Option<usize>,
    has_negation: Option<usize>,
    importance: Option<usize>,
    width: usize,
}

fn layout(task: NluTask, header: &str) -> Result<Layout, CorpusError> {
    let columns: Vec<String> = header.split('\t').map(|c| c.trim().to_ascii_lowercase()).collect();
    let find = |name: &str| columns.iter().position(|c| c == name);
    let label = find("label").ok_or(CorpusError::Schema {
        line: 1,
        message: "header has no label column".into(),
    })?;
    let id = find("id");
    let has_negation = find("has_negation");
    let importance = find("importance");
    let meta = [Some(label), id, has_negation, importance];
    let segments: Vec<usize> = (0..columns.len()).filter(|i| !meta.contains(&Some(*i))).collect();
    if segments.len() != task.segment_count() {
        return Err(CorpusError::Schema {
            line: 1,
            message: format!(
                "{task} expects {} segment column(s), header has {}",
                task.segment_count(),
                segments.len()
            ),
        });
    }
    Ok(Layout {
        segments,
        label,
        id,
        has_negation,
        importance,
        width: columns.len(),
    })
}

/// Parses a task TSV. `has_negation` comes from the metadata column when
/// present and from the lexicon otherwise.
pub fn parse_nlu<R: BufRead>(task: NluTask, lexicon: &CueLexicon, reader: R) -> Result<Vec<NluRecord>, CorpusError> {
    let mut lines = reader.lines().enumerate();
    let header = loop {
        match lines.next() {
            None => return Ok(Vec::new()),
            Some((i, line)) => {
                let line = line.map_err(|e| CorpusError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
        }
    };
    let layout = layout(task, &header)?;
    let mut records = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != layout.width {
            return Err(CorpusError::Schema {
                line: line_no,
                message: format!("expected {} column(s), found {}", layout.width, fields.len()),
            });
        }
        let segments: Vec<String> = layout
            .segments
            .iter()
            .map(|&c| normalize_whitespace(fields[c]))
            .collect();
        let raw_label = fields[layout.label].trim();
        let label = if task.is_regression() {
            NluLabel::Score(raw_label.parse::<f64>().map_err(|_| CorpusError::Schema {
                line: line_no,
                message: format!("label {raw_label:?} is not a number"),
            })?)
        } else {
            NluLabel::Class(raw_label.to_string())
        };
        let has_negation = match layout.has_negation {
            Some(c) => parse_bool(fields[c]).ok_or_else(|| CorpusError::Schema {
                line: line_no,
                message: format!("has_negation {:?} is not a boolean", fields[c]),
            })?,
            None => {
                let refs: Vec<&str> = segments.iter().map(String::as_str).collect();
                find_target_sentence(lexicon, &refs).is_some()
            }
        };
        let importance = match layout.importance {
            Some(c) => fields[c].parse::<Importance>().map_err(|v| CorpusError::Schema {
                line: line_no,
                message: format!("unknown importance {v:?}"),
            })?,
            None => Importance::Unknown,
        };
        if !has_negation && matches!(importance, Importance::Important | Importance::Unimportant) {
            return Err(CorpusError::Schema {
                line: line_no,
                message: "importance given for an instance without negation".into(),
            });
        }
        let id = match layout.id {
            Some(c) => fields[c].trim().to_string(),
            None => format!("{task}-{}", records.len()),
        };
        records.push(NluRecord {
            id,
            task,
            segments,
            label,
            has_negation,
            importance,
        });
    }
    Ok(records)
}
