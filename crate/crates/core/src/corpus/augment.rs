//! Input representations: base segments plus appended interpretations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sentences::sentences;
use super::CorpusError;
use crate::generation::InterpretationSource;
use crate::lexicon::CueLexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Part {
    #[serde(rename = "p")]
    P,
    #[serde(rename = "q")]
    Q,
    #[serde(rename = "s")]
    S,
    #[serde(rename = "s_cg")]
    SCg,
    #[serde(rename = "a_hb")]
    AHb,
    #[serde(rename = "a_cg")]
    ACg,
    #[serde(rename = "a_g")]
    AG,
    #[serde(rename = "a_g_or_hb")]
    AGOrHb,
    #[serde(rename = "a_g_or_cg")]
    AGOrCg,
}

impl Part {
    pub fn as_str(self) -> &'static str {
        match self {
            Part::P => "p",
            Part::Q => "q",
            Part::S => "s",
            Part::SCg => "s_cg",
            Part::AHb => "a_hb",
            Part::ACg => "a_cg",
            Part::AG => "a_g",
            Part::AGOrHb => "a_g_or_hb",
            Part::AGOrCg => "a_g_or_cg",
        }
    }

    pub fn is_base(self) -> bool {
        matches!(self, Part::P | Part::Q)
    }

    /// Whether the part may draw on gold interpretations.
    pub fn uses_gold(self) -> bool {
        matches!(self, Part::AG | Part::AGOrHb | Part::AGOrCg)
    }

    /// Concrete parts that can supply text for this part, in preference order.
    pub fn resolution(self) -> &'static [Part] {
        match self {
            Part::AGOrHb => &[Part::AG, Part::AHb],
            Part::AGOrCg => &[Part::AG, Part::ACg],
            Part::P => &[Part::P],
            Part::Q => &[Part::Q],
            Part::S => &[Part::S],
            Part::SCg => &[Part::SCg],
            Part::AHb => &[Part::AHb],
            Part::ACg => &[Part::ACg],
            Part::AG => &[Part::AG],
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Part {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(' ', "_");
        Ok(match key.as_str() {
            "p" => Part::P,
            "q" => Part::Q,
            "s" => Part::S,
            "s_cg" => Part::SCg,
            "a_hb" => Part::AHb,
            "a_cg" => Part::ACg,
            "a_g" => Part::AG,
            "a_g_or_hb" | "a_g_or_a_hb" => Part::AGOrHb,
            "a_g_or_cg" | "a_g_or_a_cg" => Part::AGOrCg,
            _ => return Err(format!("unknown strategy part {s:?}")),
        })
    }
}

/// An ordered list of parts, e.g. `p+q+a_hb+a_cg`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AugmentationStrategy {
    parts: Vec<Part>,
}

impl AugmentationStrategy {
    pub fn new(parts: Vec<Part>) -> Result<Self, CorpusError> {
        let invalid = |msg: String| Err(CorpusError::Strategy(msg));
        let mut seen_appended = false;
        for (i, part) in parts.iter().enumerate() {
            if parts[..i].contains(part) {
                return invalid(format!("part {part} appears twice"));
            }
            if part.is_base() && seen_appended {
                return invalid(format!("base part {part} after an appended part"));
            }
            seen_appended |= !part.is_base();
        }
        let base: Vec<Part> = parts.iter().copied().filter(|p| p.is_base()).collect();
        if !(base.is_empty() || base == [Part::P, Part::Q]) {
            return invalid("base parts must be p+q".into());
        }
        if parts.contains(&Part::AGOrHb) && parts.contains(&Part::AGOrCg) {
            return invalid("at most one of a_g_or_hb and a_g_or_cg".into());
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    /// Parts appended after the base composition.
    pub fn appended(&self) -> impl Iterator<Item = Part> + '_ {
        self.parts.iter().copied().filter(|p| !p.is_base())
    }

    pub fn uses_gold(&self) -> bool {
        self.parts.iter().any(|p| p.uses_gold())
    }

    /// Whether any appended part may need the generation service.
    pub fn needs_generation(&self) -> bool {
        self.appended()
            .flat_map(|p| p.resolution().iter())
            .any(|p| matches!(p, Part::AHb | Part::ACg | Part::SCg))
    }
}

impl fmt::Display for AugmentationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.parts.iter().map(|p| p.as_str()).collect();
        f.write_str(&names.join("+"))
    }
}

impl FromStr for AugmentationStrategy {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .split('+')
            .map(|p| p.parse::<Part>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(CorpusError::Strategy)?;
        Self::new(parts)
    }
}

/// Where an appended text came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TextSource {
    /// The negated sentence itself.
    #[serde(rename = "S")]
    Sentence,
    /// Unfiltered first paraphrase.
    #[serde(rename = "S_CG")]
    FirstParaphrase,
    #[serde(rename = "HB")]
    Hb,
    #[serde(rename = "CG")]
    Cg,
    #[serde(rename = "Gold")]
    Gold,
}

impl From<InterpretationSource> for TextSource {
    fn from(s: InterpretationSource) -> Self {
        match s {
            InterpretationSource::Hb => TextSource::Hb,
            InterpretationSource::Cg => TextSource::Cg,
            InterpretationSource::Gold => TextSource::Gold,
        }
    }
}

/// Text available for one concrete part of one example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartText {
    pub text: String,
    pub source: TextSource,
    pub has_negation: bool,
    pub is_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedPart {
    pub part: Part,
    pub source: TextSource,
    pub text: String,
    pub has_negation: bool,
    pub is_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedExample {
    pub input_text: String,
    pub applied: Vec<AppliedPart>,
    pub skipped: bool,
}

fn joiner(separator: &str) -> String {
    format!(" {separator} ")
}

/// Composes one input.
///
/// `interps` is `None` when the example has no negated sentence; the base
/// composition is then returned unchanged with `skipped` set. Otherwise every
/// appended part must resolve to a text in the map.
pub fn build_augmented_input(
    segments: &[&str],
    strategy: &AugmentationStrategy,
    interps: Option<&BTreeMap<Part, PartText>>,
    separator: &str,
) -> Result<AugmentedExample, CorpusError> {
    let join = joiner(separator);
    let mut input_text = segments.join(&join);
    let Some(interps) = interps else {
        return Ok(AugmentedExample {
            input_text,
            applied: Vec::new(),
            skipped: true,
        });
    };
    let mut applied = Vec::new();
    for part in strategy.appended() {
        let found = part
            .resolution()
            .iter()
            .find_map(|p| interps.get(p))
            .ok_or(CorpusError::MissingPart(part))?;
        input_text.push_str(&join);
        input_text.push_str(&found.text);
        applied.push(AppliedPart {
            part,
            source: found.source,
            text: found.text.clone(),
            has_negation: found.has_negation,
            is_fallback: found.is_fallback,
        });
    }
    Ok(AugmentedExample {
        input_text,
        applied,
        skipped: false,
    })
}

/// First sentence (segment order, then sentence order) with a negation cue.
pub fn find_target_sentence(lexicon: &CueLexicon, segments: &[&str]) -> Option<(usize, String)> {
    segments.iter().enumerate().find_map(|(i, segment)| {
        sentences(segment)
            .into_iter()
            .find(|s| lexicon.contains_negation(s))
            .map(|s| (i, s.to_string()))
    })
}
