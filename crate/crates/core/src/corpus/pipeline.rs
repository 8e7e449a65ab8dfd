//! Record-level augmentation over whole corpora.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::augment::{
    build_augmented_input, find_target_sentence, AppliedPart, AugmentationStrategy, AugmentedExample, Part, PartText,
    TextSource,
};
use super::condaqa::{derive_gold_affirmative, record_sentence, CondaqaRecord, EditKind};
use super::nlu::{NluLabel, NluRecord};
use super::CorpusError;
use crate::generation::{
    affirmative_cg, affirmative_hb, first_paraphrase_unfiltered, AffirmativeInterpretation, GenerationError,
    Paraphraser,
};
use crate::lexicon::CueLexicon;

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("record {id}: {source}")]
    Record {
        id: String,
        #[source]
        source: CorpusError,
    },
    #[error("record {id}: generation failed: {source}")]
    Generation {
        id: String,
        #[source]
        source: GenerationError,
    },
    #[error("strategy part {0} needs a generation endpoint")]
    NoGenerator(Part),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

/// Which sentence feeds generation for edited CondaQA passages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentenceOrigin {
    /// The sentence extracted from the edited passage.
    #[default]
    Edited,
    /// The original negated sentence.
    Original,
}

#[derive(Clone, Copy, Default)]
pub struct Generators<'a> {
    pub hb: Option<&'a dyn Paraphraser>,
    pub cg: Option<&'a dyn Paraphraser>,
}

#[derive(Debug, Clone)]
pub struct AugmentOptions {
    pub strategy: AugmentationStrategy,
    pub separator: String,
    pub origin: SentenceOrigin,
    /// Mark records whose edited sentence cannot be aligned as skipped
    /// instead of failing the run.
    pub skip_misaligned: bool,
    pub parallelism: usize,
}

impl AugmentOptions {
    pub fn new(strategy: AugmentationStrategy) -> Self {
        Self {
            strategy,
            separator: "</s>".to_string(),
            origin: SentenceOrigin::Edited,
            skip_misaligned: false,
            parallelism: 1,
        }
    }
}

/// One line of augmented output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedRecord {
    pub id: String,
    pub input: String,
    pub label: NluLabel,
    pub strategy: String,
    pub applied: Vec<AppliedPart>,
    pub skipped: bool,
}

impl AugmentedRecord {
    fn new(id: String, label: NluLabel, strategy: &AugmentationStrategy, example: AugmentedExample) -> Self {
        Self {
            id,
            input: example.input_text,
            label,
            strategy: strategy.to_string(),
            applied: example.applied,
            skipped: example.skipped,
        }
    }

    pub fn example(&self) -> AugmentedExample {
        AugmentedExample {
            input_text: self.input.clone(),
            applied: self.applied.clone(),
            skipped: self.skipped,
        }
    }
}

fn interp_text(a: AffirmativeInterpretation) -> PartText {
    PartText {
        source: a.source.into(),
        text: a.text,
        has_negation: a.has_negation,
        is_fallback: a.is_fallback,
    }
}

struct Context<'a> {
    lexicon: &'a CueLexicon,
    generators: Generators<'a>,
    options: &'a AugmentOptions,
}

impl Context<'_> {
    fn generator(&self, part: Part) -> Result<&dyn Paraphraser, AugmentError> {
        let g = match part {
            Part::AHb => self.generators.hb,
            _ => self.generators.cg,
        };
        g.ok_or(AugmentError::NoGenerator(part))
    }

    /// Texts for every appended part, or `None` when the example stays
    /// unaugmented (no negated sentence, or a gold-only part without gold).
    fn interpretations(
        &self,
        id: &str,
        target: Option<&str>,
        gold: Option<&PartText>,
    ) -> Result<Option<BTreeMap<Part, PartText>>, AugmentError> {
        let Some(target) = target.filter(|t| self.lexicon.contains_negation(t)) else {
            return Ok(None);
        };
        let gen_err = |source| AugmentError::Generation {
            id: id.to_string(),
            source,
        };
        let mut map = BTreeMap::new();
        for part in self.options.strategy.appended() {
            let concrete = match (part.resolution(), gold) {
                ([Part::AG, ..], Some(g)) => {
                    map.insert(Part::AG, g.clone());
                    continue;
                }
                ([Part::AG], None) => return Ok(None),
                ([Part::AG, fallback], None) => *fallback,
                ([single], _) => *single,
                _ => unreachable!("resolution lists have one or two entries"),
            };
            if map.contains_key(&concrete) {
                continue;
            }
            let text = match concrete {
                Part::S => PartText {
                    text: target.to_string(),
                    source: TextSource::Sentence,
                    has_negation: true,
                    is_fallback: false,
                },
                Part::SCg => {
                    let c = first_paraphrase_unfiltered(self.generator(concrete)?, target).map_err(gen_err)?;
                    PartText {
                        has_negation: self.lexicon.contains_negation(&c.text),
                        text: c.text,
                        source: TextSource::FirstParaphrase,
                        is_fallback: false,
                    }
                }
                Part::AHb => {
                    interp_text(affirmative_hb(self.generator(concrete)?, self.lexicon, target).map_err(gen_err)?)
                }
                Part::ACg => {
                    interp_text(affirmative_cg(self.generator(concrete)?, self.lexicon, target).map_err(gen_err)?)
                }
                other => unreachable!("{other} is not an appendable concrete part"),
            };
            map.insert(concrete, text);
        }
        Ok(Some(map))
    }

    fn check_generators(&self) -> Result<(), AugmentError> {
        for part in self.options.strategy.appended() {
            for &p in part.resolution() {
                if matches!(p, Part::AHb | Part::ACg | Part::SCg) {
                    self.generator(p)?;
                }
            }
        }
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool, AugmentError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.options.parallelism.max(1))
            .build()
            .map_err(|e| AugmentError::Pool(e.to_string()))
    }
}

fn misaligned(options: &AugmentOptions, id: &str, err: CorpusError) -> Result<Option<String>, AugmentError> {
    if options.skip_misaligned && err.is_alignment() {
        log::warn!("record {id}: {err}; left unaugmented");
        Ok(None)
    } else {
        Err(AugmentError::Record {
            id: id.to_string(),
            source: err,
        })
    }
}

/// Gold interpretations keyed by group id, from the group's paraphrase edit.
pub fn gold_by_group(
    lexicon: &CueLexicon,
    records: &[CondaqaRecord],
    skip_misaligned: bool,
) -> Result<HashMap<String, AffirmativeInterpretation>, AugmentError> {
    let mut gold = HashMap::new();
    for record in records.iter().filter(|r| r.edit_kind == EditKind::Paraphrase) {
        match derive_gold_affirmative(lexicon, record) {
            Ok(Some(a)) => {
                gold.insert(record.group_id.clone(), a);
            }
            Ok(None) => {}
            Err(e) if skip_misaligned && e.is_alignment() => {
                log::warn!("record {}: {e}; no gold interpretation", record.example_id());
            }
            Err(source) => {
                return Err(AugmentError::Record {
                    id: record.example_id(),
                    source,
                })
            }
        }
    }
    Ok(gold)
}

/// Augments CondaQA records. Output order follows input order.
pub fn augment_condaqa(
    records: &[CondaqaRecord],
    lexicon: &CueLexicon,
    generators: Generators<'_>,
    options: &AugmentOptions,
) -> Result<Vec<AugmentedRecord>, AugmentError> {
    let ctx = Context {
        lexicon,
        generators,
        options,
    };
    ctx.check_generators()?;
    let gold: HashMap<String, PartText> = if options.strategy.uses_gold() {
        gold_by_group(lexicon, records, options.skip_misaligned)?
            .into_iter()
            .map(|(k, v)| (k, interp_text(v)))
            .collect()
    } else {
        HashMap::new()
    };
    ctx.pool()?.install(|| {
        records
            .par_iter()
            .map(|record| {
                let id = record.example_id();
                let target = match options.origin {
                    SentenceOrigin::Original => Some(record.negated_sentence.clone()),
                    SentenceOrigin::Edited => match record_sentence(record) {
                        Ok(s) => Some(s),
                        Err(e) => misaligned(options, &id, e)?,
                    },
                };
                let record_gold = match record.edit_kind {
                    EditKind::Original => gold.get(&record.group_id),
                    _ => None,
                };
                let interps = ctx.interpretations(&id, target.as_deref(), record_gold)?;
                let example = build_augmented_input(
                    &[record.passage(), &record.question],
                    &options.strategy,
                    interps.as_ref(),
                    &options.separator,
                )?;
                Ok(AugmentedRecord::new(
                    id,
                    NluLabel::Class(record.answer.clone()),
                    &options.strategy,
                    example,
                ))
            })
            .collect()
    })
}

/// Augments NLU records. Gold parts are never available here.
pub fn augment_nlu(
    records: &[NluRecord],
    lexicon: &CueLexicon,
    generators: Generators<'_>,
    options: &AugmentOptions,
) -> Result<Vec<AugmentedRecord>, AugmentError> {
    let ctx = Context {
        lexicon,
        generators,
        options,
    };
    ctx.check_generators()?;
    ctx.pool()?.install(|| {
        records
            .par_iter()
            .map(|record| {
                let segments: Vec<&str> = record.segments.iter().map(String::as_str).collect();
                let target = find_target_sentence(lexicon, &segments).map(|(_, s)| s);
                let interps = ctx.interpretations(&record.id, target.as_deref(), None)?;
                let example =
                    build_augmented_input(&segments, &options.strategy, interps.as_ref(), &options.separator)?;
                Ok(AugmentedRecord::new(
                    record.id.clone(),
                    record.label.clone(),
                    &options.strategy,
                    example,
                ))
            })
            .collect()
    })
}
