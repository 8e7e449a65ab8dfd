use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use anyhow::{bail, Context, Result};
use negaffirm::analysis::{coverage_report, cue_histogram, CueHistogram, InterpretationStats};
use negaffirm::corpus::{
    augment_condaqa, augment_nlu, derive_gold_affirmative, parse_condaqa, parse_nlu, record_sentence, AugmentOptions,
    AugmentedRecord, CondaqaRecord, EditKind, Generators, Importance, NluLabel, NluRecord, TextSource,
};
use negaffirm::generation::{GenerationEndpoint, GenerationMode, HttpGenerator, MockServer, MockService};
use negaffirm::metrics::{
    mcnemar, stratified_report, EvalReport, HeadlineMetric, LabelMatch, MetricsError, PredictionRecord,
};
use negaffirm::{CueLexicon, CueMatch};
use serde::{Deserialize, Serialize};

use crate::config::{Command, ConfigError, RunConfig, Task};
use crate::output::{jsonl, pretty, write_atomic};

pub fn dispatch(config: &RunConfig) -> Result<()> {
    match config.command {
        Command::Detect => detect(config),
        Command::Augment => augment(config),
        Command::ExtractEdited => extract_edited(config),
        Command::GoldAffirmative => gold_affirmative(config),
        Command::Evaluate => evaluate(config),
        Command::Analyze => analyze(config),
        Command::MockServe => mock_serve(config),
    }
}

pub fn load_lexicon(config: &RunConfig) -> Result<CueLexicon> {
    match &config.lexicon_path {
        None => Ok(CueLexicon::starter()),
        Some(path) => {
            let file = File::open(path).with_context(|| format!("cannot open lexicon {}", path.display()))?;
            CueLexicon::load(file).with_context(|| format!("invalid lexicon {}", path.display()))
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

fn load_condaqa(path: &Path) -> Result<Vec<CondaqaRecord>> {
    parse_condaqa(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn load_nlu(task: negaffirm::corpus::NluTask, lexicon: &CueLexicon, path: &Path) -> Result<Vec<NluRecord>> {
    parse_nlu(task, lexicon, open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut rows = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(
            serde_json::from_str(&line)
                .with_context(|| format!("{}:{}: malformed JSON line", path.display(), i + 1))?,
        );
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
struct LineReport {
    line: usize,
    negated: bool,
    cues: Vec<CueMatch>,
}

#[derive(Debug, Serialize)]
struct DetectReport {
    lines: usize,
    negated: usize,
    matches: Vec<LineReport>,
}

fn detect(config: &RunConfig) -> Result<()> {
    let lexicon = load_lexicon(config)?;
    let path = config.require_input()?;
    let mut matches = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        let cues = lexicon.detect(&line);
        matches.push(LineReport {
            line: i + 1,
            negated: !cues.is_empty(),
            cues,
        });
    }
    let report = DetectReport {
        lines: matches.len(),
        negated: matches.iter().filter(|m| m.negated).count(),
        matches,
    };
    write_atomic(config.output.as_deref(), &pretty(&report)?)
}

fn endpoint(base_url: &str, mode: GenerationMode, n: usize) -> GenerationEndpoint {
    GenerationEndpoint::new(base_url, mode).with_num_candidates(n)
}

/// Runs augmentation and returns the records instead of writing them.
pub fn augmented_records(config: &RunConfig) -> Result<Vec<AugmentedRecord>> {
    let lexicon = load_lexicon(config)?;
    let task = config.require_task()?;
    let path = config.require_input()?;
    let strategy = config
        .strategy
        .clone()
        .ok_or_else(|| ConfigError::Usage("augment needs --strategy".into()))?;
    let mut options = AugmentOptions::new(strategy);
    options.separator = config.separator.clone();
    options.origin = config.origin;
    options.skip_misaligned = config.skip_misaligned;
    options.parallelism = config.parallelism;

    let clients = config.endpoint.as_ref().map(|e| {
        (
            HttpGenerator::new(endpoint(&e.base_url, GenerationMode::Hb, e.num_candidates)),
            HttpGenerator::new(endpoint(&e.base_url, GenerationMode::Cg, e.num_candidates)),
        )
    });
    let generators = match &clients {
        Some((hb, cg)) => Generators {
            hb: Some(hb),
            cg: Some(cg),
        },
        None => Generators::default(),
    };
    let records = match task {
        Task::Condaqa => augment_condaqa(&load_condaqa(path)?, &lexicon, generators, &options)?,
        Task::Nlu(t) => augment_nlu(&load_nlu(t, &lexicon, path)?, &lexicon, generators, &options)?,
    };
    let skipped = records.iter().filter(|r| r.skipped).count();
    log::info!("augmented {} record(s), {skipped} left unchanged", records.len());
    Ok(records)
}

fn augment(config: &RunConfig) -> Result<()> {
    let records = augmented_records(config)?;
    write_atomic(config.output.as_deref(), &jsonl(&records)?)
}

#[derive(Debug, Serialize)]
struct EditedSentence {
    example_id: String,
    group_id: String,
    edit_kind: EditKind,
    original_sentence: String,
    edited_sentence: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn extract_edited(config: &RunConfig) -> Result<()> {
    let records = load_condaqa(config.require_input()?)?;
    let mut rows = Vec::new();
    for record in records.iter().filter(|r| r.edit_kind != EditKind::Original) {
        let (edited_sentence, error) = match record_sentence(record) {
            Ok(s) => (Some(s), None),
            Err(e) if config.skip_misaligned && e.is_alignment() => {
                log::warn!("{}: {e}", record.example_id());
                (None, Some(e.to_string()))
            }
            Err(e) => return Err(e).with_context(|| format!("record {}", record.example_id())),
        };
        rows.push(EditedSentence {
            example_id: record.example_id(),
            group_id: record.group_id.clone(),
            edit_kind: record.edit_kind,
            original_sentence: record.negated_sentence.clone(),
            edited_sentence,
            error,
        });
    }
    write_atomic(config.output.as_deref(), &jsonl(&rows)?)
}

#[derive(Debug, Serialize)]
struct GoldRow {
    example_id: String,
    group_id: String,
    original_sentence: String,
    affirmative: Option<String>,
}

fn gold_affirmative(config: &RunConfig) -> Result<()> {
    let lexicon = load_lexicon(config)?;
    let records = load_condaqa(config.require_input()?)?;
    let mut rows = Vec::new();
    for record in records.iter().filter(|r| r.edit_kind == EditKind::Paraphrase) {
        let affirmative = match derive_gold_affirmative(&lexicon, record) {
            Ok(a) => a.map(|a| a.text),
            Err(e) if config.skip_misaligned && e.is_alignment() => {
                log::warn!("{}: {e}", record.example_id());
                None
            }
            Err(e) => return Err(e).with_context(|| format!("record {}", record.example_id())),
        };
        rows.push(GoldRow {
            example_id: record.example_id(),
            group_id: record.group_id.clone(),
            original_sentence: record.negated_sentence.clone(),
            affirmative,
        });
    }
    let found = rows.iter().filter(|r| r.affirmative.is_some()).count();
    if !rows.is_empty() {
        log::info!(
            "{found} of {} paraphrase edits yield a gold affirmative ({:.1}%)",
            rows.len(),
            100.0 * found as f64 / rows.len() as f64
        );
    }
    write_atomic(config.output.as_deref(), &jsonl(&rows)?)
}

#[derive(Debug, Deserialize)]
struct PredictionLine {
    example_id: String,
    predicted: serde_json::Value,
}

fn label_text(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Gold-side records for a task, with `predicted` left empty.
fn gold_records(task: Task, lexicon: &CueLexicon, path: &Path) -> Result<Vec<PredictionRecord>> {
    Ok(match task {
        Task::Condaqa => load_condaqa(path)?
            .into_iter()
            .map(|r| {
                let mut p = PredictionRecord::new(r.example_id(), "", r.answer.clone());
                p.has_negation = Some(lexicon.contains_negation(r.passage()));
                p.group_id = Some(r.group_id);
                p.edit_kind = Some(r.edit_kind);
                p
            })
            .collect(),
        Task::Nlu(t) => load_nlu(t, lexicon, path)?
            .into_iter()
            .map(|r| {
                let gold = match r.label {
                    NluLabel::Score(x) => x.to_string(),
                    NluLabel::Class(s) => s,
                };
                let mut p = PredictionRecord::new(r.id, "", gold);
                p.has_negation = Some(r.has_negation);
                p.importance = Some(r.importance).filter(|i| *i != Importance::Unknown);
                p
            })
            .collect(),
    })
}

/// Attaches predictions to gold records; both sides must cover the same ids.
pub fn join_predictions(
    gold: &[PredictionRecord],
    predictions: Vec<(String, String)>,
) -> Result<Vec<PredictionRecord>, MetricsError> {
    let mut by_id = HashMap::with_capacity(predictions.len());
    for (id, predicted) in predictions {
        if by_id.insert(id.clone(), predicted).is_some() {
            return Err(MetricsError::Alignment(format!("duplicate prediction for {id}")));
        }
    }
    let mut seen = HashSet::with_capacity(gold.len());
    let mut joined = Vec::with_capacity(gold.len());
    for g in gold {
        if !seen.insert(g.example_id.as_str()) {
            return Err(MetricsError::Alignment(format!(
                "duplicate gold example {}",
                g.example_id
            )));
        }
        let predicted = by_id
            .remove(&g.example_id)
            .ok_or_else(|| MetricsError::Alignment(format!("no prediction for {}", g.example_id)))?;
        joined.push(PredictionRecord { predicted, ..g.clone() });
    }
    if let Some(extra) = by_id.keys().min() {
        return Err(MetricsError::Alignment(format!(
            "{} prediction(s) match no gold example, e.g. {extra}",
            by_id.len()
        )));
    }
    Ok(joined)
}

fn read_predictions(path: &Path) -> Result<Vec<(String, String)>> {
    let lines: Vec<PredictionLine> = read_jsonl(path)?;
    Ok(lines
        .into_iter()
        .map(|l| (l.example_id, label_text(&l.predicted)))
        .collect())
}

pub fn headline(task: Task) -> (HeadlineMetric, LabelMatch) {
    match task {
        Task::Condaqa => (HeadlineMetric::Accuracy, LabelMatch::CaseInsensitive),
        Task::Nlu(t) if t.is_regression() => (HeadlineMetric::Correlation, LabelMatch::Exact),
        Task::Nlu(_) => (HeadlineMetric::MacroF1, LabelMatch::Exact),
    }
}

pub fn evaluation_report(config: &RunConfig) -> Result<EvalReport> {
    let lexicon = load_lexicon(config)?;
    let task = config.require_task()?;
    let gold_path = config
        .gold
        .as_deref()
        .ok_or_else(|| ConfigError::Usage("evaluate needs --gold (the corpus file)".into()))?;
    let gold = gold_records(task, &lexicon, gold_path)?;
    let records = join_predictions(&gold, read_predictions(config.require_input()?)?)?;
    let (metric, policy) = headline(task);
    let mut report = stratified_report(&records, metric, policy)?;
    if task == Task::Condaqa {
        report = report.with_consistency(&records, policy)?;
    }
    if let Some(other) = &config.compare {
        let second = join_predictions(&gold, read_predictions(other)?)?;
        report = report.with_mcnemar(mcnemar(&records, &second, policy)?);
    }
    Ok(report)
}

fn evaluate(config: &RunConfig) -> Result<()> {
    let report = evaluation_report(config)?;
    write_atomic(config.output.as_deref(), &pretty(&report)?)
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub coverage: InterpretationStats,
    /// Cues remaining in appended interpretations.
    pub interpretation_cues: CueHistogram,
}

pub fn analysis_report(config: &RunConfig, records: &[AugmentedRecord]) -> Result<AnalysisReport> {
    let lexicon = load_lexicon(config)?;
    let examples: Vec<_> = records.iter().map(AugmentedRecord::example).collect();
    let texts: Vec<&str> = records
        .iter()
        .flat_map(|r| &r.applied)
        .filter(|a| a.source != TextSource::Sentence)
        .map(|a| a.text.as_str())
        .collect();
    Ok(AnalysisReport {
        coverage: coverage_report(&examples),
        interpretation_cues: cue_histogram(&lexicon, &texts),
    })
}

fn analyze(config: &RunConfig) -> Result<()> {
    let records: Vec<AugmentedRecord> = read_jsonl(config.require_input()?)?;
    let report = analysis_report(config, &records)?;
    write_atomic(config.output.as_deref(), &pretty(&report)?)
}

fn mock_serve(config: &RunConfig) -> Result<()> {
    let Some(path) = &config.fixtures else {
        bail!(ConfigError::Usage("mock-serve needs --fixtures".into()));
    };
    let mut service = MockService::from_path(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(seed) = config.seed {
        service = service.with_seed(seed);
    }
    let count = service.fixtures().len();
    let server = MockServer::start(&config.addr, service)?;
    println!("{}", server.base_url());
    log::info!("serving {count} fixture(s) on {}", server.base_url());
    server.join();
    Ok(())
}
