//! Command-line flags, environment overrides and the optional config file.
//!
//! Each setting is taken from the first source that provides it: a flag, a
//! `NEGAFFIRM_*` environment variable, the `--config` file, the default.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use negaffirm::corpus::{AugmentationStrategy, NluTask, Part, SentenceOrigin};
use negaffirm::generation::{GenerationMode, DEFAULT_NUM_CANDIDATES};
use serde::Deserialize;
use thiserror::Error;

pub const DEFAULT_SEPARATOR: &str = "</s>";
pub const DEFAULT_PARALLELISM: usize = 4;
pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";

#[derive(Debug, Error)]
pub enum ConfigError {
    /// Bad values: unknown task, unparsable strategy, unreadable config file.
    #[error("usage error: {0}")]
    Usage(String),
    /// Well-formed values that do not fit together.
    #[error("configuration error: {0}")]
    Invalid(String),
}

impl ConfigError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ConfigError::Usage(_) => 2,
            ConfigError::Invalid(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Condaqa,
    Nlu(NluTask),
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("condaqa") {
            return Ok(Task::Condaqa);
        }
        s.parse::<NluTask>()
            .map(Task::Nlu)
            .map_err(|_| format!("unknown task {s:?} (expected condaqa, commonsenseqa, stsb, qnli, wic or wsc)"))
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Condaqa => f.write_str("condaqa"),
            Task::Nlu(t) => t.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    #[default]
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Edited,
    Original,
}

impl From<Origin> for SentenceOrigin {
    fn from(o: Origin) -> Self {
        match o {
            Origin::Edited => SentenceOrigin::Edited,
            Origin::Original => SentenceOrigin::Original,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "negaffirm",
    version,
    about = "Affirmative-interpretation augmentation and evaluation for negation-bearing corpora"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Report negation cues found in each line of a text file.
    Detect,
    /// Append interpretations to task inputs and write JSONL.
    Augment,
    /// Extract the edited sentence for every edited CondaQA passage.
    ExtractEdited,
    /// List gold affirmative interpretations from CondaQA paraphrase edits.
    GoldAffirmative,
    /// Score predictions against a corpus.
    Evaluate,
    /// Coverage and cue statistics for an augmented JSONL file.
    Analyze,
    /// Serve canned generation responses over HTTP.
    MockServe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Detect => "detect",
            Command::Augment => "augment",
            Command::ExtractEdited => "extract-edited",
            Command::GoldAffirmative => "gold-affirmative",
            Command::Evaluate => "evaluate",
            Command::Analyze => "analyze",
            Command::MockServe => "mock-serve",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Cue lexicon TSV; the bundled starter lexicon when absent.
    #[arg(long, global = true, env = "NEGAFFIRM_LEXICON")]
    pub lexicon: Option<PathBuf>,
    #[arg(long, global = true, env = "NEGAFFIRM_TASK", value_parser = parse_task)]
    pub task: Option<Task>,
    /// '+'-joined parts, e.g. p+q+a_cg.
    #[arg(long, global = true, env = "NEGAFFIRM_STRATEGY")]
    pub strategy: Option<String>,
    /// Base URL of the generation service.
    #[arg(long, global = true, env = "NEGAFFIRM_ENDPOINT")]
    pub endpoint: Option<String>,
    #[arg(long, global = true, env = "NEGAFFIRM_MODE", value_parser = parse_mode)]
    pub mode: Option<GenerationMode>,
    /// Candidates requested per sentence in cg mode.
    #[arg(long, global = true, env = "NEGAFFIRM_N")]
    pub n: Option<usize>,
    #[arg(long, global = true, env = "NEGAFFIRM_SEPARATOR")]
    pub separator: Option<String>,
    #[arg(long = "in", global = true, env = "NEGAFFIRM_IN")]
    pub input: Option<PathBuf>,
    /// Output path; stdout when absent.
    #[arg(long, global = true, env = "NEGAFFIRM_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "NEGAFFIRM_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "NEGAFFIRM_PARALLELISM")]
    pub parallelism: Option<usize>,
    /// Second prediction file for a McNemar comparison.
    #[arg(long, global = true, env = "NEGAFFIRM_COMPARE")]
    pub compare: Option<PathBuf>,
    #[arg(long, global = true, env = "NEGAFFIRM_CONFIG")]
    pub config: Option<PathBuf>,
    /// Corpus split being processed; gold interpretations need train.
    #[arg(long, global = true, env = "NEGAFFIRM_SPLIT", value_enum)]
    pub split: Option<Split>,
    /// Corpus file joined with predictions by `evaluate`.
    #[arg(long, global = true, env = "NEGAFFIRM_GOLD")]
    pub gold: Option<PathBuf>,
    /// Sentence fed to generation for edited CondaQA passages.
    #[arg(long, global = true, env = "NEGAFFIRM_ORIGIN", value_enum)]
    pub origin: Option<Origin>,
    /// Leave records whose edited sentence cannot be aligned unaugmented.
    #[arg(long, global = true, env = "NEGAFFIRM_SKIP_MISALIGNED")]
    pub skip_misaligned: bool,
    /// Fixture file for `mock-serve`.
    #[arg(long, global = true, env = "NEGAFFIRM_FIXTURES")]
    pub fixtures: Option<PathBuf>,
    /// Listen address for `mock-serve`.
    #[arg(long, global = true, env = "NEGAFFIRM_ADDR")]
    pub addr: Option<String>,
}

fn parse_task(s: &str) -> Result<Task, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<GenerationMode, String> {
    s.parse()
}

/// Keys accepted in the config file; names match the long flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    lexicon: Option<PathBuf>,
    task: Option<String>,
    strategy: Option<String>,
    endpoint: Option<String>,
    mode: Option<String>,
    n: Option<usize>,
    separator: Option<String>,
    #[serde(rename = "in")]
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    parallelism: Option<usize>,
    compare: Option<PathBuf>,
    split: Option<Split>,
    gold: Option<PathBuf>,
    origin: Option<Origin>,
    skip_misaligned: Option<bool>,
    fixtures: Option<PathBuf>,
    addr: Option<String>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError::Usage(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndpointConfig {
    pub base_url: String,
    /// Restricts which generated parts the strategy may use.
    pub mode: Option<GenerationMode>,
    pub num_candidates: usize,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub lexicon_path: Option<PathBuf>,
    pub task: Option<Task>,
    pub strategy: Option<AugmentationStrategy>,
    pub endpoint: Option<EndpointConfig>,
    pub separator: String,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub compare: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub parallelism: usize,
    pub seed: Option<u64>,
    pub split: Split,
    pub origin: SentenceOrigin,
    pub skip_misaligned: bool,
    pub fixtures: Option<PathBuf>,
    pub addr: String,
}

impl RunConfig {
    pub fn require_input(&self) -> Result<&Path, ConfigError> {
        self.input
            .as_deref()
            .ok_or_else(|| ConfigError::Usage(format!("{} needs --in", self.command.name())))
    }

    pub fn require_task(&self) -> Result<Task, ConfigError> {
        self.task
            .ok_or_else(|| ConfigError::Usage(format!("{} needs --task", self.command.name())))
    }
}

fn strategy_parts(strategy: &AugmentationStrategy) -> impl Iterator<Item = Part> + '_ {
    strategy.appended().flat_map(|p| p.resolution().iter().copied())
}

/// Resolves flags (already merged with the environment by clap), the config
/// file and defaults, then validates the combination for `command`.
pub fn parse_config(command: Command, opts: &Opts) -> Result<RunConfig, ConfigError> {
    let file = match &opts.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let task = match (opts.task, file.task.as_deref()) {
        (Some(t), _) => Some(t),
        (None, Some(s)) => Some(s.parse::<Task>().map_err(ConfigError::Usage)?),
        (None, None) => None,
    };
    let mode = match (opts.mode, file.mode.as_deref()) {
        (Some(m), _) => Some(m),
        (None, Some(s)) => Some(s.parse::<GenerationMode>().map_err(ConfigError::Usage)?),
        (None, None) => None,
    };
    let strategy = opts
        .strategy
        .clone()
        .or(file.strategy)
        .map(|s| {
            s.parse::<AugmentationStrategy>()
                .map_err(|e| ConfigError::Usage(e.to_string()))
        })
        .transpose()?;
    let num_candidates = opts.n.or(file.n).unwrap_or(DEFAULT_NUM_CANDIDATES);
    if num_candidates == 0 {
        return Err(ConfigError::Usage("--n must be positive".into()));
    }
    let parallelism = opts.parallelism.or(file.parallelism).unwrap_or(DEFAULT_PARALLELISM);
    if parallelism == 0 {
        return Err(ConfigError::Usage("--parallelism must be positive".into()));
    }
    let endpoint = opts.endpoint.clone().or(file.endpoint).map(|base_url| EndpointConfig {
        base_url,
        mode,
        num_candidates,
    });
    let config = RunConfig {
        command,
        lexicon_path: opts.lexicon.clone().or(file.lexicon),
        task,
        strategy,
        endpoint,
        separator: opts
            .separator
            .clone()
            .or(file.separator)
            .unwrap_or_else(|| DEFAULT_SEPARATOR.to_string()),
        input: opts.input.clone().or(file.input),
        output: opts.out.clone().or(file.out),
        compare: opts.compare.clone().or(file.compare),
        gold: opts.gold.clone().or(file.gold),
        parallelism,
        seed: opts.seed.or(file.seed),
        split: opts.split.or(file.split).unwrap_or_default(),
        origin: opts.origin.or(file.origin).map(Into::into).unwrap_or_default(),
        skip_misaligned: opts.skip_misaligned || file.skip_misaligned.unwrap_or(false),
        fixtures: opts.fixtures.clone().or(file.fixtures),
        addr: opts
            .addr
            .clone()
            .or(file.addr)
            .unwrap_or_else(|| DEFAULT_ADDR.to_string()),
    };
    if command == Command::Augment {
        validate_augment(&config, mode)?;
    }
    Ok(config)
}

fn validate_augment(config: &RunConfig, mode: Option<GenerationMode>) -> Result<(), ConfigError> {
    let task = config.require_task()?;
    let strategy = config
        .strategy
        .as_ref()
        .ok_or_else(|| ConfigError::Usage("augment needs --strategy".into()))?;
    config.require_input()?;
    if strategy.uses_gold() {
        if task != Task::Condaqa {
            return Err(ConfigError::Invalid(format!(
                "strategy {strategy} uses gold interpretations, which exist only for condaqa"
            )));
        }
        if config.split != Split::Train {
            return Err(ConfigError::Invalid(format!(
                "strategy {strategy} uses gold interpretations, which are only available for the train split"
            )));
        }
    }
    let generated: Vec<Part> = strategy_parts(strategy)
        .filter(|p| matches!(p, Part::AHb | Part::ACg | Part::SCg))
        .collect();
    match (&config.endpoint, generated.first()) {
        (None, Some(part)) => {
            return Err(ConfigError::Invalid(format!(
                "strategy part {part} needs a generation endpoint (--endpoint)"
            )))
        }
        (Some(e), None) => log::warn!("strategy {strategy} generates nothing; endpoint {} unused", e.base_url),
        _ => {}
    }
    if let Some(mode) = mode {
        let expected = match mode {
            GenerationMode::Hb => Part::AHb,
            GenerationMode::Cg => Part::ACg,
        };
        if let Some(bad) = generated
            .iter()
            .find(|p| **p != expected && !(mode == GenerationMode::Cg && **p == Part::SCg))
        {
            return Err(ConfigError::Invalid(format!(
                "strategy part {bad} cannot be served in {mode} mode"
            )));
        }
    }
    Ok(())
}
