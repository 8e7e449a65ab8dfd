//! Negation cue inventory and cue detection.
//!
//! A [`CueLexicon`] is a closed list of cue surfaces. Detection tokenizes the
//! input, lowercases it, and scans left to right trying the longest token
//! window first, so "not at all" wins over "not" when both are listed.
//! Matching is on whole tokens only: "university" never matches "un-".

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, BufReader, Read};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Cue list shipped with the crate.
pub const STARTER_LEXICON: &str = include_str!("../data/cues.tsv");

/// Upper bound on the number of tokens in a single cue.
pub const MAX_CUE_TOKENS: usize = 6;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: invalid UTF-8")]
    Decode { line: usize },
    #[error("line {line}: read failed: {source}")]
    Io {
        line: usize,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate cue entry: {0:?}")]
    Duplicate(String),
    #[error("line {line}: unknown cue kind {kind:?}")]
    UnknownKind { line: usize, kind: String },
    #[error("line {line}: cue {surface:?} declared {kind} but has {tokens} token(s)")]
    KindMismatch {
        line: usize,
        surface: String,
        kind: CueKind,
        tokens: usize,
    },
    #[error("line {line}: cue {surface:?} cannot be matched by the tokenizer")]
    Untokenizable { line: usize, surface: String },
    #[error("line {line}: cue {surface:?} exceeds {MAX_CUE_TOKENS} tokens")]
    TooLong { line: usize, surface: String },
    #[error("line {line}: empty cue surface")]
    Empty { line: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CueKind {
    SingleWord,
    Affixal,
    Multiword,
}

impl CueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CueKind::SingleWord => "single_word",
            CueKind::Affixal => "affixal",
            CueKind::Multiword => "multiword",
        }
    }
}

impl fmt::Display for CueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CueKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "single_word" => Ok(CueKind::SingleWord),
            "affixal" => Ok(CueKind::Affixal),
            "multiword" => Ok(CueKind::Multiword),
            other => Err(other.to_string()),
        }
    }
}

/// One lexicon entry. The surface is lowercase and single-spaced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cue {
    pub surface: String,
    pub kind: CueKind,
}

impl Cue {
    pub fn token_len(&self) -> usize {
        self.surface.split(' ').count()
    }
}

/// A token produced by [`tokenize`]. `text` is the lowercased source slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
    /// Only whitespace separates this token from the previous one. Multiword
    /// cues never match across punctuation.
    pub follows_space: bool,
}

/// A located cue occurrence. Token indices are inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CueMatch {
    pub cue: Cue,
    pub first_token: usize,
    pub last_token: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Default)]
pub struct CueLexicon {
    cues: Vec<Cue>,
    index: HashMap<String, usize>,
    max_len: usize,
}

impl CueLexicon {
    /// Parses the TSV lexicon format from a byte stream.
    pub fn load<R: Read>(source: R) -> Result<Self, LexiconError> {
        let mut reader = BufReader::new(source);
        let mut lexicon = CueLexicon::default();
        let mut buf = Vec::new();
        let mut line_no = 0;
        loop {
            buf.clear();
            let read = reader.read_until(b'\n', &mut buf).map_err(|source| LexiconError::Io {
                line: line_no + 1,
                source,
            })?;
            if read == 0 {
                break;
            }
            line_no += 1;
            let line = std::str::from_utf8(&buf).map_err(|_| LexiconError::Decode { line: line_no })?;
            let line = line.trim_end_matches(['\n', '\r']);
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let mut columns = line.split('\t');
            let surface = normalize_surface(columns.next().unwrap_or_default());
            if surface.is_empty() {
                return Err(LexiconError::Empty { line: line_no });
            }
            let tokens = surface.split(' ').count();
            let kind = match columns.next().map(str::trim).filter(|k| !k.is_empty()) {
                Some(raw) => raw
                    .parse::<CueKind>()
                    .map_err(|kind| LexiconError::UnknownKind { line: line_no, kind })?,
                None if tokens > 1 => CueKind::Multiword,
                None => CueKind::SingleWord,
            };
            if (kind == CueKind::Multiword) != (tokens > 1) {
                return Err(LexiconError::KindMismatch {
                    line: line_no,
                    surface,
                    kind,
                    tokens,
                });
            }
            if tokens > MAX_CUE_TOKENS {
                return Err(LexiconError::TooLong { line: line_no, surface });
            }
            let retokenized: Vec<String> = tokenize(&surface).into_iter().map(|t| t.text).collect();
            if retokenized.join(" ") != surface {
                return Err(LexiconError::Untokenizable { line: line_no, surface });
            }
            lexicon.insert(Cue { surface, kind })?;
        }
        Ok(lexicon)
    }

    /// The cue list bundled with the crate.
    pub fn starter() -> Self {
        Self::load(STARTER_LEXICON.as_bytes()).expect("bundled lexicon is well-formed")
    }

    /// Builds a lexicon from surfaces, inferring kinds. Mostly useful in tests.
    pub fn from_surfaces<I, S>(surfaces: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let text: String = surfaces.into_iter().map(|s| format!("{}\n", s.as_ref())).collect();
        Self::load(text.as_bytes())
    }

    fn insert(&mut self, cue: Cue) -> Result<(), LexiconError> {
        if self.index.contains_key(&cue.surface) {
            return Err(LexiconError::Duplicate(cue.surface));
        }
        self.max_len = self.max_len.max(cue.token_len());
        self.index.insert(cue.surface.clone(), self.cues.len());
        self.cues.push(cue);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.cues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cues.is_empty()
    }

    /// Longest cue length in tokens; 0 for an empty lexicon.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn cues(&self) -> &[Cue] {
        &self.cues
    }

    pub fn get(&self, surface: &str) -> Option<&Cue> {
        self.index.get(surface).map(|&i| &self.cues[i])
    }

    /// Greedy longest-match cue detection over whole lowercase tokens.
    pub fn detect(&self, text: &str) -> Vec<CueMatch> {
        let tokens = tokenize(text);
        self.detect_in_tokens(&tokens)
    }

    pub fn detect_in_tokens(&self, tokens: &[Token]) -> Vec<CueMatch> {
        let mut matches = Vec::new();
        let mut window = String::new();
        let mut i = 0;
        'scan: while i < tokens.len() {
            let longest = self.max_len.min(tokens.len() - i);
            for len in (1..=longest).rev() {
                if !join_window(&tokens[i..i + len], &mut window) {
                    continue;
                }
                if let Some(cue) = self.get(&window) {
                    matches.push(CueMatch {
                        cue: cue.clone(),
                        first_token: i,
                        last_token: i + len - 1,
                        start: tokens[i].start,
                        end: tokens[i + len - 1].end,
                    });
                    i += len;
                    continue 'scan;
                }
            }
            i += 1;
        }
        matches
    }

    pub fn contains_negation(&self, text: &str) -> bool {
        // Equivalent to `!self.detect(text).is_empty()`; any hit ends the scan.
        let tokens = tokenize(text);
        let mut window = String::new();
        for i in 0..tokens.len() {
            let longest = self.max_len.min(tokens.len() - i);
            for len in 1..=longest {
                if !join_window(&tokens[i..i + len], &mut window) {
                    continue;
                }
                if self.index.contains_key(&window) {
                    return true;
                }
            }
        }
        false
    }
}

/// Writes the space-joined token texts into `buf`; false when punctuation
/// breaks the run.
fn join_window(tokens: &[Token], buf: &mut String) -> bool {
    buf.clear();
    for (k, token) in tokens.iter().enumerate() {
        if k > 0 {
            if !token.follows_space {
                return false;
            }
            buf.push(' ');
        }
        buf.push_str(&token.text);
    }
    true
}

fn normalize_surface(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-')
}

/// Splits text into lowercase word tokens with byte offsets into `text`.
///
/// A token is a maximal run of letters and digits, where an apostrophe or a
/// hyphen is kept only when it sits between two word characters. Every other
/// character separates tokens.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (pos, &(offset, c)) in chars.iter().enumerate() {
        let keep = if is_word_char(c) {
            true
        } else if is_joiner(c) && start.is_some() {
            chars.get(pos + 1).is_some_and(|&(_, next)| is_word_char(next))
        } else {
            false
        };
        match (keep, start) {
            (true, None) => start = Some(offset),
            (false, Some(s)) => {
                let token = make_token(text, &tokens, s, offset);
                tokens.push(token);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        let token = make_token(text, &tokens, s, text.len());
        tokens.push(token);
    }
    tokens
}

fn make_token(text: &str, previous: &[Token], start: usize, end: usize) -> Token {
    let follows_space = previous
        .last()
        .is_some_and(|p| text[p.end..start].chars().all(char::is_whitespace));
    Token {
        text: text[start..end].to_lowercase(),
        start,
        end,
        follows_space,
    }
}

/// Free-function form of [`CueLexicon::detect`].
pub fn detect_cues(lexicon: &CueLexicon, text: &str) -> Vec<CueMatch> {
    lexicon.detect(text)
}

pub fn contains_negation(lexicon: &CueLexicon, text: &str) -> bool {
    lexicon.contains_negation(text)
}
