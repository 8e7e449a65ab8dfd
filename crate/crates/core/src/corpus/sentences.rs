//! Rule-based sentence segmentation.
//!
//! A boundary follows `.`, `!` or `?` (plus any closing quotes or brackets
//! right after it) when the next word starts with an uppercase letter, possibly
//! behind opening quotes or brackets, or the text ends. A period that closes a known abbreviation never ends a
//! sentence.

use std::ops::Range;

pub const ABBREVIATIONS: &[&str] = &["Mr.", "Mrs.", "Ms.", "Dr.", "St.", "e.g.", "i.e.", "vs."];

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}')
}

const OPENERS: [char; 6] = ['"', '\'', '(', '[', '\u{201c}', '\u{2018}'];

fn ends_with_abbreviation(text: &str, dot: usize) -> bool {
    let word_start = text[..dot].rfind(char::is_whitespace).map_or(0, |i| i + 1);
    let word = text[word_start..=dot].trim_start_matches(['(', '"', '\'', '\u{201c}']);
    ABBREVIATIONS.contains(&word)
}

/// Byte ranges of sentences in `text`, trimmed of surrounding whitespace.
pub fn split_sentences(text: &str) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if start.is_none() {
            if c.is_whitespace() {
                continue;
            }
            start = Some(i);
        }
        if !is_terminator(c) {
            continue;
        }
        if c == '.' && ends_with_abbreviation(text, i) {
            continue;
        }
        let mut end = i + c.len_utf8();
        while let Some(&(j, next)) = chars.peek() {
            if is_terminator(next) || is_closer(next) {
                end = j + next.len_utf8();
                chars.next();
            } else {
                break;
            }
        }
        let rest = &text[end..];
        let after_space = rest.trim_start();
        let boundary = match after_space.trim_start_matches(OPENERS).chars().next() {
            None => true,
            Some(first) => after_space.len() < rest.len() && first.is_uppercase(),
        };
        if boundary {
            spans.push(start.take().expect("sentence started")..end);
        }
    }
    if let Some(s) = start {
        let end = s + text[s..].trim_end().len();
        spans.push(s..end);
    }
    spans
}

/// Sentence texts, in order.
pub fn sentences(text: &str) -> Vec<&str> {
    split_sentences(text).into_iter().map(|r| &text[r]).collect()
}
