//! Shared fixtures for the CLI integration and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use negaffirm::corpus::{parse_condaqa, record_sentence};
use negaffirm::CueLexicon;
use serde_json::json;

const TOWNS: [&str; 13] = [
    "Alder",
    "Birch",
    "Cedar",
    "Dunmore",
    "Elmsworth",
    "Fairholt",
    "Glenrock",
    "Harrow",
    "Ivybridge",
    "Juniper",
    "Kestrel",
    "Larchmont",
    "Millbrook",
];

fn passage(town: &str, middle: &str) -> String {
    format!("The village of {town} sits by a slow river. {middle} Visitors still come every summer.")
}

/// Synthetic CondaQA groups: 12 complete groups plus one group holding only
/// an original and a paraphrase edit, 50 records in all.
pub fn condaqa_fixture() -> String {
    let mut lines = Vec::new();
    for (g, town) in TOWNS.iter().enumerate() {
        let years = g + 2;
        let negated = format!("The old bridge in {town} was not repaired for {years} years.");
        let original = passage(town, &negated);
        // Even groups rephrase the negation away, odd ones keep a cue.
        let paraphrase = if g % 2 == 0 {
            format!("The old bridge in {town} stayed broken for {years} years.")
        } else {
            format!("The old bridge in {town} was never fixed for {years} years.")
        };
        let edits: Vec<(&str, String, &str)> = vec![
            ("original", original.clone(), "No"),
            ("paraphrase", passage(town, &paraphrase), "No"),
            (
                "scope",
                passage(
                    town,
                    &format!("The old bridge in {town} was not repaired until {years} years ago."),
                ),
                "Yes",
            ),
            (
                "affirmative",
                passage(
                    town,
                    &format!("The old bridge in {town} was repaired {years} years ago."),
                ),
                "Yes",
            ),
        ];
        let take = if g == TOWNS.len() - 1 { 2 } else { 4 };
        for (kind, edited, answer) in edits.into_iter().take(take) {
            lines.push(
                json!({
                    "group_id": format!("g{g:02}"),
                    "original_passage": original,
                    "sentence": negated,
                    "cue": "not",
                    "edited_passage": edited,
                    "edit_type": kind,
                    "question": format!("Could visitors cross the bridge in {town} recently?"),
                    "answer": answer,
                })
                .to_string(),
            );
        }
    }
    lines.join("\n") + "\n"
}

/// Mock-service fixtures for every negated sentence the fixture corpus sends
/// for generation. Rank 0 keeps the negation; rank 1 is cue-free.
pub fn mock_fixtures(corpus: &str) -> BTreeMap<String, Vec<String>> {
    let lexicon = CueLexicon::starter();
    let mut fixtures = BTreeMap::new();
    for record in parse_condaqa(corpus.as_bytes()).expect("fixture corpus parses") {
        for sentence in [
            record_sentence(&record).expect("fixture aligns"),
            record.negated_sentence.clone(),
        ] {
            if !lexicon.contains_negation(&sentence) {
                continue;
            }
            let town = record
                .question
                .split_whitespace()
                .nth(6)
                .unwrap_or("the village")
                .trim_end_matches('?');
            fixtures.entry(sentence.clone()).or_insert_with(|| {
                vec![
                    sentence.clone(),
                    format!("People in {town} remember the bridge staying broken."),
                    format!("The bridge in {town} waited a long time for repairs."),
                    format!("Nobody in {town} fixed the bridge."),
                ]
            });
        }
    }
    fixtures
}

pub fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).expect("write fixture");
    path
}
