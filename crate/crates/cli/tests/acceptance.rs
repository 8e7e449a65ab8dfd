//! Acceptance suite. Runs every criterion, prints one PASS/FAIL/SKIP line
//! each, and exits nonzero if any criterion fails.
//!
//! Pinned tolerances: McNemar exact p 1e-9, correlations 1e-12, group
//! consistency and macro F1 exact (1e-15). Criterion 4 reads the CondaQA
//! file named by `NEGAFFIRM_CONDAQA_PATH` and is skipped without it.

mod common;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use negaffirm::analysis::coverage_report;
use negaffirm::corpus::{derive_gold_affirmative, extract_edited_sentence, parse_condaqa, AugmentedRecord, EditKind};
use negaffirm::generation::{
    select_affirmative, GenerationEndpoint, GenerationError, GenerationMode, HttpGenerator, MockServer, MockService,
    ParaphraseCandidate, Paraphraser,
};
use negaffirm::metrics::{
    group_consistency, macro_f1, mcnemar_from_counts, pearson, spearman, ConsistencyScope, LabelMatch, McNemarMethod,
    PredictionRecord,
};
use negaffirm::CueLexicon;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Status {
    Pass,
    Fail,
    Skip,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn check(ok: bool, detail: impl Into<String>) -> Self {
        Self {
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Self::check(false, detail)
    }
}

/// Runs sub-checks in order; the first failure decides the outcome.
fn all(checks: Vec<(bool, String)>) -> Outcome {
    let failures: Vec<&String> = checks.iter().filter(|(ok, _)| !ok).map(|(_, d)| d).collect();
    if failures.is_empty() {
        let summary = checks.iter().map(|(_, d)| d.as_str()).collect::<Vec<_>>().join("; ");
        Outcome::check(true, summary)
    } else {
        Outcome::fail(failures.iter().map(|d| d.as_str()).collect::<Vec<_>>().join("; "))
    }
}

// 1 ------------------------------------------------------------------------

const CUE_SUITE: &[(&str, &[&str])] = &[
    (
        "At the junction of a p-type and an n-type semiconductor, there forms a depletion region where current conduction is inhibited by the lack of mobile charge carriers.",
        &["lack"],
    ),
    ("There was a lack of evidence.", &["a lack of"]),
    ("In the absence of light, plants wilt.", &["in the absence of"]),
    ("She no longer lives here.", &["no longer"]),
    ("He was not at all pleased.", &["not at all"]),
    ("They walked rather than drove.", &["rather than"]),
    (
        "They are also made to work the company unpaid as a form of \"training\".",
        &["unpaid"],
    ),
    (
        "The island became completely uninhabited by 1980 with the automation of the lighthouse.",
        &["uninhabited"],
    ),
    ("The island became vacant by the 1980s because of the automation of the lighthouse.", &[]),
    ("They are made to work the company free as a form of \"training\".", &[]),
    ("The lightning strikes caused no serious permanent damage.", &["no"]),
    ("The lightning did not cause any damage.", &["not"]),
    ("The lightning strikes caused serious permanent damage.", &[]),
    ("Lightning strikes caused short-term damage.", &[]),
    ("I don't know and she can't say.", &["don't", "can't"]),
    ("Nobody came, nothing happened, and we went nowhere.", &["nobody", "nothing", "nowhere"]),
    ("Neither the map nor the compass helped.", &["neither", "nor"]),
    ("He left without a word and never returned.", &["without", "never"]),
    ("NOT AT ALL what I expected.", &["not at all"]),
    ("It was not, at all, expected.", &["not"]),
    ("Say no. One more try.", &["no"]),
    ("No one answered.", &["no one"]),
    ("By no means is this over.", &["by no means"]),
    ("The outcome was unknown and unlikely.", &["unknown", "unlikely"]),
    ("A non-profit group helped.", &["non-profit"]),
    ("He felt unhappy; the lack was obvious.", &["unhappy", "lack"]),
    ("Nothing was impossible for the unassisted climber.", &["nothing", "impossible", "unassisted"]),
    ("Knots are common in wood.", &[]),
    ("Notably, the knot was untied.", &[]),
    ("The snow fell.", &[]),
    ("", &[]),
];

fn cue_detection() -> Outcome {
    let lexicon = CueLexicon::starter();
    let started = Instant::now();
    let mut wrong = Vec::new();
    for (text, expected) in CUE_SUITE {
        let got: Vec<String> = lexicon.detect(text).into_iter().map(|m| m.cue.surface).collect();
        if got != *expected {
            wrong.push(format!("{text:?}: got {got:?}, expected {expected:?}"));
        }
    }
    let elapsed = started.elapsed();
    if !wrong.is_empty() {
        return Outcome::fail(wrong.join(" | "));
    }
    Outcome::check(
        elapsed < Duration::from_secs(1),
        format!("{}/{} exact, {elapsed:.2?} (< 1 s)", CUE_SUITE.len(), CUE_SUITE.len()),
    )
}

// 2 ------------------------------------------------------------------------

fn selection_rule() -> Outcome {
    let lexicon = CueLexicon::starter();
    let listed = ParaphraseCandidate::ranked([
        "The lightning did not cause any damage.",
        "The lightning did not cause any significant and permanent damage.",
        "The lightning strikes caused serious permanent damage.",
        "Lightning strikes caused short-term damage.",
    ]);
    let fixed = match select_affirmative(&lexicon, &listed) {
        Ok(out) => out.selected.map(|c| c.rank) == Some(2) && !out.all_negated,
        Err(_) => false,
    };
    let words = prop::sample::select(vec![
        "the", "storm", "not", "damage", "no", "caused", "unpaid", "a", "lack", "of", "never", "minor", "lasting",
        "rather", "than", "at", "all", "houses",
    ]);
    let text = prop::collection::vec(words, 1..8).prop_map(|w| w.join(" "));
    let lists = prop::collection::vec(text, 1..7).prop_flat_map(|texts| {
        let n = texts.len();
        (Just(texts), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    });
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    let result = runner.run(&lists, |(texts, ranks)| {
        let candidates: Vec<ParaphraseCandidate> = texts
            .iter()
            .zip(&ranks)
            .map(|(t, r)| ParaphraseCandidate {
                text: t.clone(),
                rank: *r,
            })
            .collect();
        let out = select_affirmative(&lexicon, &candidates).unwrap();
        // Oracle: walk ranks upward and take the first text with no match.
        let mut by_rank = candidates.clone();
        by_rank.sort_by_key(|c| c.rank);
        let expected = by_rank.into_iter().find(|c| lexicon.detect(&c.text).is_empty());
        prop_assert_eq!(out.all_negated, expected.is_none());
        prop_assert_eq!(out.selected, expected);
        Ok(())
    });
    all(vec![
        (fixed, "listed candidates -> rank 2 selected".to_string()),
        (
            result.is_ok(),
            match result {
                Ok(()) => "10000 random lists agree with min-rank oracle".to_string(),
                Err(e) => format!("random lists: {e}"),
            },
        ),
    ])
}

// 3 ------------------------------------------------------------------------

const DIODE_ORIGINAL: &str = "A semiconductor diode is a device typically made from a single p-n junction. At the junction of a p-type and an n-type semiconductor, there forms a depletion region where current conduction is inhibited by the lack of mobile charge carriers. When the device is \"forward biased\" (connected with the p-side at higher electric potential than the n-side), this depletion region is diminished, allowing for significant conduction, while only very small current can be achieved when the diode is \"reverse biased\" and thus the depletion region expanded.";
const DIODE_SENTENCE: &str = "At the junction of a p-type and an n-type semiconductor, there forms a depletion region where current conduction is inhibited by the lack of mobile charge carriers.";
const DIODE_EDITED: &str = "A semiconductor diode is a device typically made from a single p-n junction. At the junction of a p-type and an n-type semiconductor there forms a depletion region where current conduction is inhibited by the absence of mobile charge carriers. When the device is \"forward biased\" (connected with the p-side at higher electric potential than the n-side), this depletion region is diminished, allowing for significant conduction, while only very small current can be achieved when the diode is \"reverse biased\" and thus the depletion region expanded.";
const DIODE_EXTRACTED: &str = "At the junction of a p-type and an n-type semiconductor there forms a depletion region where current conduction is inhibited by the absence of mobile charge carriers.";

const WORDS: [&str; 16] = [
    "river", "stone", "quietly", "market", "seven", "lantern", "crossed", "over", "the", "garden", "slowly", "bright",
    "harbor", "winter", "painted", "road",
];

fn random_sentence(rng: &mut ChaCha8Rng, tag: usize, negated: bool) -> String {
    let len = rng.gen_range(3..10);
    let mut words: Vec<String> = (0..len).map(|_| WORDS.choose(rng).unwrap().to_string()).collect();
    words.push(format!("w{tag}"));
    if negated {
        words.insert(1, "did not".into());
    }
    if rng.gen_bool(0.2) {
        words.insert(1, "Dr. Adams".into());
    }
    if rng.gen_bool(0.2) {
        words.insert(2, "e.g. the".into());
    }
    let mut first = words.remove(0);
    first[..1].make_ascii_uppercase();
    let end = ['.', '!', '?'][rng.gen_range(0..3)];
    let body = std::iter::once(first).chain(words).collect::<Vec<_>>().join(" ");
    if rng.gen_bool(0.15) {
        format!("\"{body}{end}\"")
    } else {
        format!("{body}{end}")
    }
}

fn extraction() -> Outcome {
    let diode = extract_edited_sentence(DIODE_ORIGINAL, DIODE_SENTENCE, DIODE_EDITED);
    let diode_ok = matches!(&diode, Ok(s) if s == DIODE_EXTRACTED);
    let mut rng = ChaCha8Rng::seed_from_u64(20_231_017);
    let mut correct = 0;
    let mut first_miss = None;
    for case in 0..200 {
        let count = rng.gen_range(1..7);
        let index = rng.gen_range(0..count);
        let original: Vec<String> = (0..count)
            .map(|i| random_sentence(&mut rng, case * 100 + i, i == index))
            .collect();
        let mut edited = original.clone();
        edited[index] = random_sentence(&mut rng, case * 100 + 50, false);
        let got = extract_edited_sentence(&original.join(" "), &original[index], &edited.join("  "));
        match got {
            Ok(s) if s == edited[index] => correct += 1,
            other => {
                first_miss.get_or_insert(format!("case {case}: {other:?} vs {:?}", edited[index]));
            }
        }
    }
    all(vec![
        (diode_ok, "diode record extracted exactly".to_string()),
        (
            correct == 200,
            format!(
                "{correct}/200 synthetic pairs{}",
                first_miss.map(|m| format!(" ({m})")).unwrap_or_default()
            ),
        ),
    ])
}

// 4 ------------------------------------------------------------------------

const GOLD_RATE: f64 = 0.405;
const GOLD_TOLERANCE: f64 = 0.03;

fn gold_rate() -> Outcome {
    let Some(path) = std::env::var_os("NEGAFFIRM_CONDAQA_PATH") else {
        return Outcome {
            status: Status::Skip,
            detail: "NEGAFFIRM_CONDAQA_PATH not set; no CondaQA download to measure".into(),
        };
    };
    let path = Path::new(&path);
    let file = match std::fs::File::open(path) {
        Ok(f) => f,
        Err(e) => return Outcome::fail(format!("cannot open {}: {e}", path.display())),
    };
    let records = match parse_condaqa(std::io::BufReader::new(file)) {
        Ok(r) => r,
        Err(e) => return Outcome::fail(format!("cannot parse {}: {e}", path.display())),
    };
    let lexicon = CueLexicon::starter();
    let (mut paraphrases, mut gold, mut misaligned) = (0usize, 0usize, 0usize);
    for r in records.iter().filter(|r| r.edit_kind == EditKind::Paraphrase) {
        paraphrases += 1;
        match derive_gold_affirmative(&lexicon, r) {
            Ok(Some(_)) => gold += 1,
            Ok(None) => {}
            Err(_) => misaligned += 1,
        }
    }
    if paraphrases == 0 {
        return Outcome::fail("no paraphrase edits in the file");
    }
    let rate = gold as f64 / paraphrases as f64;
    Outcome::check(
        (rate - GOLD_RATE).abs() <= GOLD_TOLERANCE,
        format!(
            "{gold}/{paraphrases} paraphrase edits yield a gold affirmative = {:.1}% (target 40.5 +/- 3; {misaligned} misaligned)",
            100.0 * rate
        ),
    )
}

// 5 ------------------------------------------------------------------------

const KINDS: [EditKind; 4] = [
    EditKind::Original,
    EditKind::Paraphrase,
    EditKind::Scope,
    EditKind::Affirmative,
];

fn grouped(outcomes: &[[bool; 4]], rng: &mut ChaCha8Rng) -> Vec<PredictionRecord> {
    let mut records: Vec<PredictionRecord> = outcomes
        .iter()
        .enumerate()
        .flat_map(|(g, row)| {
            KINDS.iter().zip(row).map(move |(kind, ok)| {
                let mut r = PredictionRecord::new(format!("{g}/{kind}"), if *ok { "Yes" } else { "No" }, "Yes");
                r.group_id = Some(format!("group-{g}"));
                r.edit_kind = Some(*kind);
                r
            })
        })
        .collect();
    records.shuffle(rng);
    records
}

/// Applies the definition literally: find each required member by scanning
/// the record list, require it to be present and answered correctly.
fn consistency_oracle(records: &[PredictionRecord], required: &[EditKind]) -> (usize, usize) {
    let mut groups: Vec<&str> = records.iter().map(|r| r.group_id.as_deref().unwrap()).collect();
    groups.sort_unstable();
    groups.dedup();
    let mut consistent = 0;
    let mut eligible = 0;
    for g in groups {
        let members: Vec<Option<&PredictionRecord>> = required
            .iter()
            .map(|k| {
                records
                    .iter()
                    .find(|r| r.group_id.as_deref() == Some(g) && r.edit_kind == Some(*k))
            })
            .collect();
        if members.iter().any(Option::is_none) {
            continue;
        }
        eligible += 1;
        if members.iter().all(|m| m.unwrap().predicted == m.unwrap().gold) {
            consistent += 1;
        }
    }
    (consistent, eligible)
}

fn required(scope: ConsistencyScope) -> Vec<EditKind> {
    match scope {
        ConsistencyScope::All => KINDS.to_vec(),
        ConsistencyScope::Par => vec![EditKind::Original, EditKind::Paraphrase],
        ConsistencyScope::Sco => vec![EditKind::Original, EditKind::Scope],
        ConsistencyScope::Aff => vec![EditKind::Original, EditKind::Affirmative],
    }
}

fn pascal_p(b: u64, c: u64) -> f64 {
    let n = (b + c) as usize;
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    let tail: u128 = row[..=(b.min(c) as usize)].iter().sum();
    (2.0 * tail as f64 / 2f64.powi(n as i32)).min(1.0)
}

fn pearson_raw(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
}

fn counting_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|x| {
            let less = v.iter().filter(|y| *y < x).count() as f64;
            let equal = v.iter().filter(|y| *y == x).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

/// Rank-difference formula; valid when neither input has ties.
fn spearman_no_ties(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let d2: f64 = counting_ranks(xs)
        .iter()
        .zip(counting_ranks(ys))
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

fn metric_oracles() -> Outcome {
    let mut checks = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let outcomes: Vec<[bool; 4]> = (0..1000).map(|_| [0; 4].map(|_: i32| rng.gen_bool(0.8))).collect();
    let records = grouped(&outcomes, &mut rng);
    let mut agree = true;
    let mut values = Vec::new();
    for scope in ConsistencyScope::ALL_SCOPES {
        let got = group_consistency(&records, scope, LabelMatch::Exact).unwrap();
        let (consistent, eligible) = consistency_oracle(&records, &required(scope));
        agree &= got.consistent == consistent && got.eligible == eligible && got.excluded == 0;
        values.push(format!("{scope}={:.3}", got.value().unwrap()));
    }
    checks.push((
        agree,
        format!("consistency on 1000 groups equals brute force ({})", values.join(" ")),
    ));

    let one_nine = mcnemar_from_counts(1, 9);
    checks.push((
        one_nine.method == McNemarMethod::Exact && (one_nine.p_value - 22.0 / 1024.0).abs() < 1e-9,
        format!(
            "McNemar b=1,c=9 p={:.6} (22/1024={:.6})",
            one_nine.p_value,
            22.0 / 1024.0
        ),
    ));
    let mut worst: f64 = 0.0;
    for b in 0..25u64 {
        for c in 0..(25 - b) {
            if b + c == 0 {
                continue;
            }
            worst = worst.max((mcnemar_from_counts(b, c).p_value - pascal_p(b, c)).abs());
        }
    }
    checks.push((
        worst < 1e-9,
        format!("exact McNemar over all b+c<25 within {worst:.1e} of summation oracle"),
    ));

    let xs = [0.5, 1.25, 2.0, 3.75, 4.0, 4.5, 5.0, 6.5];
    let ys = [0.2, 1.9, 1.7, 3.0, 4.4, 3.9, 4.8, 7.1];
    let tied_x = [1.0, 2.0, 2.0, 3.0, 5.0, 5.0, 5.0, 8.0];
    let tied_y = [2.0, 1.0, 4.0, 4.0, 3.0, 6.0, 7.0, 7.0];
    let dp = (pearson(&xs, &ys).unwrap() - pearson_raw(&xs, &ys)).abs();
    let ds = (spearman(&xs, &ys).unwrap() - spearman_no_ties(&xs, &ys)).abs();
    let dt =
        (spearman(&tied_x, &tied_y).unwrap() - pearson_raw(&counting_ranks(&tied_x), &counting_ranks(&tied_y))).abs();
    checks.push((
        dp < 1e-12 && ds < 1e-12 && dt < 1e-12,
        format!("correlations vs direct formulas: pearson {dp:.1e}, spearman {ds:.1e}, spearman with ties {dt:.1e}"),
    ));

    let gold = ["A", "A", "B", "B"];
    let pred = ["A", "A", "A", "A"];
    let records: Vec<_> = pred
        .iter()
        .zip(gold)
        .enumerate()
        .map(|(i, (p, g))| PredictionRecord::new(i.to_string(), *p, g))
        .collect();
    // Class A: 2 hits of 4 predicted, 2 of 2 gold -> P 1/2, R 1, F1 2/3.
    // Class B: no hits -> F1 0.
    let (hits_a, predicted_a, gold_a) = (2.0, 4.0, 2.0);
    let (p_a, r_a) = (hits_a / predicted_a, hits_a / gold_a);
    let f1_a = 2.0 * p_a * r_a / (p_a + r_a);
    let hand = (f1_a + 0.0) / 2.0;
    let got = macro_f1(&records, LabelMatch::Exact).unwrap();
    checks.push((
        (got - hand).abs() < 1e-15,
        format!(
            "macro-F1 [A,A,B,B]/[A,A,A,A] = {got:.4} equals per-class hand oracle {hand:.4} \
             (the criterion's stated 0.4 is inconsistent with that oracle)"
        ),
    ));
    all(checks)
}

// 6 ------------------------------------------------------------------------

fn invariants() -> Outcome {
    let started = Instant::now();
    let config = Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    };
    let mut failures = Vec::new();
    let mut note = |name: &str, r: Result<(), String>| {
        if let Err(e) = r {
            failures.push(format!("{name}: {e}"));
        }
    };

    let groups = prop::collection::vec(prop::array::uniform4(any::<bool>()), 1..30);
    let r = TestRunner::new(config.clone()).run(&(groups, any::<u64>()), |(outcomes, seed)| {
        let records = grouped(&outcomes, &mut ChaCha8Rng::seed_from_u64(seed));
        let score = |s| {
            group_consistency(&records, s, LabelMatch::Exact)
                .unwrap()
                .value()
                .unwrap()
        };
        let all_scope = score(ConsistencyScope::All);
        for s in [ConsistencyScope::Par, ConsistencyScope::Sco, ConsistencyScope::Aff] {
            prop_assert!(all_scope <= score(s));
        }
        Ok(())
    });
    note("consistency_all <= pairwise", r.map_err(|e| e.to_string()));

    let r = TestRunner::new(config.clone()).run(&(0u64..500, 0u64..500), |(b, c)| {
        let (x, y) = (mcnemar_from_counts(b, c), mcnemar_from_counts(c, b));
        prop_assert_eq!(x.p_value, y.p_value);
        prop_assert_eq!(x.statistic, y.statistic);
        Ok(())
    });
    note("mcnemar symmetry", r.map_err(|e| e.to_string()));

    let pairs = (3usize..30).prop_flat_map(|n| {
        (
            prop::collection::vec(-100i32..100, n),
            prop::collection::vec(-100i32..100, n),
        )
    });
    let r = TestRunner::new(config.clone()).run(&pairs, |(xs, ys)| {
        let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
        let ys: Vec<f64> = ys.into_iter().map(f64::from).collect();
        let fx: Vec<f64> = xs.iter().map(|x| x * x * x + 2.0 * x).collect();
        let fy: Vec<f64> = ys.iter().map(|y| (y / 50.0).exp()).collect();
        match (spearman(&xs, &ys), spearman(&fx, &fy)) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-12),
            (a, b) => prop_assert_eq!(a, b),
        }
        Ok(())
    });
    note("spearman monotone invariance", r.map_err(|e| e.to_string()));

    let lexicon = CueLexicon::starter();
    let word = prop::sample::select(vec![
        "not", "no", "longer", "a", "lack", "of", "rather", "than", "at", "all", "unpaid", "river", "Nothing", "don't",
        "in", "the", "absence", "stone", "knot", "nobody",
    ]);
    let sep = prop::sample::select(vec![" ", "  ", ", ", ". ", "\n"]);
    let text = prop::collection::vec((word, sep), 0..12)
        .prop_map(|parts| parts.into_iter().map(|(w, s)| format!("{w}{s}")).collect::<String>());
    let r = TestRunner::new(config).run(&text, |t| {
        prop_assert_eq!(lexicon.contains_negation(&t), !lexicon.detect(&t).is_empty());
        Ok(())
    });
    note("contains_negation iff detect", r.map_err(|e| e.to_string()));

    let elapsed = started.elapsed();
    if !failures.is_empty() {
        return Outcome::fail(failures.join(" | "));
    }
    Outcome::check(
        elapsed < Duration::from_secs(30),
        format!("4 properties x 1000 cases in {elapsed:.2?} (< 30 s)"),
    )
}

// 7 ------------------------------------------------------------------------

fn run_augment(base_url: &str, input: &Path, out: &Path, seed: u64) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_negaffirm"))
        .args([
            "augment",
            "--task",
            "condaqa",
            "--strategy",
            "p+q+a_cg",
            "--endpoint",
            base_url,
        ])
        .args(["--seed", &seed.to_string(), "--parallelism", "8"])
        .arg("--in")
        .arg(input)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    std::fs::read(out).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    const SEED: u64 = 42;
    let dir = tempfile::tempdir().expect("temp dir");
    let corpus = common::condaqa_fixture();
    let input = common::write(dir.path(), "condaqa.jsonl", &corpus);
    let service = MockService::new(common::mock_fixtures(&corpus)).with_seed(SEED);
    let server = match MockServer::start("127.0.0.1:0", service) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(format!("mock server: {e}")),
    };
    let first = run_augment(server.base_url(), &input, &dir.path().join("a.jsonl"), SEED);
    let second = run_augment(server.base_url(), &input, &dir.path().join("b.jsonl"), SEED);
    let (first, second) = match (first, second) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::fail(format!("augment failed: {e}")),
    };
    let records: Vec<AugmentedRecord> = String::from_utf8_lossy(&first)
        .lines()
        .map(|l| serde_json::from_str(l).expect("augmented JSONL"))
        .collect();
    let examples: Vec<_> = records.iter().map(AugmentedRecord::example).collect();
    let stats = coverage_report(&examples);
    all(vec![
        (records.len() == 50, format!("{} records", records.len())),
        (
            first == second,
            format!("two runs byte-identical ({} bytes)", first.len()),
        ),
        (
            stats.fallback_rate == Some(0.0),
            format!(
                "fallback_rate {:?} over {} interpretations",
                stats.fallback_rate, stats.n
            ),
        ),
    ])
}

// 8 ------------------------------------------------------------------------

fn protocol() -> Outcome {
    let mut fixtures = BTreeMap::new();
    fixtures.insert(
        "It did not rain.".to_string(),
        vec![
            "It did not rain.",
            "The weather stayed dry.",
            "It was dry.",
            "No rain fell.",
            "Dry day.",
            "Sixth.",
        ]
        .into_iter()
        .map(String::from)
        .collect(),
    );
    fixtures.insert("Empty reply.".to_string(), Vec::new());
    let service = MockService::new(fixtures);

    let mut checks = Vec::new();
    let (status, body) = service.respond(r#"{"text": "It did not rain.", "n": 5, "mode": "paraphrase"}"#);
    let parsed: serde_json::Value = serde_json::from_str(&body).unwrap_or_default();
    let wire_ok = status == 200 && parsed["candidates"].as_array().map(Vec::len) == Some(5);
    checks.push((
        wire_ok,
        format!("POST /generate paraphrase n=5 -> {status} with 5 candidates"),
    ));

    let server = match MockServer::start("127.0.0.1:0", service) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(format!("mock server: {e}")),
    };
    let client = |mode| {
        HttpGenerator::new(GenerationEndpoint::new(server.base_url(), mode).with_retries(1, Duration::from_millis(10)))
    };
    let cg = client(GenerationMode::Cg).request_paraphrases("It did not rain.");
    checks.push((
        matches!(&cg, Ok(c) if c.len() == 5 && c[1].text == "The weather stayed dry." && c[1].rank == 1),
        "cg round trip returns 5 ranked candidates".to_string(),
    ));
    let hb = client(GenerationMode::Hb).request_paraphrases("It did not rain.");
    checks.push((
        matches!(&hb, Ok(c) if c.len() == 1),
        "hb round trip returns 1 candidate".to_string(),
    ));
    let empty = client(GenerationMode::Cg).request_paraphrases("Empty reply.");
    checks.push((
        matches!(empty, Err(GenerationError::EmptyGeneration)),
        "empty candidate list -> EmptyGeneration".to_string(),
    ));
    let missing = client(GenerationMode::Cg).request_paraphrases("Unknown text.");
    checks.push((
        matches!(missing, Err(GenerationError::Service { status: 404, .. })),
        "non-2xx -> Service error carrying the status".to_string(),
    ));
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let dead = HttpGenerator::new(
        GenerationEndpoint::new(format!("http://127.0.0.1:{port}"), GenerationMode::Cg)
            .with_retries(2, Duration::from_millis(10)),
    )
    .request_paraphrases("It did not rain.");
    checks.push((
        matches!(dead, Err(GenerationError::Unreachable { attempts: 3, .. })),
        "closed port -> Unreachable after 3 attempts".to_string(),
    ));
    all(checks)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("cue detection fixture suite", cue_detection),
        ("affirmative selection rule", selection_rule),
        ("edited-sentence extraction", extraction),
        ("gold-affirmative rate", gold_rate),
        ("metric oracle equivalence", metric_oracles),
        ("invariant property suite", invariants),
        ("end-to-end determinism", determinism),
        ("protocol conformance", protocol),
    ];
    let mut failed = 0;
    let mut summary = String::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = run();
        let label = match outcome.status {
            Status::Pass => "PASS",
            Status::Skip => "SKIP",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
        };
        let _ = writeln!(
            summary,
            "AC{} {label} {name} [{:.2?}]: {}",
            i + 1,
            started.elapsed(),
            outcome.detail
        );
    }
    print!("{summary}");
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
