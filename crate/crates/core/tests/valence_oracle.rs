//! Compound valence against fixture values recomputed from the reference
//! rule implementation (unrounded).

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use landfall_core::sentiment::EmojiDescriptions;
use landfall_core::{ValenceLexicon, ValenceScore, ValenceScorer};

const TOLERANCE: f64 = 1e-9;
const BUDGET: Duration = Duration::from_secs(1);

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

struct Case {
    sentence: String,
    matched: bool,
    compound: f64,
}

fn fixture() -> Vec<Case> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/valence_oracle.tsv");
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            assert_eq!(cols.len(), 3, "bad fixture row {l:?}");
            Case {
                sentence: cols[0].to_string(),
                matched: cols[1] == "1",
                compound: cols[2].parse().unwrap(),
            }
        })
        .collect()
}

#[test]
fn fixture_has_200_sentences() {
    assert_eq!(fixture().len(), 200);
}

#[test]
fn compound_matches_reference() {
    let cases = fixture();
    let start = Instant::now();
    let lexicon = ValenceLexicon::load(&data("vader_lexicon.txt")).unwrap();
    let emojis = EmojiDescriptions::load(&data("emoji_utf8_lexicon.txt")).unwrap();
    let scorer = ValenceScorer::new(lexicon).with_emojis(emojis);
    let scores: Vec<ValenceScore> = cases.iter().map(|c| scorer.score(&c.sentence)).collect();
    let elapsed = start.elapsed();

    let mut worst = 0.0f64;
    for (case, score) in cases.iter().zip(&scores) {
        match (case.matched, score) {
            (true, ValenceScore::Value(v)) => {
                let err = (v - case.compound).abs();
                worst = worst.max(err);
                assert!(
                    err <= TOLERANCE,
                    "{:?}: got {v}, reference {} (diff {err:e})",
                    case.sentence,
                    case.compound
                );
            }
            (false, ValenceScore::NoMatch) => assert_eq!(case.compound, 0.0),
            (m, s) => panic!("{:?}: reference matched={m}, got {s:?}", case.sentence),
        }
    }
    println!(
        "max |diff| = {worst:e}, {} sentences in {elapsed:?}",
        cases.len()
    );
    assert!(elapsed < BUDGET, "scoring took {elapsed:?}");
}
