//! Per-post valence and word-category ratios.

mod category;
mod lexicon;
pub(crate) mod tokenize;
mod valence;

use serde::{Deserialize, Serialize};

pub use category::{word_ratios, Category, CategoryDictionary, Pattern, WordRatios};
pub use lexicon::{EmojiDescriptions, ValenceLexicon};
pub use tokenize::{tokenize, Token};
pub use valence::{
    booster_value, is_negation, is_rule_word, normalize, ValenceBreakdown, ValenceScore,
    ValenceScorer, BOOSTER_INCREMENT, CAPS_INCREMENT, EXCLAMATION_INCREMENT, MAX_EXCLAMATIONS,
    NEGATION_SCALAR, NORMALIZATION_ALPHA,
};

/// Words that signal the event topic itself. A valence resource that scores
/// any of these would confound topic shift with sentiment shift.
pub const DEFAULT_TOPIC_WORDS: &[&str] =
    &["hurricane", "tornado", "storm", "rain", "deluge", "flood"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPost {
    pub post_id: String,
    pub valence: ValenceScore,
    pub lwpr: f64,
    pub lwnr: f64,
    pub token_count: usize,
}

/// Valence scorer and category dictionary applied together.
#[derive(Debug, Clone)]
pub struct PostScorer {
    pub valence: ValenceScorer,
    pub categories: CategoryDictionary,
}

impl PostScorer {
    pub fn new(valence: ValenceScorer, categories: CategoryDictionary) -> Self {
        PostScorer {
            valence,
            categories,
        }
    }

    pub fn score(&self, post_id: &str, text: &str) -> ScoredPost {
        let ratios = word_ratios(text, &self.categories);
        let valence = if ratios.token_count == 0 {
            ValenceScore::NoMatch
        } else {
            self.valence.score(text)
        };
        ScoredPost {
            post_id: post_id.to_string(),
            valence,
            lwpr: ratios.lwpr,
            lwnr: ratios.lwnr,
            token_count: ratios.token_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicAuditEntry {
    pub word: String,
    pub in_lexicon: bool,
    pub in_dictionary: bool,
}

impl TopicAuditEntry {
    pub fn present(&self) -> bool {
        self.in_lexicon || self.in_dictionary
    }
}

/// Membership of each topic word in the valence lexicon and in either
/// category of the dictionary.
pub fn lexicon_topic_audit<S: AsRef<str>>(
    lexicon: &ValenceLexicon,
    dict: &CategoryDictionary,
    topic_words: &[S],
) -> Vec<TopicAuditEntry> {
    topic_words
        .iter()
        .map(|w| {
            let word = w.as_ref().to_lowercase();
            TopicAuditEntry {
                in_lexicon: lexicon.contains(&word),
                in_dictionary: dict.is_positive(&word) || dict.is_negative(&word),
                word,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn data(name: &str) -> std::path::PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../data")
            .join(name)
    }

    #[test]
    fn published_lexicon_has_no_topic_words() {
        let lex = ValenceLexicon::load(&data("vader_lexicon.txt")).unwrap();
        let dict = CategoryDictionary::load(&data("categories.dic")).unwrap();
        let report = lexicon_topic_audit(&lex, &dict, DEFAULT_TOPIC_WORDS);
        assert_eq!(report.len(), 6);
        assert!(report.iter().all(|e| !e.present()), "{report:?}");
    }

    #[test]
    fn audit_detects_membership() {
        let lex = ValenceLexicon::from_entries([("happy", 2.7)]).unwrap();
        let dict = CategoryDictionary::default();
        let report = lexicon_topic_audit(&lex, &dict, &["happy"]);
        assert!(report[0].in_lexicon && report[0].present());
        let empty: [&str; 0] = [];
        assert!(lexicon_topic_audit(&lex, &dict, &empty).is_empty());
    }

    #[test]
    fn empty_post_scores_nothing() {
        let lex = ValenceLexicon::from_entries([("happy", 2.7)]).unwrap();
        let scorer = PostScorer::new(ValenceScorer::new(lex), CategoryDictionary::default());
        let s = scorer.score("p1", "   ");
        assert_eq!(s.valence, ValenceScore::NoMatch);
        assert_eq!((s.lwpr, s.lwnr, s.token_count), (0.0, 0.0, 0));
    }
}
