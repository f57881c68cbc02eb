//! Rule-based compound valence.
//!
//! Each token found in the valence lexicon contributes its rating, adjusted
//! by the surrounding context: negators in a three-token lookback flip and
//! damp it, booster and dampener words shift its magnitude, an ALL-CAPS token
//! in mixed-case text is emphasised, and a contrastive `but` reweights the
//! clauses on either side. Exclamation and question marks then amplify the
//! sum `s`, which is squashed to `s / sqrt(s^2 + 15)`.
//!
//! The constants and the order of every adjustment follow the published
//! reference rule implementation exactly, including its quirks, so scores
//! agree with it to floating-point precision.

use serde::{Deserialize, Serialize};

use super::lexicon::{EmojiDescriptions, ValenceLexicon};
use super::tokenize::{is_all_caps, split_words, strip_punct_if_word, trim_separators};

pub const BOOSTER_INCREMENT: f64 = 0.293;
pub const BOOSTER_DECREMENT: f64 = -0.293;
pub const CAPS_INCREMENT: f64 = 0.733;
pub const NEGATION_SCALAR: f64 = -0.74;
pub const EXCLAMATION_INCREMENT: f64 = 0.292;
pub const MAX_EXCLAMATIONS: usize = 4;
pub const QUESTION_INCREMENT: f64 = 0.18;
pub const MAX_QUESTION_EMPHASIS: f64 = 0.96;
pub const NORMALIZATION_ALPHA: f64 = 15.0;

const NEGATIONS: &[&str] = &[
    "aint",
    "arent",
    "cannot",
    "cant",
    "couldnt",
    "darent",
    "didnt",
    "doesnt",
    "ain't",
    "aren't",
    "can't",
    "couldn't",
    "daren't",
    "didn't",
    "doesn't",
    "dont",
    "hadnt",
    "hasnt",
    "havent",
    "isnt",
    "mightnt",
    "mustnt",
    "neither",
    "don't",
    "hadn't",
    "hasn't",
    "haven't",
    "isn't",
    "mightn't",
    "mustn't",
    "neednt",
    "needn't",
    "never",
    "none",
    "nope",
    "nor",
    "not",
    "nothing",
    "nowhere",
    "oughtnt",
    "shant",
    "shouldnt",
    "uhuh",
    "wasnt",
    "werent",
    "oughtn't",
    "shan't",
    "shouldn't",
    "uh-uh",
    "wasn't",
    "weren't",
    "without",
    "wont",
    "wouldnt",
    "won't",
    "wouldn't",
    "rarely",
    "seldom",
    "despite",
];

const BOOSTERS_UP: &[&str] = &[
    "absolutely",
    "amazingly",
    "awfully",
    "completely",
    "considerable",
    "considerably",
    "decidedly",
    "deeply",
    "effing",
    "enormous",
    "enormously",
    "entirely",
    "especially",
    "exceptional",
    "exceptionally",
    "extreme",
    "extremely",
    "fabulously",
    "flipping",
    "flippin",
    "frackin",
    "fracking",
    "fricking",
    "frickin",
    "frigging",
    "friggin",
    "fully",
    "fuckin",
    "fucking",
    "fuggin",
    "fugging",
    "greatly",
    "hella",
    "highly",
    "hugely",
    "incredible",
    "incredibly",
    "intensely",
    "major",
    "majorly",
    "more",
    "most",
    "particularly",
    "purely",
    "quite",
    "really",
    "remarkably",
    "so",
    "substantially",
    "thoroughly",
    "total",
    "totally",
    "tremendous",
    "tremendously",
    "uber",
    "unbelievably",
    "unusually",
    "utter",
    "utterly",
    "very",
];

const BOOSTERS_DOWN: &[&str] = &[
    "almost",
    "barely",
    "hardly",
    "just enough",
    "kind of",
    "kinda",
    "kindof",
    "kind-of",
    "less",
    "little",
    "marginal",
    "marginally",
    "occasional",
    "occasionally",
    "partly",
    "scarce",
    "scarcely",
    "slight",
    "slightly",
    "somewhat",
    "sort of",
    "sorta",
    "sortof",
    "sort-of",
];

const SPECIAL_CASES: &[(&str, f64)] = &[
    ("the shit", 3.0),
    ("the bomb", 3.0),
    ("bad ass", 1.5),
    ("badass", 1.5),
    ("bus stop", 0.0),
    ("yeah right", -2.0),
    ("kiss of death", -1.5),
    ("to die for", 3.0),
    ("beating heart", 3.5),
];

/// Booster or dampener increment for a lowercase word or n-gram.
pub fn booster_value(word: &str) -> Option<f64> {
    if BOOSTERS_UP.contains(&word) {
        Some(BOOSTER_INCREMENT)
    } else if BOOSTERS_DOWN.contains(&word) {
        Some(BOOSTER_DECREMENT)
    } else {
        None
    }
}

pub fn is_negation(word_lower: &str) -> bool {
    NEGATIONS.contains(&word_lower) || word_lower.contains("n't")
}

/// True for words that can trigger a rule on a neighbour: boosters and
/// dampeners (including parts of multi-word ones), negations, words of the
/// special idioms, and the handful of words the rules look for by name.
pub fn is_rule_word(word_lower: &str) -> bool {
    const NAMED: &[&str] = &["no", "least", "but", "kind", "of", "or", "nor"];
    let in_phrase = |list: &[&str]| list.iter().any(|p| p.split(' ').any(|w| w == word_lower));
    NAMED.contains(&word_lower)
        || is_negation(word_lower)
        || in_phrase(BOOSTERS_UP)
        || in_phrase(BOOSTERS_DOWN)
        || SPECIAL_CASES
            .iter()
            .any(|(k, _)| k.split(' ').any(|w| w == word_lower))
}

fn special_case(seq: &str) -> Option<f64> {
    SPECIAL_CASES
        .iter()
        .find(|(k, _)| *k == seq)
        .map(|&(_, v)| v)
}

/// Valence of one text. `NoMatch` (no lexicon term present) is distinct from
/// `Value(0.0)` (terms present, net neutral).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ValenceScore {
    NoMatch,
    Value(f64),
}

impl ValenceScore {
    pub fn value(self) -> Option<f64> {
        match self {
            ValenceScore::NoMatch => None,
            ValenceScore::Value(v) => Some(v),
        }
    }

    pub fn is_match(self) -> bool {
        matches!(self, ValenceScore::Value(_))
    }
}

/// `s / sqrt(s^2 + alpha)`, clamped to `[-1, 1]`.
pub fn normalize(score: f64, alpha: f64) -> f64 {
    (score / (score * score + alpha).sqrt()).clamp(-1.0, 1.0)
}

/// Rule-adjusted score before normalization, plus whether any token matched.
#[derive(Debug, Clone, PartialEq)]
pub struct ValenceBreakdown {
    pub matched: bool,
    /// Per-token contributions after all rules; zero for unmatched tokens.
    pub contributions: Vec<f64>,
    pub punctuation_emphasis: f64,
    pub compound: f64,
}

/// Valence scorer holding an immutable lexicon. Cheap to share across threads.
#[derive(Debug, Clone)]
pub struct ValenceScorer {
    lexicon: ValenceLexicon,
    emojis: EmojiDescriptions,
}

struct Words {
    original: Vec<String>,
    lower: Vec<String>,
    cap_differential: bool,
}

impl ValenceScorer {
    pub fn new(lexicon: ValenceLexicon) -> Self {
        ValenceScorer {
            lexicon,
            emojis: EmojiDescriptions::default(),
        }
    }

    pub fn with_emojis(mut self, emojis: EmojiDescriptions) -> Self {
        self.emojis = emojis;
        self
    }

    pub fn lexicon(&self) -> &ValenceLexicon {
        &self.lexicon
    }

    pub fn score(&self, text: &str) -> ValenceScore {
        let b = self.breakdown(text);
        if b.matched {
            ValenceScore::Value(b.compound)
        } else {
            ValenceScore::NoMatch
        }
    }

    /// Replace known emoji characters by their descriptions, separated by
    /// single spaces from preceding non-space text.
    fn expand_emojis(&self, text: &str) -> String {
        if self.emojis.is_empty() {
            return text.to_string();
        }
        let mut out = String::with_capacity(text.len());
        let mut prev_space = true;
        for c in text.chars() {
            if let Some(desc) = self.emojis.get(c) {
                if !prev_space {
                    out.push(' ');
                }
                out.push_str(desc);
                prev_space = false;
            } else {
                out.push(c);
                prev_space = c == ' ';
            }
        }
        out
    }

    pub fn breakdown(&self, text: &str) -> ValenceBreakdown {
        let expanded = self.expand_emojis(text);
        let text = trim_separators(&expanded);

        let original: Vec<String> = split_words(text)
            .map(|w| strip_punct_if_word(w).to_string())
            .collect();
        let lower: Vec<String> = original.iter().map(|w| w.to_lowercase()).collect();
        let caps = original.iter().filter(|w| is_all_caps(w)).count();
        let cap_differential = caps > 0 && caps < original.len();
        let words = Words {
            original,
            lower,
            cap_differential,
        };

        let n = words.lower.len();
        let mut sentiments = Vec::with_capacity(n);
        for i in 0..n {
            let item = words.lower[i].as_str();
            if booster_value(item).is_some()
                || (i + 1 < n && item == "kind" && words.lower[i + 1] == "of")
            {
                sentiments.push(0.0);
                continue;
            }
            sentiments.push(self.token_valence(&words, i));
        }
        but_check(&words.lower, &mut sentiments);

        let matched = words.lower.iter().any(|w| self.lexicon.contains(w));
        let punctuation_emphasis = punctuation_emphasis(text);
        let compound = if sentiments.is_empty() {
            0.0
        } else {
            let mut sum: f64 = sentiments.iter().sum();
            if sum > 0.0 {
                sum += punctuation_emphasis;
            } else if sum < 0.0 {
                sum -= punctuation_emphasis;
            }
            normalize(sum, NORMALIZATION_ALPHA)
        };
        ValenceBreakdown {
            matched,
            contributions: sentiments,
            punctuation_emphasis,
            compound,
        }
    }

    fn in_lexicon(&self, word: &str) -> bool {
        self.lexicon.contains(word)
    }

    fn token_valence(&self, words: &Words, i: usize) -> f64 {
        let lower = &words.lower;
        let item = lower[i].as_str();
        let Some(rating) = self.lexicon.get(item) else {
            return 0.0;
        };
        let mut valence = rating;

        // "no" directly before another lexicon term acts as a negator, not a term.
        if item == "no" && i + 1 < lower.len() && self.in_lexicon(&lower[i + 1]) {
            valence = 0.0;
        }
        if (i > 0 && lower[i - 1] == "no")
            || (i > 1 && lower[i - 2] == "no")
            || (i > 2 && lower[i - 3] == "no" && (lower[i - 1] == "or" || lower[i - 1] == "nor"))
        {
            valence = rating * NEGATION_SCALAR;
        }

        if is_all_caps(&words.original[i]) && words.cap_differential {
            if valence > 0.0 {
                valence += CAPS_INCREMENT;
            } else {
                valence -= CAPS_INCREMENT;
            }
        }

        for start in 0..3 {
            if i > start && !self.in_lexicon(&lower[i - (start + 1)]) {
                let mut s = scalar_inc_dec(
                    &words.original[i - (start + 1)],
                    &lower[i - (start + 1)],
                    valence,
                    words.cap_differential,
                );
                if start == 1 && s != 0.0 {
                    s *= 0.95;
                }
                if start == 2 && s != 0.0 {
                    s *= 0.9;
                }
                valence += s;
                valence = negation_check(valence, lower, start, i);
                if start == 2 {
                    valence = special_idioms_check(valence, lower, i);
                }
            }
        }

        self.least_check(valence, lower, i)
    }

    fn least_check(&self, valence: f64, lower: &[String], i: usize) -> f64 {
        if i > 1 && !self.in_lexicon(&lower[i - 1]) && lower[i - 1] == "least" {
            if lower[i - 2] != "at" && lower[i - 2] != "very" {
                return valence * NEGATION_SCALAR;
            }
        } else if i > 0 && !self.in_lexicon(&lower[i - 1]) && lower[i - 1] == "least" {
            return valence * NEGATION_SCALAR;
        }
        valence
    }
}

fn scalar_inc_dec(word: &str, word_lower: &str, valence: f64, cap_differential: bool) -> f64 {
    let Some(mut scalar) = booster_value(word_lower) else {
        return 0.0;
    };
    if valence < 0.0 {
        scalar *= -1.0;
    }
    if is_all_caps(word) && cap_differential {
        if valence > 0.0 {
            scalar += CAPS_INCREMENT;
        } else {
            scalar -= CAPS_INCREMENT;
        }
    }
    scalar
}

fn negation_check(valence: f64, lower: &[String], start: usize, i: usize) -> f64 {
    let w = |k: usize| lower[i - k].as_str();
    match start {
        0 => {
            if is_negation(w(1)) {
                return valence * NEGATION_SCALAR;
            }
        }
        1 => {
            if w(2) == "never" && (w(1) == "so" || w(1) == "this") {
                return valence * 1.25;
            } else if w(2) == "without" && w(1) == "doubt" {
                return valence;
            } else if is_negation(w(2)) {
                return valence * NEGATION_SCALAR;
            }
        }
        _ => {
            if (w(3) == "never" && (w(2) == "so" || w(2) == "this"))
                || (w(1) == "so" || w(1) == "this")
            {
                return valence * 1.25;
            } else if w(3) == "without" && (w(2) == "doubt" || w(1) == "doubt") {
                return valence;
            } else if is_negation(w(3)) {
                return valence * NEGATION_SCALAR;
            }
        }
    }
    valence
}

/// Multi-word idioms around position `i`; requires `i >= 3`.
fn special_idioms_check(mut valence: f64, lower: &[String], i: usize) -> f64 {
    let w = |k: usize| lower[k].as_str();
    let onezero = format!("{} {}", w(i - 1), w(i));
    let twoonezero = format!("{} {} {}", w(i - 2), w(i - 1), w(i));
    let twoone = format!("{} {}", w(i - 2), w(i - 1));
    let threetwoone = format!("{} {} {}", w(i - 3), w(i - 2), w(i - 1));
    let threetwo = format!("{} {}", w(i - 3), w(i - 2));

    for seq in [&onezero, &twoonezero, &twoone, &threetwoone, &threetwo] {
        if let Some(v) = special_case(seq) {
            valence = v;
            break;
        }
    }
    if lower.len() > i + 1 {
        if let Some(v) = special_case(&format!("{} {}", w(i), w(i + 1))) {
            valence = v;
        }
    }
    if lower.len() > i + 2 {
        if let Some(v) = special_case(&format!("{} {} {}", w(i), w(i + 1), w(i + 2))) {
            valence = v;
        }
    }
    for ngram in [&threetwoone, &threetwo, &twoone] {
        if let Some(b) = booster_value(ngram) {
            valence += b;
        }
    }
    valence
}

/// Contrastive `but`: contributions before the first `but` are halved, those
/// after it scaled by 1.5.
///
/// The reference locates each contribution by value (first equal element)
/// rather than by position, so repeated values can be rescaled more than
/// once or not at all. That behaviour is reproduced here.
fn but_check(lower: &[String], sentiments: &mut [f64]) {
    let Some(bi) = lower.iter().position(|w| w == "but") else {
        return;
    };
    let original = sentiments.to_vec();
    for v in original {
        let si = sentiments
            .iter()
            .position(|&x| x == v)
            .expect("value present");
        if si < bi {
            sentiments[si] = v * 0.5;
        } else if si > bi {
            sentiments[si] = v * 1.5;
        }
    }
}

fn punctuation_emphasis(text: &str) -> f64 {
    let ep = text.matches('!').count().min(MAX_EXCLAMATIONS);
    let ep_amplifier = ep as f64 * EXCLAMATION_INCREMENT;
    let qm = text.matches('?').count();
    let qm_amplifier = if qm > 1 {
        if qm <= 3 {
            qm as f64 * QUESTION_INCREMENT
        } else {
            MAX_QUESTION_EMPHASIS
        }
    } else {
        0.0
    };
    ep_amplifier + qm_amplifier
}
