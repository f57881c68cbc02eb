//! Positive/negative word categories with trailing-wildcard patterns, and the
//! word ratios derived from them.
//!
//! File format: `[positive]` and `[negative]` section headers, one pattern
//! per line, `#` starts a comment. A pattern is a literal word or a prefix
//! ending in `*`.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tokenize::tokenize;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Exact(String),
    Prefix(String),
}

impl Pattern {
    pub fn parse(raw: &str) -> std::result::Result<Pattern, String> {
        let raw = raw.trim().to_lowercase();
        if raw.is_empty() {
            return Err("empty pattern".into());
        }
        match raw.find('*') {
            None => Ok(Pattern::Exact(raw)),
            Some(pos) if pos == raw.len() - 1 && pos > 0 => {
                Ok(Pattern::Prefix(raw[..pos].to_string()))
            }
            Some(_) => Err(format!(
                "wildcard only allowed as trailing character: {raw:?}"
            )),
        }
    }

    pub fn matches(&self, word_lower: &str) -> bool {
        match self {
            Pattern::Exact(w) => w == word_lower,
            Pattern::Prefix(p) => word_lower.starts_with(p.as_str()),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct PatternSet {
    exact: HashSet<String>,
    prefixes: Vec<String>,
}

impl PatternSet {
    fn insert(&mut self, p: Pattern) {
        match p {
            Pattern::Exact(w) => {
                self.exact.insert(w);
            }
            Pattern::Prefix(p) => self.prefixes.push(p),
        }
    }

    fn matches(&self, word_lower: &str) -> bool {
        self.exact.contains(word_lower)
            || self
                .prefixes
                .iter()
                .any(|p| word_lower.starts_with(p.as_str()))
    }

    fn len(&self) -> usize {
        self.exact.len() + self.prefixes.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Default)]
pub struct CategoryDictionary {
    positive: PatternSet,
    negative: PatternSet,
}

impl CategoryDictionary {
    pub fn new<'a>(
        positive: impl IntoIterator<Item = &'a str>,
        negative: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self> {
        let mut dict = CategoryDictionary::default();
        for (cat, patterns) in [
            (Category::Positive, positive.into_iter().collect::<Vec<_>>()),
            (Category::Negative, negative.into_iter().collect()),
        ] {
            for p in patterns {
                let pat = Pattern::parse(p).map_err(Error::Config)?;
                dict.insert(cat, pat);
            }
        }
        Ok(dict)
    }

    fn insert(&mut self, category: Category, pattern: Pattern) {
        match category {
            Category::Positive => self.positive.insert(pattern),
            Category::Negative => self.negative.insert(pattern),
        }
    }

    pub fn parse(content: &str) -> Result<Self> {
        let mut dict = CategoryDictionary::default();
        let mut section = None;
        for (idx, line) in content.lines().enumerate() {
            let line = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| Error::Resource {
                resource: "category dictionary",
                line: idx + 1,
                reason,
            };
            if line.starts_with('[') && line.ends_with(']') {
                section = match line[1..line.len() - 1].trim().to_lowercase().as_str() {
                    "positive" => Some(Category::Positive),
                    "negative" => Some(Category::Negative),
                    other => return Err(err(format!("unknown section [{other}]"))),
                };
                continue;
            }
            let category = section.ok_or_else(|| err("pattern outside of a section".into()))?;
            dict.insert(category, Pattern::parse(line).map_err(err)?);
        }
        Ok(dict)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&content)
    }

    pub fn is_positive(&self, word: &str) -> bool {
        self.positive.matches(&word.to_lowercase())
    }

    pub fn is_negative(&self, word: &str) -> bool {
        self.negative.matches(&word.to_lowercase())
    }

    pub fn len(&self) -> (usize, usize) {
        (self.positive.len(), self.negative.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WordRatios {
    pub lwpr: f64,
    pub lwnr: f64,
    pub positive: usize,
    pub negative: usize,
    pub token_count: usize,
}

/// Share of tokens matching positive and negative patterns. Tokens are
/// matched lowercased with surrounding punctuation removed; a token can count
/// in both categories.
pub fn word_ratios(text: &str, dict: &CategoryDictionary) -> WordRatios {
    let tokens = tokenize(text);
    let mut positive = 0;
    let mut negative = 0;
    for token in &tokens {
        let bare = token.text.trim_matches(|c: char| c.is_ascii_punctuation());
        if bare.is_empty() {
            continue;
        }
        let lower = bare.to_lowercase();
        if dict.positive.matches(&lower) {
            positive += 1;
        }
        if dict.negative.matches(&lower) {
            negative += 1;
        }
    }
    let n = tokens.len();
    let ratio = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    WordRatios {
        lwpr: ratio(positive),
        lwnr: ratio(negative),
        positive,
        negative,
        token_count: n,
    }
}
