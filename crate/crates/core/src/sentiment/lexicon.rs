use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Term to mean valence rating. Keys are stored exactly as listed in the
/// lexicon file, which is lowercase for the published lexicon.
#[derive(Debug, Clone)]
pub struct ValenceLexicon {
    entries: HashMap<String, f64>,
}

impl ValenceLexicon {
    /// Parse tab-separated `term, mean, stddev, raw ratings` lines. Only the
    /// first two columns are read; later duplicates override earlier ones.
    pub fn parse(content: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (idx, line) in content.trim_end_matches('\n').split('\n').enumerate() {
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| Error::Resource {
                resource: "valence lexicon",
                line: idx + 1,
                reason,
            };
            let mut cols = line.trim().split('\t');
            let term = cols.next().unwrap_or_default();
            let rating = cols
                .next()
                .ok_or_else(|| err("expected at least two tab-separated columns".into()))?;
            if term.is_empty() {
                return Err(err("empty term".into()));
            }
            let rating: f64 = rating
                .trim()
                .parse()
                .map_err(|_| err(format!("rating {rating:?} is not a number")))?;
            if !rating.is_finite() {
                return Err(err("rating is not finite".into()));
            }
            entries.insert(term.to_string(), rating);
        }
        if entries.is_empty() {
            return Err(Error::Resource {
                resource: "valence lexicon",
                line: 0,
                reason: "no entries".into(),
            });
        }
        Ok(ValenceLexicon { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&content)
    }

    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let entries: HashMap<String, f64> =
            entries.into_iter().map(|(t, v)| (t.into(), v)).collect();
        if entries.is_empty() || entries.values().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "lexicon needs at least one finite entry".into(),
            ));
        }
        Ok(ValenceLexicon { entries })
    }

    pub fn get(&self, term: &str) -> Option<f64> {
        self.entries.get(term).copied()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.entries.contains_key(term)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Single-character emoji to textual description, e.g. `😁` to
/// `beaming face with smiling eyes`. Multi-codepoint sequences are ignored
/// because substitution works one character at a time.
#[derive(Debug, Clone, Default)]
pub struct EmojiDescriptions {
    map: HashMap<char, String>,
}

impl EmojiDescriptions {
    pub fn parse(content: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for (idx, line) in content.trim_end_matches('\n').split('\n').enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let emoji = cols.next().unwrap_or_default();
            let description = cols.next().ok_or_else(|| Error::Resource {
                resource: "emoji lexicon",
                line: idx + 1,
                reason: "expected emoji<TAB>description".into(),
            })?;
            let mut chars = emoji.chars();
            if let (Some(c), None) = (chars.next(), chars.next()) {
                map.insert(c, description.to_string());
            }
        }
        Ok(EmojiDescriptions { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&content)
    }

    pub fn get(&self, c: char) -> Option<&str> {
        self.map.get(&c).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_published_format() {
        let lex = ValenceLexicon::parse(
            "good\t1.9\t0.9434\t[2, 1]\n:)\t2.0\t1.2\t[1]\nbad\t-2.5\t0.6\t[-3]\n",
        )
        .unwrap();
        assert_eq!(lex.len(), 3);
        assert_eq!(lex.get("good"), Some(1.9));
        assert_eq!(lex.get(":)"), Some(2.0));
        assert_eq!(lex.get("ugly"), None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(ValenceLexicon::parse("good 1.9\n").is_err());
        assert!(ValenceLexicon::parse("good\tabc\n").is_err());
        assert!(ValenceLexicon::parse("good\tinf\n").is_err());
        assert!(ValenceLexicon::parse("").is_err());
    }

    #[test]
    fn shipped_lexicon_loads() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/vader_lexicon.txt");
        let lex = ValenceLexicon::load(&path).unwrap();
        assert_eq!(lex.len(), 7506);
        assert_eq!(lex.get("warning"), Some(-1.4));
    }

    #[test]
    fn emoji_descriptions() {
        let e = EmojiDescriptions::parse(
            "😁\tbeaming face with smiling eyes\n👍🏽\tthumbs up: medium skin tone\n",
        )
        .unwrap();
        assert_eq!(e.get('😁'), Some("beaming face with smiling eyes"));
        assert_eq!(e.get('👍'), None);
    }
}
