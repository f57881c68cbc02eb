//! Whitespace tokenization with the punctuation conventions the valence rules
//! expect: leading and trailing ASCII punctuation is stripped from a token
//! unless stripping would leave two characters or fewer, which keeps
//! emoticons such as `:)` intact.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Token text with original case.
    pub text: String,
    /// Number of `!` that trailed the raw token.
    pub exclamations: usize,
}

/// Whitespace as understood by the reference rule implementation. This is
/// Unicode `White_Space` plus the ASCII information separators U+001C..U+001F.
pub(crate) fn is_separator(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

pub(crate) fn split_words(text: &str) -> impl Iterator<Item = &str> {
    text.split(is_separator).filter(|w| !w.is_empty())
}

pub(crate) fn trim_separators(text: &str) -> &str {
    text.trim_matches(is_separator)
}

/// Strip surrounding ASCII punctuation, keeping the raw token when the
/// stripped form would be two characters or shorter.
pub(crate) fn strip_punct_if_word(token: &str) -> &str {
    let stripped = token.trim_matches(|c: char| c.is_ascii_punctuation());
    if stripped.chars().count() <= 2 {
        token
    } else {
        stripped
    }
}

/// True when the word has at least one cased character and no lowercase ones.
pub(crate) fn is_all_caps(word: &str) -> bool {
    let mut has_upper = false;
    for c in word.chars() {
        if c.is_lowercase() {
            return false;
        }
        if c.is_uppercase() {
            has_upper = true;
        }
    }
    has_upper
}

pub fn tokenize(text: &str) -> Vec<Token> {
    split_words(text)
        .map(|raw| Token {
            text: strip_punct_if_word(raw).to_string(),
            exclamations: raw.chars().rev().take_while(|&c| c == '!').count(),
        })
        .collect()
}
