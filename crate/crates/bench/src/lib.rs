//! Shared inputs for the benchmarks.

use std::path::{Path, PathBuf};

use landfall_core::sentiment::EmojiDescriptions;
use landfall_core::synth::generate;
use landfall_core::{Post, SynthConfig, ValenceLexicon, ValenceScorer};

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn lexicon() -> ValenceLexicon {
    ValenceLexicon::load(&data("vader_lexicon.txt")).expect("bundled lexicon")
}

pub fn scorer() -> ValenceScorer {
    let emojis =
        EmojiDescriptions::load(&data("emoji_utf8_lexicon.txt")).expect("bundled emoji lexicon");
    ValenceScorer::new(lexicon()).with_emojis(emojis)
}

/// A default synthetic corpus at the given daily volume.
pub fn synthetic_posts(posts_per_day: f64, seed: u64) -> (SynthConfig, Vec<Post>) {
    let cfg = SynthConfig {
        posts_per_day,
        seed,
        ..SynthConfig::default()
    };
    let out = generate(&cfg, &lexicon()).expect("valid synth config");
    (cfg, out.posts)
}
