//! Run configuration, read from one TOML file.
//!
//! ```toml
//! seed = 7
//! out_dir = "out"
//! figures = true
//!
//! [input]
//! corpus = "posts.jsonl.gz"          # omit to use the [synth] generator
//! lexicon = "vader_lexicon.txt"
//! emoji_lexicon = "emoji_utf8_lexicon.txt"
//! categories = "categories.dic"
//!
//! [event]
//! region_name = "Houston"
//! formation = "2017-08-17T00:00:00Z"
//! landfall = "2017-08-26T03:00:00Z"
//! dissipation = "2017-09-03T00:00:00Z"
//! during_halfwidth_days = 5
//! bbox = { min_lat = 29.5, max_lat = 30.2, min_lon = -95.8, max_lon = -95.0 }
//!
//! [bootstrap]
//! resamples = 10000
//! null_window_days = 28
//! min_pool = 10
//!
//! [fit]
//! bin_hours = 12.0
//! weighting = "equal"                # or "count"
//! models = ["exponential", "linear", "quadratic", "logarithmic"]
//!
//! [lexshift]
//! rank_basis = "term_frequency"      # or "tf_idf", "z_score"
//! top_k = 5
//! ```
//!
//! Relative paths are resolved against the directory holding the config
//! file. Timestamps are quoted RFC 3339 strings.

use std::fs;
use std::path::{Path, PathBuf};

use landfall_core::lexshift::RankBasis;
use landfall_core::resilience::{ModelFamily, Weighting, DEFAULT_BIN_HOURS};
use landfall_core::sentiment::DEFAULT_TOPIC_WORDS;
use landfall_core::{BootstrapConfig, EventWindow, SynthConfig};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult, Stage};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    #[serde(default)]
    pub corpus: Option<PathBuf>,
    pub lexicon: PathBuf,
    #[serde(default)]
    pub emoji_lexicon: Option<PathBuf>,
    pub categories: PathBuf,
    #[serde(default = "default_topic_words")]
    pub topic_words: Vec<String>,
}

fn default_topic_words() -> Vec<String> {
    DEFAULT_TOPIC_WORDS.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapSection {
    pub resamples: usize,
    pub null_window_days: u32,
    pub min_pool: usize,
}

impl Default for BootstrapSection {
    fn default() -> Self {
        let d = BootstrapConfig::default();
        BootstrapSection {
            resamples: d.resamples,
            null_window_days: d.null_window_days,
            min_pool: d.min_pool,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSection {
    pub bin_hours: f64,
    pub weighting: Weighting,
    pub models: Vec<ModelFamily>,
}

impl Default for FitSection {
    fn default() -> Self {
        FitSection {
            bin_hours: DEFAULT_BIN_HOURS,
            weighting: Weighting::Equal,
            models: ModelFamily::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LexshiftSection {
    pub rank_basis: RankBasis,
    pub top_k: usize,
}

impl Default for LexshiftSection {
    fn default() -> Self {
        LexshiftSection {
            rank_basis: RankBasis::TermFrequency,
            top_k: 5,
        }
    }
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Drives the bootstrap, the clustering restarts and the synthetic
    /// generator (its own `seed` field is replaced by this one).
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_true")]
    pub figures: bool,
    pub input: InputConfig,
    #[serde(default)]
    pub event: Option<EventWindow>,
    #[serde(default)]
    pub bootstrap: BootstrapSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub lexshift: LexshiftSection,
    #[serde(default)]
    pub synth: Option<SynthConfig>,
    /// SHA-256 of the config file bytes.
    #[serde(skip)]
    pub source_hash: String,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::config(
                Stage::Config,
                format!("cannot read {}: {e}", path.display()),
            )
        })?;
        let mut cfg = Self::parse(&text)?;
        cfg.source_hash = hex::encode(Sha256::digest(text.as_bytes()));
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn parse(text: &str) -> CliResult<RunConfig> {
        let mut cfg: RunConfig = toml::from_str(text)
            .map_err(|e| CliError::config(Stage::Config, format!("invalid config: {e}")))?;
        if let Some(s) = cfg.synth.as_mut() {
            s.seed = cfg.seed;
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.input.lexicon);
        fix(&mut self.input.categories);
        if let Some(p) = self.input.corpus.as_mut() {
            fix(p);
        }
        if let Some(p) = self.input.emoji_lexicon.as_mut() {
            fix(p);
        }
        fix(&mut self.out_dir);
    }

    pub fn apply_overrides(&mut self, seed: Option<u64>, out: Option<PathBuf>, no_figures: bool) {
        if let Some(seed) = seed {
            self.seed = seed;
            if let Some(s) = self.synth.as_mut() {
                s.seed = seed;
            }
        }
        if let Some(out) = out {
            self.out_dir = out;
        }
        if no_figures {
            self.figures = false;
        }
    }

    /// Check referenced files and parameter ranges.
    pub fn validate(&self) -> CliResult<()> {
        let err = |m: String| CliError::config(Stage::Config, m);
        let mut files = vec![
            ("lexicon", &self.input.lexicon),
            ("categories", &self.input.categories),
        ];
        if let Some(p) = &self.input.corpus {
            files.push(("corpus", p));
        }
        if let Some(p) = &self.input.emoji_lexicon {
            files.push(("emoji lexicon", p));
        }
        for (name, p) in files {
            if !p.is_file() {
                return Err(err(format!("{name} file not found: {}", p.display())));
            }
        }
        if self.input.corpus.is_none() && self.synth.is_none() {
            return Err(err(
                "either [input].corpus or a [synth] section is required".into(),
            ));
        }
        self.window()?
            .validate()
            .map_err(|e| CliError::core(Stage::Config, e))?;
        self.bootstrap_config()
            .validate()
            .map_err(|e| CliError::core(Stage::Config, e))?;
        if let Some(s) = &self.synth {
            s.validate().map_err(|e| CliError::core(Stage::Config, e))?;
        }
        if !(self.fit.bin_hours > 0.0 && self.fit.bin_hours.is_finite()) {
            return Err(err(format!(
                "fit.bin_hours must be positive, got {}",
                self.fit.bin_hours
            )));
        }
        if self.fit.models.is_empty() {
            return Err(err("fit.models must list at least one model".into()));
        }
        if self.lexshift.top_k == 0 {
            return Err(err("lexshift.top_k must be at least 1".into()));
        }
        Ok(())
    }

    /// The `[event]` window, or the synthetic generator's window.
    pub fn window(&self) -> CliResult<EventWindow> {
        match (&self.event, &self.synth) {
            (Some(w), _) => Ok(w.clone()),
            (None, Some(s)) => Ok(s.window()),
            (None, None) => Err(CliError::config(
                Stage::Config,
                "an [event] section is required",
            )),
        }
    }

    pub fn bootstrap_config(&self) -> BootstrapConfig {
        BootstrapConfig {
            resamples: self.bootstrap.resamples,
            null_window_days: self.bootstrap.null_window_days,
            seed: self.seed,
            min_pool: self.bootstrap.min_pool,
        }
    }
}
