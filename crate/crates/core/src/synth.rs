//! Synthetic event-centered corpora with known dynamics.
//!
//! Each post carries a latent valence drawn around a baseline that dips at
//! the event and recovers exponentially. The text is assembled from lexicon
//! words whose plain sum reproduces the latent compound score: carrier
//! words are drawn from a fixed palette that avoids every word a scoring
//! rule reacts to, so the score is the normalized sum of the ratings. The
//! residual after assembly is at most 0.05 in the unnormalized sum, or the
//! smallest step the palette allows.

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{BoundingBox, EventWindow, PeriodLabel, Post};
use crate::error::{Error, Result};
use crate::sentiment::{is_rule_word, ValenceLexicon, NORMALIZATION_ALPHA};
use crate::stats::stream_rng;

/// Latent valences are clamped to this magnitude before text assembly.
pub const MAX_LATENT: f64 = 0.98;
const STOP_RESIDUAL: f64 = 0.05;
const MAX_CARRIERS: usize = 32;

const FILLER: &[&str] = &[
    "today",
    "update",
    "area",
    "street",
    "near",
    "town",
    "weather",
    "tonight",
    "morning",
    "county",
    "road",
    "storm",
    "hurricane",
    "coast",
    "downtown",
    "neighborhood",
];

/// Event-driven shift of the mean latent valence, in baseline standard
/// deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dip {
    pub amplitude: f64,
    /// Days relative to landfall.
    pub onset_day: f64,
    /// Recovery rate per day after onset.
    pub decay_rate: f64,
    /// When set, the mean also declines toward the onset as
    /// `exp(descent_rate * (t - onset))`.
    #[serde(default)]
    pub descent_rate: Option<f64>,
    /// When set, the dip is a flat drop of this many days instead of an
    /// exponential recovery.
    #[serde(default)]
    pub duration_days: Option<f64>,
}

impl Default for Dip {
    fn default() -> Self {
        Dip {
            amplitude: 1.5,
            onset_day: 0.0,
            decay_rate: 0.7,
            descent_rate: None,
            duration_days: None,
        }
    }
}

impl Dip {
    /// Depth of the dip at time `t` (days from landfall), in standard
    /// deviations.
    pub fn depth(&self, t: f64) -> f64 {
        let dt = t - self.onset_day;
        if let Some(d) = self.duration_days {
            return if dt >= 0.0 && dt < d {
                self.amplitude
            } else {
                0.0
            };
        }
        if dt >= 0.0 {
            self.amplitude * (-self.decay_rate * dt).exp()
        } else {
            match self.descent_rate {
                Some(r) => self.amplitude * (r * dt).exp(),
                None => 0.0,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VocabTerm {
    pub term: String,
    /// Expected mentions per post at multiplier 1.
    pub rate: f64,
    /// Usage multipliers for Before, During, After.
    pub multipliers: [f64; 3],
}

impl VocabTerm {
    pub fn new(term: &str, rate: f64, multipliers: [f64; 3]) -> Self {
        VocabTerm {
            term: term.to_string(),
            rate,
            multipliers,
        }
    }
}

pub fn default_vocabulary() -> Vec<VocabTerm> {
    vec![
        VocabTerm::new("warning", 0.03, [1.0, 10.0, 1.0]),
        VocabTerm::new("safe", 0.03, [1.0, 4.0, 1.0]),
        VocabTerm::new("help", 0.03, [1.0, 2.0, 1.0]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub region_name: String,
    pub bbox: BoundingBox,
    /// Landfall instant; day boundaries are aligned to it.
    pub landfall: DateTime<Utc>,
    pub days_before: u32,
    pub days_after: u32,
    pub during_halfwidth_days: u32,
    pub posts_per_day: f64,
    pub baseline_mean: f64,
    pub baseline_std: f64,
    pub dip: Dip,
    pub vocabulary: Vec<VocabTerm>,
    /// Carrier words per sign drawn from the lexicon.
    pub carrier_pool: usize,
    /// Expected neutral filler words per post.
    pub filler_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            region_name: "synthetic".into(),
            bbox: BoundingBox {
                min_lat: 29.0,
                max_lat: 31.0,
                min_lon: -96.0,
                max_lon: -94.0,
            },
            landfall: Utc.with_ymd_and_hms(2017, 8, 26, 0, 0, 0).unwrap(),
            days_before: 30,
            days_after: 30,
            during_halfwidth_days: 5,
            posts_per_day: 200.0,
            baseline_mean: 0.05,
            baseline_std: 0.25,
            dip: Dip::default(),
            vocabulary: default_vocabulary(),
            carrier_pool: 60,
            filler_rate: 1.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        self.bbox.validate()?;
        if !(self.posts_per_day > 0.0 && self.posts_per_day.is_finite()) {
            return bad("posts_per_day must be positive");
        }
        if !(self.baseline_std > 0.0) {
            return bad("baseline_std must be positive");
        }
        if !(self.baseline_mean.abs() < MAX_LATENT) {
            return bad("baseline_mean must lie inside (-0.98, 0.98)");
        }
        if !(self.dip.amplitude >= 0.0) {
            return bad("dip amplitude must be non-negative");
        }
        if !(self.dip.decay_rate > 0.0) {
            return bad("dip decay_rate must be positive");
        }
        if self.dip.descent_rate.is_some_and(|r| !(r > 0.0)) {
            return bad("dip descent_rate must be positive");
        }
        if self.dip.duration_days.is_some_and(|d| !(d > 0.0)) {
            return bad("dip duration_days must be positive");
        }
        if self.days_before == 0 || self.days_after == 0 {
            return bad("days_before and days_after must be at least 1");
        }
        if self.carrier_pool < 2 {
            return bad("carrier_pool must be at least 2");
        }
        if !(self.filler_rate >= 0.0) {
            return bad("filler_rate must be non-negative");
        }
        for v in &self.vocabulary {
            if v.term.trim().is_empty() || v.term.contains(char::is_whitespace) {
                return bad("vocabulary terms must be single words");
            }
            if !(v.rate >= 0.0) || v.multipliers.iter().any(|m| !(*m >= 0.0)) {
                return bad("vocabulary rates and multipliers must be non-negative");
            }
        }
        Ok(())
    }

    pub fn window(&self) -> EventWindow {
        EventWindow {
            region_name: self.region_name.clone(),
            bbox: self.bbox,
            formation: self.landfall - Duration::days(self.days_before as i64),
            landfall: self.landfall,
            dissipation: self.landfall + Duration::days(self.days_after as i64 + 1)
                - Duration::seconds(1),
            during_halfwidth_days: self.during_halfwidth_days,
        }
    }

    /// Mean latent valence at `t` days from landfall.
    pub fn mu(&self, t: f64) -> f64 {
        self.baseline_mean - self.dip.depth(t) * self.baseline_std
    }

    /// Day offsets covered, first and last inclusive.
    pub fn day_range(&self) -> (i64, i64) {
        (-(self.days_before as i64), self.days_after as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyTruth {
    pub day_offset: i64,
    /// Mean of the latent-valence mean over the day.
    pub mu: f64,
    pub posts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub baseline_mean: f64,
    pub baseline_std: f64,
    pub dip: Dip,
    /// `ln 2 / decay_rate`.
    pub half_life_days: f64,
    pub window: EventWindow,
    pub vocabulary: Vec<VocabTerm>,
    pub daily: Vec<DailyTruth>,
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub posts: Vec<Post>,
    /// Latent valence per post, aligned with `posts`.
    pub latent: Vec<f64>,
    pub truth: GroundTruth,
}

/// Lexicon words used to carry valence, split by sign and sorted by
/// magnitude.
#[derive(Debug, Clone)]
pub struct CarrierPalette {
    pub positive: Vec<(String, f64)>,
    pub negative: Vec<(String, f64)>,
}

impl CarrierPalette {
    /// Pick `per_sign` words of each sign, evenly spread over the range of
    /// magnitudes, from lexicon words that no scoring rule reacts to.
    pub fn build(lexicon: &ValenceLexicon, per_sign: usize, exclude: &[&str]) -> Result<Self> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (term, v) in lexicon.iter() {
            let eligible = term.len() >= 3
                && term.bytes().all(|b| b.is_ascii_lowercase())
                && !is_rule_word(term)
                && !exclude.contains(&term)
                && v != 0.0;
            if eligible {
                if v > 0.0 {
                    pos.push((term.to_string(), v));
                } else {
                    neg.push((term.to_string(), v));
                }
            }
        }
        let spread = |mut words: Vec<(String, f64)>| -> Vec<(String, f64)> {
            words.sort_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then_with(|| a.0.cmp(&b.0)));
            if words.len() <= per_sign {
                return words;
            }
            let last = words.len() - 1;
            let mut picked: Vec<usize> = (0..per_sign)
                .map(|i| (i * last + (per_sign - 1) / 2) / (per_sign - 1))
                .collect();
            picked.dedup();
            picked.into_iter().map(|i| words[i].clone()).collect()
        };
        let palette = CarrierPalette {
            positive: spread(pos),
            negative: spread(neg),
        };
        if palette.positive.is_empty() || palette.negative.is_empty() {
            return Err(Error::Config(
                "lexicon has no usable carrier words of both signs".into(),
            ));
        }
        Ok(palette)
    }

    fn side(&self, sign: f64) -> &[(String, f64)] {
        if sign > 0.0 {
            &self.positive
        } else {
            &self.negative
        }
    }
}

/// Unnormalized sum whose normalized value is `v`.
pub fn target_sum(v: f64) -> f64 {
    v * NORMALIZATION_ALPHA.sqrt() / (1.0 - v * v).sqrt()
}

/// Append carrier words to `words` so that their ratings plus `fixed` sum
/// to `target`. Returns the remaining residual.
pub fn assemble_carriers<R: Rng>(
    target: f64,
    fixed: f64,
    has_lexicon_word: bool,
    palette: &CarrierPalette,
    rng: &mut R,
    words: &mut Vec<String>,
) -> f64 {
    let mut r = target - fixed;
    let mut added_any = has_lexicon_word;
    for _ in 0..MAX_CARRIERS {
        if r.abs() <= STOP_RESIDUAL {
            break;
        }
        let side = palette.side(r);
        let hi = r.abs() + STOP_RESIDUAL;
        let lo = 0.5 * r.abs().min(side[side.len() - 1].1.abs());
        let candidates: Vec<&(String, f64)> = side
            .iter()
            .filter(|(_, v)| v.abs() >= lo && v.abs() <= hi)
            .collect();
        let pick = if candidates.is_empty() {
            let best = side
                .iter()
                .min_by(|a, b| (r - a.1).abs().total_cmp(&(r - b.1).abs()))
                .expect("palette sides are non-empty");
            if (r - best.1).abs() >= r.abs() {
                break;
            }
            best
        } else {
            candidates[rng.random_range(0..candidates.len())]
        };
        words.push(pick.0.clone());
        r -= pick.1;
        added_any = true;
    }
    if !added_any {
        // Keep the post scoreable: a positive word and the negative word
        // that best cancels it.
        let p = &palette.positive[rng.random_range(0..palette.positive.len())];
        let n = palette
            .negative
            .iter()
            .min_by(|a, b| (r - p.1 - a.1).abs().total_cmp(&(r - p.1 - b.1).abs()))
            .expect("palette sides are non-empty");
        words.push(p.0.clone());
        words.push(n.0.clone());
        r -= p.1 + n.1;
    }
    r
}

struct DayPlan {
    offset: i64,
    posts: Vec<Post>,
    latent: Vec<f64>,
}

/// Generate posts and the ground truth for `cfg`.
pub fn generate(cfg: &SynthConfig, lexicon: &ValenceLexicon) -> Result<SynthOutput> {
    cfg.validate()?;
    let window = cfg.window();
    window.validate()?;
    let vocab_terms: Vec<&str> = cfg.vocabulary.iter().map(|v| v.term.as_str()).collect();
    let palette = CarrierPalette::build(lexicon, cfg.carrier_pool, &vocab_terms)?;
    let vocab_valence: Vec<f64> = cfg
        .vocabulary
        .iter()
        .map(|v| lexicon.get(&v.term.to_lowercase()).unwrap_or(0.0))
        .collect();
    let filler: Vec<&str> = FILLER
        .iter()
        .copied()
        .filter(|w| !lexicon.contains(w) && !is_rule_word(w))
        .collect();
    let (first, last) = cfg.day_range();
    let poisson = Poisson::new(cfg.posts_per_day).map_err(|e| Error::Config(e.to_string()))?;

    let days: Vec<DayPlan> = (first..=last)
        .into_par_iter()
        .map(|offset| {
            let mut rng = stream_rng(cfg.seed, (offset - first) as u64 | (1 << 48));
            let n = poisson.sample(&mut rng) as usize;
            let day_start = cfg.landfall + Duration::days(offset);
            let mut secs: Vec<i64> = (0..n).map(|_| rng.random_range(0..86_400)).collect();
            secs.sort_unstable();
            let mut posts = Vec::with_capacity(n);
            let mut latent = Vec::with_capacity(n);
            for (i, s) in secs.into_iter().enumerate() {
                let created_at = day_start + Duration::seconds(s);
                let t = (created_at - cfg.landfall).num_seconds() as f64 / 86_400.0;
                let period = window.period_of(created_at).unwrap_or(PeriodLabel::During);
                let mu = cfg.mu(t);
                let v = Normal::new(mu, cfg.baseline_std)
                    .expect("validated std")
                    .sample(&mut rng)
                    .clamp(-MAX_LATENT, MAX_LATENT);

                let mut words: Vec<String> = Vec::new();
                let mut fixed = 0.0;
                let mut has_lexicon_word = false;
                for (term, &val) in cfg.vocabulary.iter().zip(&vocab_valence) {
                    let rate = term.rate * term.multipliers[period.index()];
                    if rate <= 0.0 {
                        continue;
                    }
                    let k = Poisson::new(rate)
                        .map(|p| p.sample(&mut rng) as usize)
                        .unwrap_or(0);
                    for _ in 0..k {
                        words.push(term.term.clone());
                        fixed += val;
                        has_lexicon_word |= val != 0.0;
                    }
                }
                assemble_carriers(
                    target_sum(v),
                    fixed,
                    has_lexicon_word,
                    &palette,
                    &mut rng,
                    &mut words,
                );
                if cfg.filler_rate > 0.0 && !filler.is_empty() {
                    let k = Poisson::new(cfg.filler_rate)
                        .map(|p| p.sample(&mut rng) as usize)
                        .unwrap_or(0);
                    for _ in 0..k {
                        words.push(filler[rng.random_range(0..filler.len())].to_string());
                    }
                }
                words.shuffle(&mut rng);

                posts.push(Post {
                    id: format!("{}-{}-{}", cfg.seed, offset - first, i),
                    created_at,
                    text: words.join(" "),
                    lat: rng.random_range(cfg.bbox.min_lat..=cfg.bbox.max_lat),
                    lon: rng.random_range(cfg.bbox.min_lon..=cfg.bbox.max_lon),
                    lang: "en".into(),
                    is_retweet: false,
                });
                latent.push(v);
            }
            DayPlan {
                offset,
                posts,
                latent,
            }
        })
        .collect();

    let mut posts = Vec::new();
    let mut latent = Vec::new();
    let mut daily = Vec::with_capacity(days.len());
    for day in days {
        const STEPS: usize = 48;
        let mu = (0..STEPS)
            .map(|j| cfg.mu(day.offset as f64 + (j as f64 + 0.5) / STEPS as f64))
            .sum::<f64>()
            / STEPS as f64;
        daily.push(DailyTruth {
            day_offset: day.offset,
            mu,
            posts: day.posts.len(),
        });
        posts.extend(day.posts);
        latent.extend(day.latent);
    }

    Ok(SynthOutput {
        posts,
        latent,
        truth: GroundTruth {
            seed: cfg.seed,
            baseline_mean: cfg.baseline_mean,
            baseline_std: cfg.baseline_std,
            dip: cfg.dip.clone(),
            half_life_days: std::f64::consts::LN_2 / cfg.dip.decay_rate,
            window,
            vocabulary: cfg.vocabulary.clone(),
            daily,
        },
    })
}
