use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use landfall_core::sentiment::EmojiDescriptions;
use landfall_core::synth::{generate, SynthOutput};
use landfall_core::{Corpus, PeriodLabel, SynthConfig, ValenceLexicon, ValenceScorer};

fn lexicon() -> &'static ValenceLexicon {
    static L: OnceLock<ValenceLexicon> = OnceLock::new();
    L.get_or_init(|| {
        ValenceLexicon::load(
            &Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/vader_lexicon.txt"),
        )
        .unwrap()
    })
}

fn scorer() -> ValenceScorer {
    let emojis = EmojiDescriptions::load(
        &Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/emoji_utf8_lexicon.txt"),
    )
    .unwrap();
    ValenceScorer::new(lexicon().clone()).with_emojis(emojis)
}

fn run(cfg: &SynthConfig) -> SynthOutput {
    generate(cfg, lexicon()).unwrap()
}

#[test]
fn compound_tracks_latent_valence() {
    let out = run(&SynthConfig {
        days_before: 5,
        days_after: 5,
        seed: 21,
        ..SynthConfig::default()
    });
    let scorer = scorer();
    assert!(out.posts.len() > 1500);
    let mut worst = 0.0f64;
    for (post, &v) in out.posts.iter().zip(&out.latent) {
        let c = scorer
            .score(&post.text)
            .value()
            .expect("every post carries a lexicon word");
        worst = worst.max((c - v).abs());
    }
    assert!(worst < 0.1, "max |compound - latent| = {worst}");
}

#[test]
fn daily_means_follow_truth() {
    let cfg = SynthConfig {
        posts_per_day: 400.0,
        seed: 4,
        ..SynthConfig::default()
    };
    let out = run(&cfg);
    let window = cfg.window();
    let mut sums: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    for (post, &v) in out.posts.iter().zip(&out.latent) {
        let e = sums.entry(window.day_offset(post.created_at)).or_default();
        e.0 += v;
        e.1 += 1;
    }
    let mut dev = 0.0;
    for d in &out.truth.daily {
        let (s, n) = sums[&d.day_offset];
        assert_eq!(n, d.posts);
        dev += (s / n as f64 - d.mu).abs();
    }
    let mad = dev / out.truth.daily.len() as f64;
    assert!(mad < 0.03, "mean |daily mean - mu| = {mad}");
    let landfall = out.truth.daily.iter().find(|d| d.day_offset == 0).unwrap();
    assert!(landfall.mu < cfg.baseline_mean - 0.5 * cfg.baseline_std);
    assert!((out.truth.half_life_days - std::f64::consts::LN_2 / 0.7).abs() < 1e-12);
}

#[test]
fn posts_land_inside_window() {
    let cfg = SynthConfig {
        posts_per_day: 50.0,
        ..SynthConfig::default()
    };
    let out = run(&cfg);
    let corpus = Corpus::build(out.posts.clone(), &cfg.window());
    assert_eq!(corpus.len(), out.posts.len());
    let counts = corpus.period_counts();
    assert!(counts.iter().all(|&c| c > 0), "{counts:?}");
}

#[test]
fn amplified_term_rate_follows_multiplier() {
    let cfg = SynthConfig {
        posts_per_day: 600.0,
        seed: 8,
        ..SynthConfig::default()
    };
    let out = run(&cfg);
    let window = cfg.window();
    let mut uses = [0usize; 3];
    let mut posts = [0usize; 3];
    for p in &out.posts {
        let k = window.period_of(p.created_at).unwrap().index();
        posts[k] += 1;
        uses[k] += p.text.split(' ').filter(|w| *w == "warning").count();
    }
    let rate = |k: usize| uses[k] as f64 / posts[k] as f64;
    let during = PeriodLabel::During.index();
    let ratio = rate(during) / (0.5 * (rate(0) + rate(2)));
    assert!(
        (ratio - 10.0).abs() < 2.0,
        "During/baseline usage ratio {ratio}"
    );
}

#[test]
fn deterministic_across_thread_counts() {
    let cfg = SynthConfig {
        days_before: 6,
        days_after: 6,
        seed: 77,
        ..SynthConfig::default()
    };
    let texts = |threads| {
        let out = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run(&cfg));
        (out.posts, out.latent)
    };
    assert_eq!(texts(1), texts(3));
    let other = run(&SynthConfig {
        seed: 78,
        ..cfg.clone()
    });
    assert_ne!(other.latent, texts(1).1);
}

#[test]
fn flat_dip_has_fixed_duration() {
    let mut cfg = SynthConfig::default();
    cfg.dip.duration_days = Some(3.0);
    let depth = |t: f64| cfg.dip.depth(t);
    assert_eq!(depth(-0.01), 0.0);
    assert_eq!(depth(0.0), 1.5);
    assert_eq!(depth(2.99), 1.5);
    assert_eq!(depth(3.0), 0.0);
}
