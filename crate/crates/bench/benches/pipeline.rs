use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use landfall_bench::{lexicon, scorer, synthetic_posts};
use landfall_core::lexshift::{analyze, term_period_counts};
use landfall_core::resilience::fit_exponential;
use landfall_core::stats::{resampled_means, stream_rng, summarize_days, DayHistory};
use landfall_core::{BootstrapConfig, Corpus, RankBasis};

fn scoring(c: &mut Criterion) {
    let scorer = scorer();
    let (_, posts) = synthetic_posts(50.0, 1);
    let mut group = c.benchmark_group("scoring");
    group.throughput(Throughput::Elements(posts.len() as u64));
    group.bench_function("compound", |b| {
        b.iter(|| {
            posts
                .iter()
                .filter(|p| scorer.score(black_box(&p.text)).is_match())
                .count()
        })
    });
    group.finish();
}

fn bootstrap(c: &mut Criterion) {
    let pool: Vec<f64> = (0..800)
        .map(|i| ((i * 37) % 101) as f64 / 50.0 - 1.0)
        .collect();
    let mut group = c.benchmark_group("bootstrap");
    for size in [50usize, 200, 1000] {
        group.throughput(Throughput::Elements((size * 1000) as u64));
        group.bench_with_input(
            BenchmarkId::new("resampled_means", size),
            &size,
            |b, &size| {
                let mut rng = stream_rng(7, 1);
                b.iter(|| resampled_means(black_box(&pool), size, 1000, &mut rng))
            },
        );
    }

    let scorer = scorer();
    let (cfg, posts) = synthetic_posts(200.0, 2);
    let window = cfg.window();
    let (first, last) = cfg.day_range();
    let history = DayHistory::from_pairs(
        first,
        last,
        posts.iter().filter_map(|p| {
            scorer
                .score(&p.text)
                .value()
                .map(|v| (window.day_offset(p.created_at), v))
        }),
    );
    let boot = BootstrapConfig {
        resamples: 2000,
        ..BootstrapConfig::default()
    };
    group.sample_size(10);
    group.bench_function("summarize_61_days", |b| {
        b.iter(|| summarize_days(black_box(&history), &boot, 0))
    });
    group.finish();
}

fn fit(c: &mut Criterion) {
    let ts: Vec<f64> = (0..40).map(|i| 0.25 + 0.5 * i as f64).collect();
    let ys: Vec<f64> = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| -1.4 * (-0.7 * t).exp() + 0.05 + 0.03 * ((i * 7919) % 13) as f64 / 13.0)
        .collect();
    c.bench_function("fit_exponential_40_bins", |b| {
        b.iter(|| fit_exponential(black_box(&ts), black_box(&ys)))
    });
}

fn lexshift(c: &mut Criterion) {
    let lex = lexicon();
    let (cfg, posts) = synthetic_posts(200.0, 3);
    let corpus = Corpus::build(posts, &cfg.window());
    let counts = term_period_counts(
        corpus
            .posts
            .iter()
            .map(|p| (p.period, p.post.text.as_str())),
        &lex,
    );
    c.bench_function("lexshift_analyze", |b| {
        b.iter(|| analyze(black_box(&counts), 0, RankBasis::TermFrequency))
    });
}

criterion_group!(benches, scoring, bootstrap, fit, lexshift);
criterion_main!(benches);
