//! Pipeline stages. Each stage reads its inputs from artifact files in the
//! output directory and writes its own artifacts there; nothing is passed
//! between stages in memory.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use landfall_core::corpus::{self, parse_timestamp, post_to_json};
use landfall_core::lexshift::{self, Cluster, TermCounts};
use landfall_core::resilience::{self, bin_series, compare_models_within, fit_event, ExpFit};
use landfall_core::sentiment::{lexicon_topic_audit, EmojiDescriptions};
use landfall_core::stats::{summarize_days, write_summary_csv, DayHistory, ZScore};
use landfall_core::{
    synth, CategoryDictionary, Corpus, FitError, PeriodLabel, PostScorer, ValenceLexicon,
    ValenceScorer, Verdict,
};
use rayon::prelude::*;

/// Timestamped values of one metric.
type Samples = Vec<(chrono::DateTime<chrono::Utc>, f64)>;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult, ErrorKind, Stage};

pub const SYNTH_POSTS: &str = "synth_posts.jsonl";
pub const SYNTH_TRUTH: &str = "synth_truth.json";
pub const CORPUS: &str = "corpus.jsonl";
pub const REJECTIONS: &str = "rejections.csv";
pub const DAILY_COUNTS: &str = "daily_counts.csv";
pub const INGEST_SUMMARY: &str = "ingest_summary.json";
pub const SCORED: &str = "scored.jsonl";
pub const TOPIC_AUDIT: &str = "topic_audit.csv";
pub const ZSCORE_DAILY: &str = "zscore_daily.csv";
pub const BINNED: &str = "binned_valence.csv";
pub const FIT_TABLE: &str = "fit.csv";
pub const MODEL_COMPARISON: &str = "model_comparison.csv";
pub const FIT_DETAILS: &str = "fit_details.json";
pub const TERM_PROFILES: &str = "term_profiles.csv";
pub const TAU: &str = "tau.csv";
pub const TOP_TERMS: &str = "top_terms.csv";
pub const CLUSTERS: &str = "clusters.json";
pub const MANIFEST: &str = "manifest.json";
pub const FIGURES_DIR: &str = "figures";

/// Metric name and bootstrap stream id.
pub const METRICS: [(&str, u8); 3] = [("valence", 0), ("lwpr", 1), ("lwnr", 2)];

pub fn stats_file(metric: &str) -> String {
    format!("stats_{metric}.csv")
}

/// Outcome of a stage that may decline to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageOutcome {
    Done,
    Skipped(String),
}

fn artifact(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.out_dir.join(name)
}

fn ensure_out_dir(cfg: &RunConfig, stage: Stage) -> CliResult<()> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| {
        CliError::config(
            stage,
            format!(
                "cannot create output directory {}: {e}",
                cfg.out_dir.display()
            ),
        )
    })
}

fn write_artifact(
    stage: Stage,
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> CliResult<()> {
    let io_err = |e: std::io::Error| {
        CliError::internal(stage, format!("cannot write {}: {e}", path.display()))
    };
    let file = File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    body(&mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

fn open_upstream(stage: Stage, path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| {
        CliError::data(
            stage,
            format!("missing upstream artifact {}: {e}", path.display()),
        )
    })
}

fn remove_stale(paths: &[PathBuf]) {
    for p in paths {
        if p.exists() {
            if let Err(e) = fs::remove_file(p) {
                log::warn!("could not remove stale {}: {e}", p.display());
            }
        }
    }
}

fn load_lexicon(cfg: &RunConfig, stage: Stage) -> CliResult<ValenceLexicon> {
    ValenceLexicon::load(&cfg.input.lexicon).map_err(|e| CliError::core(stage, e))
}

pub fn synth(cfg: &RunConfig) -> CliResult<()> {
    let stage = Stage::Synth;
    let Some(scfg) = &cfg.synth else {
        return Err(CliError::config(stage, "no [synth] section in the config"));
    };
    ensure_out_dir(cfg, stage)?;
    if let Some(event) = &cfg.event {
        if *event != scfg.window() {
            log::warn!(
                "[event] differs from the synthetic window; the [event] window is used downstream"
            );
        }
    }
    let lexicon = load_lexicon(cfg, stage)?;
    let out = synth::generate(scfg, &lexicon).map_err(|e| CliError::core(stage, e))?;
    write_artifact(stage, &artifact(cfg, SYNTH_POSTS), |w| {
        for p in &out.posts {
            writeln!(w, "{}", post_to_json(p))?;
        }
        Ok(())
    })?;
    write_artifact(stage, &artifact(cfg, SYNTH_TRUTH), |w| {
        serde_json::to_writer_pretty(&mut *w, &out.truth)?;
        writeln!(w)
    })?;
    log::info!(
        "synth: {} posts over {} days",
        out.posts.len(),
        out.truth.daily.len()
    );
    Ok(())
}

fn corpus_source(cfg: &RunConfig) -> PathBuf {
    match &cfg.input.corpus {
        Some(p) => p.clone(),
        None => artifact(cfg, SYNTH_POSTS),
    }
}

pub fn ingest(cfg: &RunConfig) -> CliResult<()> {
    let stage = Stage::Ingest;
    ensure_out_dir(cfg, stage)?;
    let window = cfg.window()?;
    let source = corpus_source(cfg);
    if !source.is_file() {
        return Err(CliError::data(
            stage,
            format!("corpus {} not found (run `synth` first?)", source.display()),
        ));
    }
    let report = corpus::read_posts_file(&source).map_err(|e| CliError::core(stage, e))?;
    let lines = report.lines;
    let rejected = report.rejected;
    let parsed = report.posts.len();
    let corpus = Corpus::build(report.posts, &window);

    write_artifact(stage, &artifact(cfg, CORPUS), |w| {
        corpus::write_corpus(w, &corpus)
    })?;
    write_artifact(stage, &artifact(cfg, REJECTIONS), |w| {
        corpus::write_rejections(w, &rejected)
    })?;
    write_artifact(stage, &artifact(cfg, DAILY_COUNTS), |w| {
        writeln!(w, "day_offset,date,count")?;
        for d in corpus.daily_counts() {
            writeln!(
                w,
                "{},{},{}",
                d.day_offset,
                window.date_of_offset(d.day_offset),
                d.count
            )?;
        }
        Ok(())
    })?;
    let periods = corpus.period_counts();
    let summary = json!({
        "source": source.file_name().map(|s| s.to_string_lossy().into_owned()),
        "region": window.region_name,
        "lines": lines,
        "rejected": rejected.len(),
        "parsed": parsed,
        "filtered_out": parsed - corpus.len(),
        "retained": corpus.len(),
        "periods": {
            "before": periods[0],
            "during": periods[1],
            "after": periods[2],
        },
    });
    write_artifact(stage, &artifact(cfg, INGEST_SUMMARY), |w| {
        serde_json::to_writer_pretty(&mut *w, &summary)?;
        writeln!(w)
    })?;
    log::info!(
        "ingest: {lines} lines, {} rejected, {} retained (before {}, during {}, after {})",
        rejected.len(),
        corpus.len(),
        periods[0],
        periods[1],
        periods[2]
    );
    if corpus.is_empty() {
        return Err(CliError::data(
            stage,
            "no posts retained inside the event window",
        ));
    }
    Ok(())
}

/// One line of `corpus.jsonl` as read back by later stages.
#[derive(Debug, Clone, Deserialize)]
pub struct CorpusLine {
    pub id: String,
    pub created_at: String,
    pub text: String,
    pub period: PeriodLabel,
}

pub fn read_corpus(cfg: &RunConfig, stage: Stage) -> CliResult<Vec<CorpusLine>> {
    let path = artifact(cfg, CORPUS);
    read_jsonl(stage, &path)
}

fn read_jsonl<T: serde::de::DeserializeOwned>(stage: Stage, path: &Path) -> CliResult<Vec<T>> {
    let reader = open_upstream(stage, path)?;
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::data(stage, format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|e| {
            CliError::data(stage, format!("{} line {}: {e}", path.display(), i + 1))
        })?;
        rows.push(row);
    }
    Ok(rows)
}

/// One line of `scored.jsonl`. `valence` is null when no lexicon word matched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredLine {
    pub id: String,
    pub created_at: String,
    pub period: PeriodLabel,
    pub valence: Option<f64>,
    pub lwpr: f64,
    pub lwnr: f64,
    pub token_count: usize,
}

pub fn score(cfg: &RunConfig) -> CliResult<()> {
    let stage = Stage::Score;
    let posts = read_corpus(cfg, stage)?;
    let lexicon = load_lexicon(cfg, stage)?;
    let categories =
        CategoryDictionary::load(&cfg.input.categories).map_err(|e| CliError::core(stage, e))?;

    let audit = lexicon_topic_audit(&lexicon, &categories, &cfg.input.topic_words);
    for entry in audit.iter().filter(|e| e.present()) {
        log::warn!(
            "topic word {:?} carries valence (lexicon: {}, dictionary: {})",
            entry.word,
            entry.in_lexicon,
            entry.in_dictionary
        );
    }
    write_artifact(stage, &artifact(cfg, TOPIC_AUDIT), |w| {
        writeln!(w, "word,in_lexicon,in_dictionary")?;
        for e in &audit {
            writeln!(w, "{},{},{}", e.word, e.in_lexicon, e.in_dictionary)?;
        }
        Ok(())
    })?;

    let mut valence = ValenceScorer::new(lexicon);
    if let Some(path) = &cfg.input.emoji_lexicon {
        let emojis = EmojiDescriptions::load(path).map_err(|e| CliError::core(stage, e))?;
        valence = valence.with_emojis(emojis);
    }
    let scorer = PostScorer::new(valence, categories);
    let scored: Vec<ScoredLine> = posts
        .par_iter()
        .map(|p| {
            let s = scorer.score(&p.id, &p.text);
            ScoredLine {
                id: p.id.clone(),
                created_at: p.created_at.clone(),
                period: p.period,
                valence: s.valence.value(),
                lwpr: s.lwpr,
                lwnr: s.lwnr,
                token_count: s.token_count,
            }
        })
        .collect();
    let matched = scored.iter().filter(|s| s.valence.is_some()).count();
    write_artifact(stage, &artifact(cfg, SCORED), |w| {
        for s in &scored {
            serde_json::to_writer(&mut *w, s)?;
            writeln!(w)?;
        }
        Ok(())
    })?;
    log::info!(
        "score: {} posts, {matched} with a valence match",
        scored.len()
    );
    Ok(())
}

pub fn read_scored(cfg: &RunConfig, stage: Stage) -> CliResult<Vec<ScoredLine>> {
    read_jsonl(stage, &artifact(cfg, SCORED))
}

/// Per-post `(timestamp, value)` samples of one metric.
fn metric_samples(rows: &[ScoredLine], metric: &str, stage: Stage) -> CliResult<Samples> {
    let mut out = Vec::new();
    for r in rows {
        let v = match metric {
            "valence" => r.valence,
            "lwpr" if r.token_count > 0 => Some(r.lwpr),
            "lwnr" if r.token_count > 0 => Some(r.lwnr),
            _ => None,
        };
        if let Some(v) = v {
            let ts = parse_timestamp(&r.created_at).ok_or_else(|| {
                CliError::data(
                    stage,
                    format!("bad timestamp {:?} in {SCORED}", r.created_at),
                )
            })?;
            out.push((ts, v));
        }
    }
    Ok(out)
}

/// Z-scored samples of one metric over the whole window, or `None` when
/// the metric has no spread.
fn zscored(rows: &[ScoredLine], metric: &str, stage: Stage) -> CliResult<Option<Samples>> {
    let samples = metric_samples(rows, metric, stage)?;
    let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
    match ZScore::fit(&values) {
        Ok(z) => Ok(Some(
            samples.into_iter().map(|(t, v)| (t, z.apply(v))).collect(),
        )),
        Err(e) => {
            log::warn!("{metric}: cannot z-score ({e}); metric skipped");
            Ok(None)
        }
    }
}

pub fn stats(cfg: &RunConfig) -> CliResult<()> {
    let stage = Stage::Stats;
    let window = cfg.window()?;
    let rows = read_scored(cfg, stage)?;
    let bcfg = cfg.bootstrap_config();
    let (first, last) = window.day_range();
    let days = (last - first + 1) as usize;

    let mut daily: Vec<Option<Vec<(usize, f64)>>> = Vec::new();
    for (metric, id) in METRICS {
        let path = artifact(cfg, &stats_file(metric));
        let Some(samples) = zscored(&rows, metric, stage)? else {
            remove_stale(&[path]);
            daily.push(None);
            continue;
        };
        let history = DayHistory::from_pairs(
            first,
            last,
            samples.iter().map(|&(t, v)| (window.day_offset(t), v)),
        );
        let summaries = summarize_days(&history, &bcfg, id);
        write_artifact(stage, &path, |w| write_summary_csv(w, &summaries))?;
        let decreases = summaries
            .iter()
            .filter(|d| d.verdict == Verdict::SignificantDecrease)
            .count();
        let increases = summaries
            .iter()
            .filter(|d| d.verdict == Verdict::SignificantIncrease)
            .count();
        log::info!("stats {metric}: {decreases} decrease days, {increases} increase days");

        let mut acc = vec![(0usize, 0.0f64); days];
        for &(t, v) in &samples {
            let k = window.day_offset(t);
            if (first..=last).contains(&k) {
                let slot = &mut acc[(k - first) as usize];
                slot.0 += 1;
                slot.1 += v;
            }
        }
        daily.push(Some(acc));
    }

    write_artifact(stage, &artifact(cfg, ZSCORE_DAILY), |w| {
        let header: Vec<String> = METRICS
            .iter()
            .flat_map(|(m, _)| [format!("n_{m}"), format!("{m}_z")])
            .collect();
        writeln!(w, "day_offset,{}", header.join(","))?;
        for i in 0..days {
            let mut fields = vec![(first + i as i64).to_string()];
            for d in &daily {
                match d.as_ref().map(|acc| acc[i]) {
                    Some((n, sum)) if n > 0 => {
                        fields.push(n.to_string());
                        fields.push(format!("{:.9}", sum / n as f64));
                    }
                    Some((n, _)) => {
                        fields.push(n.to_string());
                        fields.push(String::new());
                    }
                    None => {
                        fields.push("0".into());
                        fields.push(String::new());
                    }
                }
            }
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    })
}

#[derive(Debug, Deserialize)]
struct VerdictRow {
    day_offset: i64,
    verdict: String,
}

/// Day offsets flagged as significant decreases in a stats table.
pub fn decrease_days(path: &Path, stage: Stage) -> CliResult<Vec<i64>> {
    let reader = open_upstream(stage, path)?;
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<VerdictRow>() {
        let row = row.map_err(|e| CliError::data(stage, format!("{}: {e}", path.display())))?;
        if row.verdict == Verdict::SignificantDecrease.as_str() {
            out.push(row.day_offset);
        }
    }
    Ok(out)
}

fn exp_fit_json(fit: &Result<ExpFit, FitError>) -> serde_json::Value {
    match fit {
        Ok(f) => json!({
            "ok": true,
            "params": f.params,
            "sse": f.sse,
            "start": f.start,
            "iterations": f.iterations,
            "relative_gradient": f.relative_gradient,
        }),
        Err(e) => json!({
            "ok": false,
            "error": e.to_string(),
            "best_params": e.best.map(|b| b.0),
            "best_sse": e.best.map(|b| b.1),
        }),
    }
}

fn fit_artifacts(cfg: &RunConfig) -> Vec<PathBuf> {
    [BINNED, FIT_TABLE, MODEL_COMPARISON, FIT_DETAILS]
        .iter()
        .map(|n| artifact(cfg, n))
        .collect()
}

/// Bin z-scored valence, split at the landfall minimum and fit both sides.
/// Skipped when no day within the during half-width is a significant
/// decrease.
pub fn fit(cfg: &RunConfig) -> CliResult<StageOutcome> {
    let stage = Stage::Fit;
    let window = cfg.window()?;
    let h = window.during_halfwidth_days as i64;
    let drops = decrease_days(&artifact(cfg, &stats_file("valence")), stage)?;
    if !drops.iter().any(|d| d.abs() <= h) {
        remove_stale(&fit_artifacts(cfg));
        let reason = format!("no significant decrease in valence within {h} days of landfall");
        log::warn!("fit skipped: {reason}");
        return Ok(StageOutcome::Skipped(reason));
    }

    let rows = read_scored(cfg, stage)?;
    let Some(samples) = zscored(&rows, "valence", stage)? else {
        return Err(CliError::data(stage, "valence has no spread"));
    };
    let points: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(t, v)| (window.days_since_landfall(t), v))
        .collect();
    let series = bin_series(&points, cfg.fit.bin_hours).map_err(|e| CliError::core(stage, e))?;
    write_artifact(stage, &artifact(cfg, BINNED), |w| {
        writeln!(w, "t_days,mean,n")?;
        for b in &series.bins {
            writeln!(w, "{},{:.9},{}", b.t, b.mean, b.n)?;
        }
        Ok(())
    })?;

    let event =
        fit_event(&series, &window, cfg.fit.weighting).map_err(|e| CliError::core(stage, e))?;
    let comparison = compare_models_within(&series, h as f64, cfg.fit.weighting, &cfg.fit.models)
        .map_err(|e| CliError::core(stage, e))?;
    let resilience = event.resilience();
    let region = window.region_name.clone();
    write_artifact(stage, &artifact(cfg, FIT_TABLE), |w| {
        resilience::write_fit_table(w, &[(region.clone(), resilience.clone().ok())])
    })?;
    write_artifact(stage, &artifact(cfg, MODEL_COMPARISON), |w| {
        resilience::write_comparison_table(w, &[(region.clone(), comparison.clone())])
    })?;
    let details = json!({
        "region": region,
        "bin_hours": cfg.fit.bin_hours,
        "weighting": cfg.fit.weighting,
        "decrease_days": drops,
        "t_min": event.t_min,
        "min_value": event.min_value,
        "descending": exp_fit_json(&event.descending),
        "ascending": exp_fit_json(&event.ascending),
        "half_life_days": resilience.as_ref().ok().and_then(|r| r.half_life_days),
        "selected_model": comparison.selected,
    });
    write_artifact(stage, &artifact(cfg, FIT_DETAILS), |w| {
        serde_json::to_writer_pretty(&mut *w, &details)?;
        writeln!(w)
    })?;

    match resilience {
        Ok(r) => {
            match r.half_life_days {
                Some(hl) => log::info!("fit: t_min {:.2} d, half-life {hl:.3} d", r.t_min),
                None => log::warn!(
                    "fit: ascending branch does not recover (b = {})",
                    r.ascending.b
                ),
            }
            Ok(StageOutcome::Done)
        }
        Err(e) => Err(CliError::new(stage, ErrorKind::Fit, e.to_string())),
    }
}

pub fn lexshift(cfg: &RunConfig) -> CliResult<()> {
    let stage = Stage::Lexshift;
    let posts = read_corpus(cfg, stage)?;
    let lexicon = load_lexicon(cfg, stage)?;
    let partials: Vec<TermCounts> = posts
        .par_chunks(4096)
        .map(|chunk| {
            lexshift::term_period_counts(
                chunk.iter().map(|p| (p.period, p.text.as_str())),
                &lexicon,
            )
        })
        .collect();
    let mut counts = TermCounts::default();
    for p in &partials {
        counts.merge(p);
    }
    let basis = cfg.lexshift.rank_basis;
    let report =
        lexshift::analyze(&counts, cfg.seed, basis).map_err(|e| CliError::core(stage, e))?;

    write_artifact(stage, &artifact(cfg, TERM_PROFILES), |w| {
        lexshift::write_profiles(w, &report.profiles)
    })?;
    write_artifact(stage, &artifact(cfg, TAU), |w| {
        lexshift::write_tau(
            w,
            &[
                (Cluster::Concave, report.concave_tau),
                (Cluster::Convex, report.convex_tau),
            ],
        )
    })?;
    write_artifact(stage, &artifact(cfg, TOP_TERMS), |w| {
        lexshift::write_top_terms(w, &report.profiles, cfg.lexshift.top_k, basis)
    })?;
    let size = |c: Cluster| {
        report
            .profiles
            .iter()
            .filter(|p| p.cluster == Some(c))
            .count()
    };
    let clusters = json!({
        "seed": cfg.seed,
        "rank_basis": basis,
        "sizes": {
            "concave": size(Cluster::Concave),
            "convex": size(Cluster::Convex),
            "dropped": size(Cluster::Dropped),
        },
        "centroids": {
            "concave": report.clusters.centroid(Cluster::Concave),
            "convex": report.clusters.centroid(Cluster::Convex),
        },
        "sse": report.clusters.sse,
        "tau": {
            "concave": report.concave_tau,
            "convex": report.convex_tau,
        },
    });
    write_artifact(stage, &artifact(cfg, CLUSTERS), |w| {
        serde_json::to_writer_pretty(&mut *w, &clusters)?;
        writeln!(w)
    })?;
    log::info!(
        "lexshift: {} terms, {} concave, {} convex, {} dropped",
        report.profiles.len(),
        size(Cluster::Concave),
        size(Cluster::Convex),
        size(Cluster::Dropped)
    );
    Ok(())
}

fn sha256_file(path: &Path) -> std::io::Result<(u64, String)> {
    use sha2::{Digest, Sha256};
    let bytes = fs::read(path)?;
    Ok((bytes.len() as u64, hex::encode(Sha256::digest(&bytes))))
}

fn collect_files(dir: &Path, base: &Path, out: &mut Vec<String>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_files(&path, base, out)?;
        } else if let Ok(rel) = path.strip_prefix(base) {
            let rel = rel.to_string_lossy().replace('\\', "/");
            if rel != MANIFEST {
                out.push(rel);
            }
        }
    }
    Ok(())
}

/// Write `manifest.json` listing every file in the output directory with its
/// size and SHA-256, plus the seed and config hash.
pub fn manifest(cfg: &RunConfig, notes: &[String]) -> CliResult<()> {
    let stage = Stage::Manifest;
    ensure_out_dir(cfg, stage)?;
    let err = |e: std::io::Error| CliError::internal(stage, e.to_string());
    let mut files = Vec::new();
    collect_files(&cfg.out_dir, &cfg.out_dir, &mut files).map_err(err)?;
    files.sort();
    let mut artifacts = Vec::with_capacity(files.len());
    for rel in &files {
        let (bytes, sha) = sha256_file(&cfg.out_dir.join(rel)).map_err(err)?;
        artifacts.push(json!({ "path": rel, "bytes": bytes, "sha256": sha }));
    }
    let doc = json!({
        "seed": cfg.seed,
        "config_sha256": cfg.source_hash,
        "notes": notes,
        "artifacts": artifacts,
    });
    write_artifact(stage, &artifact(cfg, MANIFEST), |w| {
        serde_json::to_writer_pretty(&mut *w, &doc)?;
        writeln!(w)
    })
}

/// All stages in order. A fit failure lets the remaining stages run and is
/// reported at the end.
pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let mut notes = Vec::new();
    if cfg.input.corpus.is_none() {
        synth(cfg)?;
    }
    ingest(cfg)?;
    score(cfg)?;
    stats(cfg)?;
    let mut deferred = None;
    match fit(cfg) {
        Ok(StageOutcome::Skipped(reason)) => notes.push(format!("fit skipped: {reason}")),
        Ok(StageOutcome::Done) => {}
        Err(e) if e.kind == ErrorKind::Fit => {
            log::error!("{e}");
            notes.push(format!("fit failed: {}", e.message));
            deferred = Some(e);
        }
        Err(e) => return Err(e),
    }
    lexshift(cfg)?;
    if cfg.figures {
        crate::report::render(cfg)?;
    }
    manifest(cfg, &notes)?;
    match deferred {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
