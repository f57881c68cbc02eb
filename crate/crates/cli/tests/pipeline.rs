mod common;

use std::fs;

use common::*;
use landfall_cli::report::{ci_bands, tau_bars, Table};
use sha2::{Digest, Sha256};

const FAST_DIP: &str = r#"
[bootstrap]
resamples = 500

[synth]
posts_per_day = 150
dip = { amplitude = 1.5, onset_day = 0.0, decay_rate = 0.7, descent_rate = 1.0 }
"#;

#[test]
fn dip_run_writes_full_artifact_set() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 1, FAST_DIP);
    let out = landfall(&cfg, &["run"], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let dir = tmp.path().join("out");
    for name in [
        "synth_posts.jsonl",
        "synth_truth.json",
        "corpus.jsonl",
        "rejections.csv",
        "daily_counts.csv",
        "ingest_summary.json",
        "scored.jsonl",
        "topic_audit.csv",
        "stats_valence.csv",
        "stats_lwpr.csv",
        "stats_lwnr.csv",
        "zscore_daily.csv",
        "binned_valence.csv",
        "fit.csv",
        "model_comparison.csv",
        "fit_details.json",
        "term_profiles.csv",
        "tau.csv",
        "top_terms.csv",
        "clusters.json",
        "manifest.json",
        "figures/daily_frequency.svg",
        "figures/zscore_series.svg",
        "figures/ci_valence.svg",
        "figures/ci_lwpr.svg",
        "figures/ci_lwnr.svg",
        "figures/fit_overlay.svg",
        "figures/tau_bars.svg",
    ] {
        assert!(dir.join(name).is_file(), "missing {name}");
    }
    let (header, rows) = read_csv(&dir.join("fit.csv"));
    assert_eq!(rows.len(), 1);
    let hl: f64 = rows[0][column(&header, "half_life_days")].parse().unwrap();
    assert!(hl > 0.5 && hl < 1.6, "half-life {hl}");
}

#[test]
fn manifest_hashes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 2, FAST_DIP);
    assert!(landfall(&cfg, &["run", "--no-figures"], &[])
        .status
        .success());
    let dir = tmp.path().join("out");
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 2);
    let config_hash = hex::encode(Sha256::digest(fs::read(&cfg).unwrap()));
    assert_eq!(manifest["config_sha256"], config_hash.as_str());
    let artifacts = manifest["artifacts"].as_array().unwrap();
    let paths: Vec<&str> = artifacts
        .iter()
        .map(|a| a["path"].as_str().unwrap())
        .collect();
    let mut sorted = paths.clone();
    sorted.sort();
    assert_eq!(paths, sorted);
    assert!(!paths.iter().any(|p| p.starts_with("figures/")));
    assert!(paths.contains(&"fit.csv"));
    for a in artifacts {
        let bytes = fs::read(dir.join(a["path"].as_str().unwrap())).unwrap();
        assert_eq!(a["bytes"], bytes.len() as u64);
        assert_eq!(a["sha256"], hex::encode(Sha256::digest(&bytes)).as_str());
    }
}

#[test]
fn stationary_run_skips_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        3,
        r#"
[bootstrap]
resamples = 500

[synth]
posts_per_day = 150
dip = { amplitude = 0.0, onset_day = 0.0, decay_rate = 0.7 }
"#,
    );
    let out = landfall(&cfg, &["run"], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(
        stderr(&out).contains("no significant decrease"),
        "{}",
        stderr(&out)
    );
    let dir = tmp.path().join("out");
    assert!(!dir.join("fit.csv").exists());
    assert!(!dir.join("figures/fit_overlay.svg").exists());
    assert!(dir.join("tau.csv").exists());
    let manifest = fs::read_to_string(dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("fit skipped: no significant decrease"));
}

#[test]
fn stages_run_separately_match_full_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 4, FAST_DIP);
    let staged = tmp.path().join("staged");
    let full = tmp.path().join("full");
    for stage in [
        "synth", "ingest", "score", "stats", "fit", "lexshift", "report",
    ] {
        let out = landfall(&cfg, &[stage, "--out", staged.to_str().unwrap()], &[]);
        assert!(out.status.success(), "{stage}: {}", stderr(&out));
    }
    let out = landfall(&cfg, &["run", "--out", full.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    for name in [
        "stats_valence.csv",
        "fit.csv",
        "tau.csv",
        "term_profiles.csv",
        "figures/ci_valence.svg",
    ] {
        assert_eq!(
            fs::read(staged.join(name)).unwrap(),
            fs::read(full.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn missing_lexicon_is_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let text = config_text(0, FAST_DIP).replace("vader_lexicon.txt", "no_such_lexicon.txt");
    let cfg = tmp.path().join("landfall.toml");
    fs::write(&cfg, text).unwrap();
    let out = landfall(&cfg, &["run"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("config: lexicon file not found"),
        "{}",
        stderr(&out)
    );
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn unknown_config_key_is_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 0, "[bootstrap]\nresample = 10\n");
    assert_eq!(landfall(&cfg, &["run"], &[]).status.code(), Some(2));
}

#[test]
fn empty_window_is_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("posts.jsonl");
    fs::write(
        &corpus,
        "{\"id\":\"1\",\"created_at\":\"2020-01-01T00:00:00Z\",\"text\":\"good\",\"lat\":29.5,\"lon\":-95.5,\"lang\":\"en\",\"is_retweet\":false}\nnot json\n",
    )
    .unwrap();
    let cfg = write_config(
        tmp.path(),
        0,
        r#"
[event]
region_name = "Houston"
formation = "2017-08-17T00:00:00Z"
landfall = "2017-08-26T03:00:00Z"
dissipation = "2017-09-03T00:00:00Z"
bbox = { min_lat = 29.0, max_lat = 30.5, min_lon = -96.0, max_lon = -95.0 }
"#,
    );
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replace("[input]\n", "[input]\ncorpus = \"posts.jsonl\"\n");
    fs::write(&cfg, text).unwrap();
    let out = landfall(&cfg, &["run"], &[]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("ingest:"), "{}", stderr(&out));
    let dir = tmp.path().join("out");
    assert_eq!(
        fs::read_to_string(dir.join("rejections.csv")).unwrap(),
        "line_number,reason\n2,malformed_record\n"
    );
}

#[test]
fn fit_failure_exits_4_after_remaining_stages() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        5,
        r#"
[bootstrap]
resamples = 500

[fit]
bin_hours = 24.0

[synth]
posts_per_day = 150
days_after = 1
during_halfwidth_days = 1
dip = { amplitude = 1.5, onset_day = 0.0, decay_rate = 0.7, descent_rate = 1.0 }
"#,
    );
    let out = landfall(&cfg, &["run"], &[]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stderr(&out).contains("fit:"), "{}", stderr(&out));
    let dir = tmp.path().join("out");
    let (_, rows) = read_csv(&dir.join("fit.csv"));
    assert!(rows[0][1..].iter().all(|v| v == "NA"));
    assert!(dir.join("tau.csv").exists());
    assert!(fs::read_to_string(dir.join("manifest.json"))
        .unwrap()
        .contains("fit failed"));
}

#[test]
fn ci_figure_has_one_marker_per_day() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("stats.csv");
    let mut text = String::from(
        "day_offset,n,obs_p2.5,obs_p50,obs_p97.5,null_p2.5,null_p50,null_p97.5,verdict\n",
    );
    for d in -15..15 {
        let m = if d == 0 { -1.0 } else { 0.01 * d as f64 };
        let verdict = if d == 0 {
            "significant_decrease"
        } else {
            "not_significant"
        };
        text.push_str(&format!(
            "{d},100,{},{m},{},-0.2,0,0.2,{verdict}\n",
            m - 0.1,
            m + 0.1
        ));
    }
    fs::write(&path, text).unwrap();
    let svg = ci_bands(&Table::read(&path).unwrap(), "valence").unwrap();
    assert_eq!(svg.matches("<circle").count(), 30);
    assert_eq!(svg.matches("<polygon").count(), 2);
    assert_eq!(
        svg,
        ci_bands(&Table::read(&path).unwrap(), "valence").unwrap()
    );
}

#[test]
fn undefined_tau_skips_figure() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("tau.csv");
    fs::write(
        &path,
        "cluster,before_during,during_after,before_after\nconcave,NA,NA,NA\nconvex,NA,NA,NA\n",
    )
    .unwrap();
    assert!(tau_bars(&Table::read(&path).unwrap()).is_none());
    fs::write(
        &path,
        "cluster,before_during,during_after,before_after\nconcave,0.2,0.3,0.9\n",
    )
    .unwrap();
    let svg = tau_bars(&Table::read(&path).unwrap()).unwrap();
    assert!(svg.contains("concave"));
}
