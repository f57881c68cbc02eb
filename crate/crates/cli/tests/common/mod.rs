#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Config text with the bundled resources and the given extra TOML.
pub fn config_text(seed: u64, extra: &str) -> String {
    let data = data_dir();
    format!(
        "seed = {seed}\nout_dir = \"out\"\n\n[input]\nlexicon = {:?}\nemoji_lexicon = {:?}\ncategories = {:?}\n\n{extra}\n",
        data.join("vader_lexicon.txt"),
        data.join("emoji_utf8_lexicon.txt"),
        data.join("categories.dic"),
    )
}

pub fn write_config(dir: &Path, seed: u64, extra: &str) -> PathBuf {
    let path = dir.join("landfall.toml");
    fs::write(&path, config_text(seed, extra)).unwrap();
    path
}

pub fn landfall(config: &Path, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_landfall"));
    cmd.arg("--config").arg(config).args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// `(header, rows)` of a CSV file split on commas.
pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

pub fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}
