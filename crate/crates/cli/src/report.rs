//! Static SVG figures rendered from stage tables. A figure whose table is
//! missing or empty is skipped with a warning.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult, Stage};
use crate::pipeline::{self, METRICS};
use crate::svg::{extent, padded, Plot, PALETTE};

/// A CSV table held as strings, looked up by column name.
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Option<Table> {
        let mut rdr = csv::Reader::from_path(path).ok()?;
        let headers = rdr.headers().ok()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            rows.push(rec.ok()?.iter().map(str::to_string).collect());
        }
        Some(Table { headers, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn str(&self, row: usize, name: &str) -> Option<&str> {
        self.col(name)
            .and_then(|c| self.rows[row].get(c))
            .map(String::as_str)
    }

    /// Numeric cell; empty and `NA` cells are `None`.
    pub fn num(&self, row: usize, name: &str) -> Option<f64> {
        self.str(row, name)
            .and_then(|s| s.parse::<f64>().ok())
            .filter(|v| v.is_finite())
    }
}

fn load(cfg: &RunConfig, name: &str, figure: &str) -> Option<Table> {
    let path = cfg.out_dir.join(name);
    match Table::read(&path) {
        Some(t) if !t.is_empty() => Some(t),
        Some(_) => {
            log::warn!("{figure}: {name} is empty; figure skipped");
            None
        }
        None => {
            log::warn!("{figure}: {name} not found; figure skipped");
            None
        }
    }
}

fn save(dir: &Path, name: &str, svg: String) -> CliResult<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, svg).map_err(|e| {
        CliError::internal(
            Stage::Report,
            format!("cannot write {}: {e}", path.display()),
        )
    })?;
    Ok(path)
}

pub fn daily_frequency(t: &Table, halfwidth: f64) -> Option<String> {
    let pts: Vec<(f64, f64)> = (0..t.len())
        .filter_map(|i| Some((t.num(i, "day_offset")?, t.num(i, "count")?)))
        .collect();
    let (x0, x1) = extent(pts.iter().map(|p| p.0))?;
    let (_, y1) = extent(pts.iter().map(|p| p.1))?;
    let mut p = Plot::new(
        "Posts per day",
        "days since landfall",
        "posts",
        (x0, x1),
        (0.0, padded(0.0, y1).1),
    );
    p.span(-halfwidth, halfwidth, "#f2c14e", 0.2);
    p.vline(0.0, "#555");
    p.polyline(&pts, PALETTE[0], 1.5, false);
    Some(p.finish())
}

pub fn zscore_series(t: &Table) -> Option<String> {
    let series: Vec<(&str, Vec<(f64, f64)>)> = METRICS
        .iter()
        .map(|(m, _)| {
            let col = format!("{m}_z");
            let pts = (0..t.len())
                .filter_map(|i| Some((t.num(i, "day_offset")?, t.num(i, &col)?)))
                .collect();
            (*m, pts)
        })
        .filter(|(_, pts): &(&str, Vec<(f64, f64)>)| !pts.is_empty())
        .collect();
    let all = || series.iter().flat_map(|(_, pts)| pts.iter());
    let (x0, x1) = extent(all().map(|p| p.0))?;
    let (y0, y1) = extent(all().map(|p| p.1))?;
    let mut p = Plot::new(
        "Daily mean z-scored sentiment",
        "days since landfall",
        "z",
        (x0, x1),
        padded(y0.min(0.0), y1.max(0.0)),
    );
    p.hline(0.0, "#999");
    p.vline(0.0, "#555");
    let mut legend = Vec::new();
    for (i, (name, pts)) in series.iter().enumerate() {
        p.polyline(pts, PALETTE[i], 1.5, false);
        legend.push((*name, PALETTE[i]));
    }
    p.legend(&legend);
    Some(p.finish())
}

fn verdict_color(v: &str) -> &'static str {
    match v {
        "significant_decrease" => PALETTE[1],
        "significant_increase" => PALETTE[2],
        _ => "#000",
    }
}

/// Observed and null 95% bands with bold medians; one observed-median
/// marker per day, colored by verdict.
pub fn ci_bands(t: &Table, metric: &str) -> Option<String> {
    struct Day {
        x: f64,
        obs: [f64; 3],
        null: Option<[f64; 3]>,
        verdict: String,
    }
    let triple = |i: usize, p: &str| -> Option<[f64; 3]> {
        Some([
            t.num(i, &format!("{p}_p2.5"))?,
            t.num(i, &format!("{p}_p50"))?,
            t.num(i, &format!("{p}_p97.5"))?,
        ])
    };
    let days: Vec<Day> = (0..t.len())
        .filter_map(|i| {
            Some(Day {
                x: t.num(i, "day_offset")?,
                obs: triple(i, "obs")?,
                null: triple(i, "null"),
                verdict: t.str(i, "verdict").unwrap_or_default().to_string(),
            })
        })
        .collect();
    let (x0, x1) = extent(days.iter().map(|d| d.x))?;
    let (y0, y1) = extent(
        days.iter()
            .flat_map(|d| d.obs.into_iter().chain(d.null.into_iter().flatten())),
    )?;
    let mut p = Plot::new(
        &format!("Bootstrap 95% intervals: {metric}"),
        "days since landfall",
        &format!("mean z ({metric})"),
        (x0 - 0.5, x1 + 0.5),
        padded(y0, y1),
    );
    p.vline(0.0, "#555");

    // Bands are drawn per run of consecutive days that have both triples.
    let mut runs: Vec<Vec<&Day>> = Vec::new();
    for d in days.iter().filter(|d| d.null.is_some()) {
        match runs.last_mut() {
            Some(run) if run.last().is_some_and(|l| d.x - l.x <= 1.0) => run.push(d),
            _ => runs.push(vec![d]),
        }
    }
    for run in &runs {
        let xs: Vec<f64> = run.iter().map(|d| d.x).collect();
        let nl: Vec<f64> = run.iter().map(|d| d.null.unwrap()[0]).collect();
        let nu: Vec<f64> = run.iter().map(|d| d.null.unwrap()[2]).collect();
        p.band(&xs, &nl, &nu, PALETTE[3], 0.3);
        let nm: Vec<(f64, f64)> = run.iter().map(|d| (d.x, d.null.unwrap()[1])).collect();
        p.polyline(&nm, PALETTE[3], 2.5, true);
    }
    let mut obs_runs: Vec<Vec<&Day>> = Vec::new();
    for d in &days {
        match obs_runs.last_mut() {
            Some(run) if run.last().is_some_and(|l| d.x - l.x <= 1.0) => run.push(d),
            _ => obs_runs.push(vec![d]),
        }
    }
    for run in &obs_runs {
        let xs: Vec<f64> = run.iter().map(|d| d.x).collect();
        let ol: Vec<f64> = run.iter().map(|d| d.obs[0]).collect();
        let ou: Vec<f64> = run.iter().map(|d| d.obs[2]).collect();
        p.band(&xs, &ol, &ou, PALETTE[0], 0.3);
        let om: Vec<(f64, f64)> = run.iter().map(|d| (d.x, d.obs[1])).collect();
        p.polyline(&om, PALETTE[0], 2.5, false);
    }
    for d in &days {
        p.marker(d.x, d.obs[1], verdict_color(&d.verdict), 3.0);
    }
    p.legend(&[
        ("observed", PALETTE[0]),
        ("null", PALETTE[3]),
        ("decrease", PALETTE[1]),
        ("increase", PALETTE[2]),
    ]);
    Some(p.finish())
}

/// Binned valence with both fitted branches meeting at the minimum.
pub fn fit_overlay(bins: &Table, fit: &Table, t_min: f64) -> Option<String> {
    let pts: Vec<(f64, f64)> = (0..bins.len())
        .filter_map(|i| Some((bins.num(i, "t_days")?, bins.num(i, "mean")?)))
        .collect();
    let param = |name: &str| fit.num(0, name);
    let desc = [param("a_desc")?, param("b_desc")?, param("c_desc")?];
    let asc = [param("a_asc")?, param("b_asc")?, param("c_asc")?];
    let (x0, x1) = extent(pts.iter().map(|p| p.0))?;
    let (y0, y1) = extent(pts.iter().map(|p| p.1))?;
    let eval = |p: [f64; 3], t: f64| p[0] * (p[1] * t).exp() + p[2];
    let curve = |p: [f64; 3], a: f64, b: f64| -> Vec<(f64, f64)> {
        (0..=100)
            .map(|i| {
                let t = a + (b - a) * i as f64 / 100.0;
                (t, eval(p, t))
            })
            .filter(|(_, y)| y.is_finite() && *y >= y0 - (y1 - y0) && *y <= y1 + (y1 - y0))
            .collect()
    };
    let mut p = Plot::new(
        "Exponential fits around landfall",
        "days since landfall",
        "mean z (valence)",
        (x0, x1),
        padded(y0, y1),
    );
    p.vline(t_min, "#555");
    for &(x, y) in &pts {
        p.marker(x, y, "#444", 2.0);
    }
    p.polyline(&curve(desc, x0, t_min), PALETTE[1], 2.0, false);
    p.polyline(&curve(asc, t_min, x1), PALETTE[2], 2.0, false);
    p.legend(&[
        ("descending fit", PALETTE[1]),
        ("ascending fit", PALETTE[2]),
    ]);
    Some(p.finish())
}

/// Grouped bars of the three period-pair correlations per cluster.
pub fn tau_bars(t: &Table) -> Option<String> {
    let pairs = [
        ("before_during", "B-D"),
        ("during_after", "D-A"),
        ("before_after", "B-A"),
    ];
    let rows: Vec<(String, Vec<Option<f64>>)> = (0..t.len())
        .map(|i| {
            (
                t.str(i, "cluster").unwrap_or_default().to_string(),
                pairs.iter().map(|(c, _)| t.num(i, c)).collect(),
            )
        })
        .filter(|(_, v): &(String, Vec<Option<f64>>)| v.iter().any(Option::is_some))
        .collect();
    if rows.is_empty() {
        return None;
    }
    let n = rows.len() as f64;
    let mut p = Plot::new(
        "Kendall tau between period rankings",
        "cluster / period pair",
        "tau",
        (-0.5, n - 0.5),
        (-1.05, 1.05),
    );
    p.hline(0.0, "#333");
    for (g, (cluster, vals)) in rows.iter().enumerate() {
        for (k, v) in vals.iter().enumerate() {
            let x = g as f64 + (k as f64 - 1.0) * 0.27;
            if let Some(v) = v {
                p.bar(x, 0.24, *v, PALETTE[k]);
            }
            p.label(x, -1.0, pairs[k].1);
        }
        p.label(g as f64, 0.98, cluster);
    }
    p.legend(&[
        ("before-during", PALETTE[0]),
        ("during-after", PALETTE[1]),
        ("before-after", PALETTE[2]),
    ]);
    Some(p.finish())
}

fn fit_t_min(cfg: &RunConfig) -> Option<f64> {
    let text = fs::read_to_string(cfg.out_dir.join(pipeline::FIT_DETAILS)).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    v.get("t_min")?.as_f64()
}

/// Render every figure whose inputs exist into `<out>/figures`.
pub fn render(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let dir = cfg.out_dir.join(pipeline::FIGURES_DIR);
    fs::create_dir_all(&dir).map_err(|e| {
        CliError::internal(
            Stage::Report,
            format!("cannot create {}: {e}", dir.display()),
        )
    })?;
    let mut written = Vec::new();
    let mut emit = |name: &str, svg: Option<String>| -> CliResult<()> {
        let path = dir.join(name);
        match svg {
            Some(svg) => written.push(save(&dir, name, svg)?),
            None => {
                if path.exists() {
                    let _ = fs::remove_file(&path);
                }
            }
        }
        Ok(())
    };

    let halfwidth = cfg
        .window()
        .map(|w| w.during_halfwidth_days as f64)
        .unwrap_or(5.0);
    emit(
        "daily_frequency.svg",
        load(cfg, pipeline::DAILY_COUNTS, "daily_frequency")
            .and_then(|t| daily_frequency(&t, halfwidth)),
    )?;
    emit(
        "zscore_series.svg",
        load(cfg, pipeline::ZSCORE_DAILY, "zscore_series").and_then(|t| zscore_series(&t)),
    )?;
    for (metric, _) in METRICS {
        let name = format!("ci_{metric}");
        emit(
            &format!("{name}.svg"),
            load(cfg, &pipeline::stats_file(metric), &name).and_then(|t| ci_bands(&t, metric)),
        )?;
    }
    let overlay = match (
        load(cfg, pipeline::BINNED, "fit_overlay"),
        load(cfg, pipeline::FIT_TABLE, "fit_overlay"),
    ) {
        (Some(b), Some(f)) => {
            let svg = fit_t_min(cfg).and_then(|t_min| fit_overlay(&b, &f, t_min));
            if svg.is_none() {
                log::warn!("fit_overlay: fit table has no parameters; figure skipped");
            }
            svg
        }
        _ => None,
    };
    emit("fit_overlay.svg", overlay)?;
    let tau = load(cfg, pipeline::TAU, "tau_bars").and_then(|t| {
        let svg = tau_bars(&t);
        if svg.is_none() {
            log::warn!("tau_bars: no defined correlations; figure skipped");
        }
        svg
    });
    emit("tau_bars.svg", tau)?;
    log::info!("report: {} figures", written.len());
    Ok(written)
}
