//! Binned valence series, exponential decline/recovery fits around the
//! sentiment minimum, half-life, and comparison against other curve families.

mod expfit;
mod models;

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

pub use expfit::{
    fit_exponential, fit_exponential_weighted, sse, sse_gradient, ExpFit, ExpParams,
    GRADIENT_TOLERANCE, START_RATES,
};
pub use models::ModelFamily;

use crate::corpus::EventWindow;
use crate::error::{Error, FitError, Result};

pub const DEFAULT_BIN_HOURS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    /// Bin midpoint, days relative to landfall.
    pub t: f64,
    pub mean: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedSeries {
    pub bin_width_hours: f64,
    pub bins: Vec<Bin>,
}

impl BinnedSeries {
    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }
}

/// Group `(t, value)` samples (t in days from landfall) into fixed-width bins
/// with a boundary at t = 0. Empty bins are omitted.
pub fn bin_series(samples: &[(f64, f64)], bin_width_hours: f64) -> Result<BinnedSeries> {
    if !(bin_width_hours > 0.0 && bin_width_hours.is_finite()) {
        return Err(Error::Config(format!(
            "bin width must be positive, got {bin_width_hours}"
        )));
    }
    let width_days = bin_width_hours / 24.0;
    let mut acc: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    for &(t, v) in samples {
        let idx = (t * 24.0 / bin_width_hours).floor() as i64;
        let e = acc.entry(idx).or_insert((0.0, 0));
        e.0 += v;
        e.1 += 1;
    }
    let bins = acc
        .into_iter()
        .map(|(idx, (sum, n))| Bin {
            t: (idx as f64 + 0.5) * width_days,
            mean: sum / n as f64,
            n,
        })
        .collect();
    Ok(BinnedSeries {
        bin_width_hours,
        bins,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    #[default]
    Equal,
    /// Weight each bin by its post count.
    Count,
}

/// Half-life of the recovery: `ln 2 / |b|`.
pub fn half_life(ascending: &ExpParams) -> Result<f64> {
    if ascending.b < 0.0 {
        Ok(std::f64::consts::LN_2 / ascending.b.abs())
    } else {
        Err(Error::UndefinedHalfLife(ascending.b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub ts: Vec<f64>,
    pub ys: Vec<f64>,
    pub ws: Vec<f64>,
}

impl Segment {
    fn from_bins<'a>(bins: impl Iterator<Item = &'a Bin>, weighting: Weighting) -> Segment {
        let mut s = Segment {
            ts: Vec::new(),
            ys: Vec::new(),
            ws: Vec::new(),
        };
        for b in bins {
            s.ts.push(b.t);
            s.ys.push(b.mean);
            s.ws.push(match weighting {
                Weighting::Equal => 1.0,
                Weighting::Count => b.n as f64,
            });
        }
        s
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }
}

/// The series split at its minimum within `[-h, h]` days. The minimum bin
/// belongs to both segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub t_min: f64,
    pub min_value: f64,
    pub descending: Segment,
    pub ascending: Segment,
}

pub fn split_at_minimum(
    series: &BinnedSeries,
    halfwidth_days: f64,
    weighting: Weighting,
) -> Result<Split> {
    let min_bin = series
        .bins
        .iter()
        .filter(|b| b.t >= -halfwidth_days && b.t <= halfwidth_days)
        .fold(None::<&Bin>, |best, b| match best {
            Some(m) if m.mean <= b.mean => Some(m),
            _ => Some(b),
        })
        .ok_or_else(|| {
            Error::Degenerate(format!("no bins within {halfwidth_days} days of landfall"))
        })?;
    let t_min = min_bin.t;
    Ok(Split {
        t_min,
        min_value: min_bin.mean,
        descending: Segment::from_bins(series.bins.iter().filter(|b| b.t <= t_min), weighting),
        ascending: Segment::from_bins(series.bins.iter().filter(|b| b.t >= t_min), weighting),
    })
}

/// Both branch fits; each side may fail independently.
#[derive(Debug, Clone)]
pub struct EventFit {
    pub t_min: f64,
    pub min_value: f64,
    pub descending: std::result::Result<ExpFit, FitError>,
    pub ascending: std::result::Result<ExpFit, FitError>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResilienceFit {
    pub t_min: f64,
    pub descending: ExpParams,
    pub ascending: ExpParams,
    pub sse_descending: f64,
    pub sse_ascending: f64,
    pub sse_total: f64,
    /// `None` when the ascending branch does not decay toward its asymptote.
    pub half_life_days: Option<f64>,
}

impl EventFit {
    pub fn resilience(&self) -> std::result::Result<ResilienceFit, FitError> {
        let d = self.descending.clone()?;
        let a = self.ascending.clone()?;
        Ok(ResilienceFit {
            t_min: self.t_min,
            descending: d.params,
            ascending: a.params,
            sse_descending: d.sse,
            sse_ascending: a.sse,
            sse_total: d.sse + a.sse,
            half_life_days: half_life(&a.params).ok(),
        })
    }
}

pub fn fit_event(
    series: &BinnedSeries,
    window: &EventWindow,
    weighting: Weighting,
) -> Result<EventFit> {
    fit_event_within(series, window.during_halfwidth_days as f64, weighting)
}

/// As [`fit_event`] with the minimum searched in `[-halfwidth_days, halfwidth_days]`.
pub fn fit_event_within(
    series: &BinnedSeries,
    halfwidth_days: f64,
    weighting: Weighting,
) -> Result<EventFit> {
    let split = split_at_minimum(series, halfwidth_days, weighting)?;
    let fit = |s: &Segment| fit_exponential_weighted(&s.ts, &s.ys, &s.ws);
    Ok(EventFit {
        t_min: split.t_min,
        min_value: split.min_value,
        descending: fit(&split.descending),
        ascending: fit(&split.ascending),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub family: ModelFamily,
    pub sse_descending: Option<f64>,
    pub sse_ascending: Option<f64>,
    pub sse_total: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub t_min: f64,
    pub entries: Vec<ModelEntry>,
    pub selected: Option<ModelFamily>,
}

impl ModelComparison {
    pub fn entry(&self, family: ModelFamily) -> Option<&ModelEntry> {
        self.entries.iter().find(|e| e.family == family)
    }
}

pub fn compare_models(
    series: &BinnedSeries,
    window: &EventWindow,
    weighting: Weighting,
) -> Result<ModelComparison> {
    compare_models_within(
        series,
        window.during_halfwidth_days as f64,
        weighting,
        &ModelFamily::ALL,
    )
}

/// Fit every family to both segments and select the smallest total SSE.
/// Totals equal within rounding keep the family listed first.
pub fn compare_models_within(
    series: &BinnedSeries,
    halfwidth_days: f64,
    weighting: Weighting,
    families: &[ModelFamily],
) -> Result<ModelComparison> {
    let split = split_at_minimum(series, halfwidth_days, weighting)?;
    let scale: f64 = [&split.descending, &split.ascending]
        .iter()
        .flat_map(|s| s.ys.iter().zip(&s.ws).map(|(y, w)| w * y * y))
        .sum();
    let tolerance = 1e-20 + 1e-12 * scale;

    let mut entries = Vec::with_capacity(families.len());
    for &family in families {
        let d = family.fit_sse(
            &split.descending.ts,
            &split.descending.ys,
            &split.descending.ws,
            split.t_min,
        );
        let a = family.fit_sse(
            &split.ascending.ts,
            &split.ascending.ys,
            &split.ascending.ws,
            split.t_min,
        );
        let error = match (&d, &a) {
            (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
            _ => None,
        };
        let (sd, sa) = (d.ok(), a.ok());
        entries.push(ModelEntry {
            family,
            sse_descending: sd,
            sse_ascending: sa,
            sse_total: sd.zip(sa).map(|(x, y)| x + y),
            error,
        });
    }

    let mut selected: Option<(ModelFamily, f64)> = None;
    for e in &entries {
        if let Some(total) = e.sse_total {
            if selected.is_none_or(|(_, best)| total < best - tolerance) {
                selected = Some((e.family, total));
            }
        }
    }
    Ok(ModelComparison {
        t_min: split.t_min,
        entries,
        selected: selected.map(|(f, _)| f),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "NA".into())
}

/// One row per region: descending and ascending parameters, total SSE and
/// half-life. Regions without a fit get `NA` fields.
pub fn write_fit_table<W: Write>(
    mut out: W,
    rows: &[(String, Option<ResilienceFit>)],
) -> std::io::Result<()> {
    writeln!(
        out,
        "region,a_desc,b_desc,c_desc,a_asc,b_asc,c_asc,sse,half_life_days"
    )?;
    for (region, fit) in rows {
        match fit {
            Some(f) => writeln!(
                out,
                "{region},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
                f.descending.a,
                f.descending.b,
                f.descending.c,
                f.ascending.a,
                f.ascending.b,
                f.ascending.c,
                f.sse_total,
                fmt_opt(f.half_life_days)
            )?,
            None => writeln!(out, "{region},NA,NA,NA,NA,NA,NA,NA,NA")?,
        }
    }
    Ok(())
}

pub fn write_comparison_table<W: Write>(
    mut out: W,
    rows: &[(String, ModelComparison)],
) -> std::io::Result<()> {
    writeln!(
        out,
        "region,model,sse_descending,sse_ascending,sse_total,selected"
    )?;
    for (region, cmp) in rows {
        for e in &cmp.entries {
            writeln!(
                out,
                "{region},{},{},{},{},{}",
                e.family,
                fmt_opt(e.sse_descending),
                fmt_opt(e.sse_ascending),
                fmt_opt(e.sse_total),
                cmp.selected == Some(e.family)
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_means() {
        let s = bin_series(&[(0.1, 0.2), (0.2, 0.4), (0.6, -1.0), (0.7, 1.0)], 12.0).unwrap();
        let means: Vec<f64> = s.bins.iter().map(|b| b.mean).collect();
        assert!((means[0] - 0.3).abs() < 1e-15 && means[1].abs() < 1e-15);
        assert_eq!(s.bins[0].t, 0.25);
        assert_eq!(s.bins[1].n, 2);
    }

    #[test]
    fn bin_boundary_at_landfall() {
        let s = bin_series(&[(-1e-9, 1.0), (0.0, 2.0)], 12.0).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.bins[0].t, -0.25);
        assert_eq!(s.bins[1].t, 0.25);
        assert!(bin_series(&[], 12.0).unwrap().is_empty());
        assert!(bin_series(&[], 0.0).is_err());
    }

    #[test]
    fn half_life_values() {
        let hl = |b: f64| half_life(&ExpParams { a: -1.0, b, c: 0.0 });
        assert!((hl(-0.77).unwrap() - 0.90).abs() < 0.005);
        assert!((hl(-0.95).unwrap() - 0.73).abs() < 0.005);
        assert!((hl(-std::f64::consts::LN_2).unwrap() - 1.0).abs() < 1e-15);
        assert!(hl(0.0).is_err());
        assert!(hl(0.3).is_err());
    }

    fn series_from(ts: &[f64], f: impl Fn(f64) -> f64) -> BinnedSeries {
        BinnedSeries {
            bin_width_hours: 12.0,
            bins: ts
                .iter()
                .map(|&t| Bin {
                    t,
                    mean: f(t),
                    n: 1,
                })
                .collect(),
        }
    }

    #[test]
    fn minimum_restricted_to_window() {
        let ts: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.5 + 0.25).collect();
        let s = series_from(&ts, |t| {
            if t > 8.0 {
                -5.0
            } else {
                (t - 1.25).abs() * 0.1
            }
        });
        let split = split_at_minimum(&s, 5.0, Weighting::Equal).unwrap();
        assert_eq!(split.t_min, 1.25);
        assert_eq!(split.descending.ts.last(), Some(&1.25));
        assert_eq!(split.ascending.ts.first(), Some(&1.25));
    }

    #[test]
    fn flat_series_plateau() {
        let ts: Vec<f64> = (-20..20).map(|i| i as f64 * 0.5 + 0.25).collect();
        let fit = fit_event_within(&series_from(&ts, |_| 0.1), 5.0, Weighting::Equal).unwrap();
        let r = fit.resilience().unwrap();
        assert!(r.sse_total < 1e-28);
        assert_eq!(r.half_life_days, None);
    }

    #[test]
    fn short_side_fails_alone() {
        let ts: Vec<f64> = (-2..20).map(|i| i as f64 * 0.5 + 0.25).collect();
        let f = |t: f64| {
            if t < -0.75 {
                2.0
            } else {
                1.0 - (-(t + 0.75)).exp()
            }
        };
        let fit = fit_event_within(&series_from(&ts, f), 5.0, Weighting::Equal).unwrap();
        assert!(fit.descending.is_err());
        assert!(fit.ascending.is_ok());
        assert!(fit.resilience().is_err());
    }

    #[test]
    fn flat_comparison_ties_to_exponential() {
        let ts: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.5 + 0.25).collect();
        let flat = series_from(&ts, |_| 0.2);
        let cmp = compare_models_within(&flat, 5.0, Weighting::Equal, &ModelFamily::ALL).unwrap();
        assert_eq!(cmp.selected, Some(ModelFamily::Exponential));
    }
}
