//! Z-scoring, per-day bootstrap percentiles, the weekday-matched null model
//! and the significance rule comparing the two.
//!
//! For each day `k` the observed values are resampled `B` times (with
//! replacement, sample size `N_k`) and the 2.5/50/97.5 percentiles of the
//! resampled means are taken. The null model pools the values of the days in
//! `[k - W, k - 1]` that fall on the same weekday as `k` (four days for the
//! default `W = 28`) and is bootstrapped the same way with sample size `N_k`.
//! A day is a significant decrease when the observed 97.5th percentile lies
//! below the null 2.5th percentile, and symmetrically for an increase.
//!
//! Percentiles use linear interpolation between order statistics. Every
//! `(day, role, metric)` triple draws from its own deterministic random
//! stream, so results do not depend on evaluation order or thread count.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean and population standard deviation used to z-score a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZScore {
    pub mean: f64,
    pub std: f64,
}

impl ZScore {
    pub fn fit(values: &[f64]) -> Result<ZScore> {
        if values.len() < 2 {
            return Err(Error::Degenerate(format!(
                "z-score needs at least 2 values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate(
                "z-score input contains non-finite values".into(),
            ));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let std = var.sqrt();
        if !(std > 0.0) || std <= mean.abs() * 1e-14 {
            return Err(Error::Degenerate("z-score input has zero variance".into()));
        }
        Ok(ZScore { mean, std })
    }

    pub fn apply(&self, v: f64) -> f64 {
        (v - self.mean) / self.std
    }
}

pub fn zscore_series(values: &[f64]) -> Result<Vec<f64>> {
    let z = ZScore::fit(values)?;
    Ok(values.iter().map(|&v| z.apply(v)).collect())
}

/// Percentile `p` (0..=100) of sorted data by linear interpolation between
/// order statistics at rank `p/100 * (n-1)`.
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let rank = (p / 100.0) * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    if hi == lo {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercentileTriple {
    pub p2_5: f64,
    pub p50: f64,
    pub p97_5: f64,
}

impl PercentileTriple {
    pub fn from_samples(mut samples: Vec<f64>) -> PercentileTriple {
        samples.sort_by(f64::total_cmp);
        PercentileTriple {
            p2_5: percentile_sorted(&samples, 2.5),
            p50: percentile_sorted(&samples, 50.0),
            p97_5: percentile_sorted(&samples, 97.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Resamples per day (`B`).
    pub resamples: usize,
    pub null_window_days: u32,
    pub seed: u64,
    pub min_pool: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            resamples: 10_000,
            null_window_days: 28,
            seed: 0,
            min_pool: 10,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resamples == 0 {
            return Err(Error::Config(
                "bootstrap resamples must be at least 1".into(),
            ));
        }
        if self.null_window_days == 0 {
            return Err(Error::Config(
                "null window must span at least one day".into(),
            ));
        }
        if !self.null_window_days.is_multiple_of(7) {
            log::warn!(
                "null window of {} days is not a whole number of weeks",
                self.null_window_days
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Observed,
    Null,
}

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub day_offset: i64,
    pub role: Role,
    /// Distinguishes metrics sharing one seed.
    pub metric: u8,
}

impl StreamKey {
    pub fn id(&self) -> u64 {
        let role = match self.role {
            Role::Observed => 0u64,
            Role::Null => 1,
        };
        ((self.day_offset as u64) << 16) ^ (u64::from(self.metric) << 1) ^ role
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Deterministic generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(
        splitmix64(seed) ^ splitmix64(stream.rotate_left(17) ^ 0xA5A5_A5A5),
    )
}

/// `resamples` means of `sample_size` draws with replacement from `pool`.
///
/// Indices come from Lemire's multiply-and-reject on the two 32-bit halves
/// of each generator output, low half first. A half left over at the end of
/// one replicate is discarded. The two halves feed separate partial sums.
pub fn resampled_means<R: RngCore>(
    pool: &[f64],
    sample_size: usize,
    resamples: usize,
    rng: &mut R,
) -> Vec<f64> {
    assert!(sample_size > 0);
    let n = u32::try_from(pool.len()).expect("pool size fits in u32");
    assert!(n > 0);
    let n64 = u64::from(n);
    let threshold = n.wrapping_neg() % n;
    let inv = 1.0 / sample_size as f64;
    (0..resamples)
        .map(|_| {
            let (mut s0, mut s1) = (0.0, 0.0);
            let mut remaining = sample_size;
            while remaining >= 2 {
                let x = rng.next_u64();
                let m0 = (x & 0xFFFF_FFFF) * n64;
                let m1 = (x >> 32) * n64;
                let ok0 = (m0 as u32) >= threshold;
                let ok1 = (m1 as u32) >= threshold;
                if ok0 {
                    s0 += pool[(m0 >> 32) as usize];
                    remaining -= 1;
                }
                if ok1 {
                    s1 += pool[(m1 >> 32) as usize];
                    remaining -= 1;
                }
            }
            while remaining > 0 {
                let m0 = (rng.next_u64() & 0xFFFF_FFFF) * n64;
                if (m0 as u32) >= threshold {
                    s0 += pool[(m0 >> 32) as usize];
                    remaining -= 1;
                }
            }
            (s0 + s1) * inv
        })
        .collect()
}

/// Bootstrap percentile triple of the mean of `pool`, resampling
/// `sample_size` values per replicate.
pub fn bootstrap_pool(
    pool: &[f64],
    sample_size: usize,
    cfg: &BootstrapConfig,
    stream: u64,
) -> Result<PercentileTriple> {
    if pool.len() < cfg.min_pool.max(1) || sample_size == 0 {
        return Err(Error::InsufficientData {
            got: pool.len().min(sample_size),
            need: cfg.min_pool.max(1),
        });
    }
    let mut rng = stream_rng(cfg.seed, stream);
    Ok(PercentileTriple::from_samples(resampled_means(
        pool,
        sample_size,
        cfg.resamples,
        &mut rng,
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayObservations {
    pub day_offset: i64,
    pub values: Vec<f64>,
}

impl DayObservations {
    pub fn n(&self) -> usize {
        self.values.len()
    }
}

pub fn bootstrap_percentiles(
    obs: &DayObservations,
    cfg: &BootstrapConfig,
    stream: u64,
) -> Result<PercentileTriple> {
    bootstrap_pool(&obs.values, obs.n(), cfg, stream)
}

/// Values per day over a contiguous range of day offsets. Days without
/// observations are present with an empty list.
#[derive(Debug, Clone, PartialEq)]
pub struct DayHistory {
    pub first_day: i64,
    pub last_day: i64,
    days: BTreeMap<i64, Vec<f64>>,
}

impl DayHistory {
    pub fn new(first_day: i64, last_day: i64) -> Self {
        assert!(first_day <= last_day);
        DayHistory {
            first_day,
            last_day,
            days: (first_day..=last_day).map(|d| (d, Vec::new())).collect(),
        }
    }

    /// Add a value; values outside the range are ignored.
    pub fn push(&mut self, day_offset: i64, value: f64) {
        if let Some(v) = self.days.get_mut(&day_offset) {
            v.push(value);
        }
    }

    pub fn from_pairs(
        first_day: i64,
        last_day: i64,
        pairs: impl IntoIterator<Item = (i64, f64)>,
    ) -> Self {
        let mut h = DayHistory::new(first_day, last_day);
        for (d, v) in pairs {
            h.push(d, v);
        }
        h
    }

    pub fn values(&self, day_offset: i64) -> &[f64] {
        self.days.get(&day_offset).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn day(&self, day_offset: i64) -> DayObservations {
        DayObservations {
            day_offset,
            values: self.values(day_offset).to_vec(),
        }
    }

    pub fn days(&self) -> impl Iterator<Item = i64> {
        self.first_day..=self.last_day
    }
}

/// Pooled values of the days in `[k - W, k - 1]` on the same weekday as `k`,
/// in ascending day order. Days are consecutive calendar days, so the
/// weekday matches exactly when the offset difference is a multiple of 7.
///
/// Errors with `InsufficientData` when the lookback reaches before the
/// start of the history or the pool holds fewer than `min_pool` values.
pub fn null_pool(k: i64, history: &DayHistory, cfg: &BootstrapConfig) -> Result<DayObservations> {
    let window = i64::from(cfg.null_window_days);
    let need = cfg.min_pool.max(1);
    if k - window < history.first_day {
        return Err(Error::InsufficientData { got: 0, need });
    }
    let mut values = Vec::new();
    for d in (k - window)..k {
        if (k - d) % 7 == 0 {
            values.extend_from_slice(history.values(d));
        }
    }
    if values.len() < need {
        return Err(Error::InsufficientData {
            got: values.len(),
            need,
        });
    }
    Ok(DayObservations {
        day_offset: k,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SignificantDecrease,
    SignificantIncrease,
    NotSignificant,
    InsufficientData,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::SignificantDecrease => "significant_decrease",
            Verdict::SignificantIncrease => "significant_increase",
            Verdict::NotSignificant => "not_significant",
            Verdict::InsufficientData => "insufficient_data",
        }
    }

    pub fn is_significant(self) -> bool {
        matches!(
            self,
            Verdict::SignificantDecrease | Verdict::SignificantIncrease
        )
    }
}

pub fn classify(observed: &PercentileTriple, null_model: &PercentileTriple) -> Verdict {
    if observed.p97_5 < null_model.p2_5 {
        Verdict::SignificantDecrease
    } else if observed.p2_5 > null_model.p97_5 {
        Verdict::SignificantIncrease
    } else {
        Verdict::NotSignificant
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaySummary {
    pub day_offset: i64,
    pub n: usize,
    pub null_n: usize,
    pub observed: Option<PercentileTriple>,
    pub null_model: Option<PercentileTriple>,
    pub verdict: Verdict,
}

pub fn summarize_day(
    k: i64,
    history: &DayHistory,
    cfg: &BootstrapConfig,
    metric: u8,
) -> DaySummary {
    let obs = history.values(k);
    let pool = null_pool(k, history, cfg).ok();
    let null_n = pool.as_ref().map_or(0, DayObservations::n);
    let observed = bootstrap_pool(
        obs,
        obs.len(),
        cfg,
        StreamKey {
            day_offset: k,
            role: Role::Observed,
            metric,
        }
        .id(),
    )
    .ok();
    let null_model = match (&pool, observed.is_some()) {
        (Some(pool), true) => bootstrap_pool(
            &pool.values,
            obs.len(),
            cfg,
            StreamKey {
                day_offset: k,
                role: Role::Null,
                metric,
            }
            .id(),
        )
        .ok(),
        _ => None,
    };
    let verdict = match (&observed, &null_model) {
        (Some(o), Some(n)) => classify(o, n),
        _ => Verdict::InsufficientData,
    };
    DaySummary {
        day_offset: k,
        n: obs.len(),
        null_n,
        observed,
        null_model,
        verdict,
    }
}

/// Day summaries for every day of the history. Days are evaluated in
/// parallel; the output is ordered by day and independent of thread count.
pub fn summarize_days(history: &DayHistory, cfg: &BootstrapConfig, metric: u8) -> Vec<DaySummary> {
    let days: Vec<i64> = history.days().collect();
    days.par_iter()
        .map(|&k| summarize_day(k, history, cfg, metric))
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with columns `day_offset, n, obs_p2.5, obs_p50, obs_p97.5, null_p2.5,
/// null_p50, null_p97.5, verdict`; missing percentiles are empty.
pub fn write_summary_csv<W: Write>(mut out: W, days: &[DaySummary]) -> std::io::Result<()> {
    writeln!(
        out,
        "day_offset,n,obs_p2.5,obs_p50,obs_p97.5,null_p2.5,null_p50,null_p97.5,verdict"
    )?;
    for d in days {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            d.day_offset,
            d.n,
            fmt_opt(d.observed.map(|t| t.p2_5)),
            fmt_opt(d.observed.map(|t| t.p50)),
            fmt_opt(d.observed.map(|t| t.p97_5)),
            fmt_opt(d.null_model.map(|t| t.p2_5)),
            fmt_opt(d.null_model.map(|t| t.p50)),
            fmt_opt(d.null_model.map(|t| t.p97_5)),
            d.verdict.as_str()
        )?;
    }
    Ok(())
}
