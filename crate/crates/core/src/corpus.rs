//! Ingestion, validation, geofencing and event alignment of raw post streams.
//!
//! Input is newline-delimited JSON, one post per line, optionally gzip
//! compressed. Every input line yields either a [`Post`] or a [`Rejection`];
//! a malformed line never aborts the stream.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use chrono::{DateTime, Duration, NaiveDate, NaiveDateTime, SubsecRound, Utc};
use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub text: String,
    pub lat: f64,
    pub lon: f64,
    pub lang: String,
    pub is_retweet: bool,
}

/// Closed latitude/longitude rectangle. Antimeridian-crossing boxes are not
/// representable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_lat: f64,
    pub max_lat: f64,
    pub min_lon: f64,
    pub max_lon: f64,
}

impl BoundingBox {
    pub fn new(min_lat: f64, max_lat: f64, min_lon: f64, max_lon: f64) -> Result<Self> {
        let bbox = BoundingBox {
            min_lat,
            max_lat,
            min_lon,
            max_lon,
        };
        bbox.validate()?;
        Ok(bbox)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.min_lat, self.max_lat, self.min_lon, self.max_lon]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("bounding box has non-finite bounds".into()));
        }
        if !(self.min_lat < self.max_lat) || !(self.min_lon < self.max_lon) {
            return Err(Error::Config(format!(
                "bounding box requires min < max on both axes, got lat [{}, {}] lon [{}, {}]",
                self.min_lat, self.max_lat, self.min_lon, self.max_lon
            )));
        }
        if self.min_lat < -90.0
            || self.max_lat > 90.0
            || self.min_lon < -180.0
            || self.max_lon > 180.0
        {
            return Err(Error::Config(
                "bounding box exceeds coordinate range".into(),
            ));
        }
        Ok(())
    }

    /// Edges are inclusive.
    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        lat >= self.min_lat && lat <= self.max_lat && lon >= self.min_lon && lon <= self.max_lon
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodLabel {
    Before,
    During,
    After,
}

impl PeriodLabel {
    pub const ALL: [PeriodLabel; 3] =
        [PeriodLabel::Before, PeriodLabel::During, PeriodLabel::After];

    pub fn index(self) -> usize {
        match self {
            PeriodLabel::Before => 0,
            PeriodLabel::During => 1,
            PeriodLabel::After => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PeriodLabel::Before => "before",
            PeriodLabel::During => "during",
            PeriodLabel::After => "after",
        }
    }
}

impl std::fmt::Display for PeriodLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Region and timeline of one event.
///
/// Periods: before = `[formation, landfall - h)`, during =
/// `[landfall - h, landfall + h]`, after = `(landfall + h, dissipation]`
/// with `h = during_halfwidth_days`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventWindow {
    pub region_name: String,
    pub bbox: BoundingBox,
    pub formation: DateTime<Utc>,
    pub landfall: DateTime<Utc>,
    pub dissipation: DateTime<Utc>,
    #[serde(default = "default_halfwidth")]
    pub during_halfwidth_days: u32,
}

fn default_halfwidth() -> u32 {
    5
}

impl EventWindow {
    pub fn new(
        region_name: impl Into<String>,
        bbox: BoundingBox,
        formation: DateTime<Utc>,
        landfall: DateTime<Utc>,
        dissipation: DateTime<Utc>,
    ) -> Result<Self> {
        let window = EventWindow {
            region_name: region_name.into(),
            bbox,
            formation,
            landfall,
            dissipation,
            during_halfwidth_days: default_halfwidth(),
        };
        window.validate()?;
        Ok(window)
    }

    pub fn with_halfwidth(mut self, days: u32) -> Self {
        self.during_halfwidth_days = days;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.bbox.validate()?;
        if !(self.formation < self.landfall && self.landfall < self.dissipation) {
            return Err(Error::Config(
                "event window requires formation < landfall < dissipation".into(),
            ));
        }
        Ok(())
    }

    pub fn during_start(&self) -> DateTime<Utc> {
        self.landfall - Duration::days(i64::from(self.during_halfwidth_days))
    }

    pub fn during_end(&self) -> DateTime<Utc> {
        self.landfall + Duration::days(i64::from(self.during_halfwidth_days))
    }

    pub fn contains_time(&self, ts: DateTime<Utc>) -> bool {
        ts >= self.formation && ts <= self.dissipation
    }

    pub fn period_of(&self, ts: DateTime<Utc>) -> Result<PeriodLabel> {
        if !self.contains_time(ts) {
            return Err(Error::OutsideWindow(ts));
        }
        Ok(if ts < self.during_start() {
            PeriodLabel::Before
        } else if ts <= self.during_end() {
            PeriodLabel::During
        } else {
            PeriodLabel::After
        })
    }

    /// Signed UTC calendar-day offset of `ts` from the landfall day.
    pub fn day_offset(&self, ts: DateTime<Utc>) -> i64 {
        (ts.date_naive() - self.landfall.date_naive()).num_days()
    }

    /// Time of `ts` relative to landfall, in fractional days.
    pub fn days_since_landfall(&self, ts: DateTime<Utc>) -> f64 {
        (ts - self.landfall).num_seconds() as f64 / 86_400.0
    }

    /// Inclusive range of day offsets covered by `[formation, dissipation]`.
    pub fn day_range(&self) -> (i64, i64) {
        (
            self.day_offset(self.formation),
            self.day_offset(self.dissipation),
        )
    }

    /// The UTC calendar day with the given offset from landfall.
    pub fn date_of_offset(&self, offset: i64) -> NaiveDate {
        self.landfall.date_naive() + Duration::days(offset)
    }
}

/// `"en"` or any `"en-*"` tag, case-insensitively.
pub fn is_english(lang: &str) -> bool {
    let lang = lang.to_ascii_lowercase();
    lang == "en" || lang.starts_with("en-")
}

pub fn retain(post: &Post, window: &EventWindow) -> bool {
    !post.is_retweet
        && is_english(&post.lang)
        && window.bbox.contains(post.lat, post.lon)
        && window.contains_time(post.created_at)
}

pub fn assign_period(post: &Post, window: &EventWindow) -> Result<PeriodLabel> {
    window.period_of(post.created_at)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    EmptyRecord,
    MalformedRecord,
    MissingField,
    BadTimestamp,
    CoordinateOutOfRange,
    EmptyId,
}

impl RejectReason {
    pub fn code(self) -> &'static str {
        match self {
            RejectReason::EmptyRecord => "empty_record",
            RejectReason::MalformedRecord => "malformed_record",
            RejectReason::MissingField => "missing_field",
            RejectReason::BadTimestamp => "bad_timestamp",
            RejectReason::CoordinateOutOfRange => "coordinate_out_of_range",
            RejectReason::EmptyId => "empty_id",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub reason: RejectReason,
    pub detail: String,
}

impl Rejection {
    fn new(reason: RejectReason, detail: impl Into<String>) -> Self {
        Rejection {
            reason,
            detail: detail.into(),
        }
    }
}

#[derive(Deserialize)]
struct RawPost {
    id: Option<serde_json::Value>,
    created_at: Option<String>,
    text: Option<String>,
    lat: Option<f64>,
    lon: Option<f64>,
    lang: Option<String>,
    is_retweet: Option<bool>,
}

/// Parse an ISO-8601 timestamp. Offsets are normalized to UTC; a timestamp
/// without offset is taken as UTC. Sub-second precision is truncated.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc).trunc_subsecs(0));
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
    ] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(naive.and_utc().trunc_subsecs(0));
        }
    }
    if let Ok(dt) = DateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S%.f %z") {
        return Some(dt.with_timezone(&Utc).trunc_subsecs(0));
    }
    None
}

pub fn parse_post(record: &str) -> std::result::Result<Post, Rejection> {
    if record.trim().is_empty() {
        return Err(Rejection::new(RejectReason::EmptyRecord, "blank line"));
    }
    let raw: RawPost = serde_json::from_str(record)
        .map_err(|e| Rejection::new(RejectReason::MalformedRecord, e.to_string()))?;

    fn missing(field: &str) -> Rejection {
        Rejection::new(RejectReason::MissingField, field)
    }

    let id = match raw.id.ok_or_else(|| missing("id"))? {
        serde_json::Value::String(s) => s,
        serde_json::Value::Number(n) => n.to_string(),
        serde_json::Value::Null => return Err(missing("id")),
        other => {
            return Err(Rejection::new(
                RejectReason::MalformedRecord,
                format!("id must be a string, got {other}"),
            ))
        }
    };
    if id.trim().is_empty() {
        return Err(Rejection::new(RejectReason::EmptyId, "id is empty"));
    }
    let created_raw = raw.created_at.ok_or_else(|| missing("created_at"))?;
    let text = raw.text.ok_or_else(|| missing("text"))?;
    let lat = raw.lat.ok_or_else(|| missing("lat"))?;
    let lon = raw.lon.ok_or_else(|| missing("lon"))?;
    let lang = raw.lang.ok_or_else(|| missing("lang"))?;
    let is_retweet = raw.is_retweet.ok_or_else(|| missing("is_retweet"))?;

    let created_at = parse_timestamp(&created_raw)
        .ok_or_else(|| Rejection::new(RejectReason::BadTimestamp, created_raw.clone()))?;
    if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
        return Err(Rejection::new(
            RejectReason::CoordinateOutOfRange,
            format!("lat={lat} lon={lon}"),
        ));
    }

    Ok(Post {
        id,
        created_at,
        text,
        lat,
        lon,
        lang,
        is_retweet,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectedLine {
    pub line: usize,
    pub rejection: Rejection,
}

/// Outcome of reading one input stream. `posts.len() + rejected.len() == lines`.
#[derive(Debug, Default)]
pub struct IngestReport {
    pub posts: Vec<Post>,
    pub rejected: Vec<RejectedLine>,
    pub lines: usize,
}

pub fn read_posts<R: BufRead>(reader: R) -> std::io::Result<IngestReport> {
    let mut report = IngestReport::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        report.lines += 1;
        match parse_post(&line) {
            Ok(post) => report.posts.push(post),
            Err(rejection) => report.rejected.push(RejectedLine {
                line: idx + 1,
                rejection,
            }),
        }
    }
    Ok(report)
}

/// Open a possibly gzip-compressed file, detected by its magic bytes.
pub fn open_input(path: &Path) -> Result<Box<dyn BufRead>> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic).map_err(|e| Error::io(path, e))?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    if n == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

pub fn read_posts_file(path: &Path) -> Result<IngestReport> {
    let reader = open_input(path)?;
    read_posts(reader).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPost {
    pub post: Post,
    pub period: PeriodLabel,
}

/// Retained, period-labeled posts of one event window, sorted by
/// `(created_at, id)` so downstream results do not depend on input order.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub window: EventWindow,
    pub posts: Vec<LabeledPost>,
}

impl Corpus {
    pub fn build(posts: impl IntoIterator<Item = Post>, window: &EventWindow) -> Corpus {
        let mut labeled: Vec<LabeledPost> = posts
            .into_iter()
            .filter(|p| retain(p, window))
            .map(|post| {
                let period = window
                    .period_of(post.created_at)
                    .expect("retained posts lie inside the window");
                LabeledPost { post, period }
            })
            .collect();
        labeled.sort_by(|a, b| {
            a.post
                .created_at
                .cmp(&b.post.created_at)
                .then_with(|| a.post.id.cmp(&b.post.id))
        });
        Corpus {
            window: window.clone(),
            posts: labeled,
        }
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub fn period_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for p in &self.posts {
            counts[p.period.index()] += 1;
        }
        counts
    }

    pub fn daily_counts(&self) -> Vec<DailyCount> {
        daily_counts(self.posts.iter().map(|p| &p.post), &self.window)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyCount {
    pub day_offset: i64,
    pub count: u64,
}

/// One entry per UTC calendar day touched by `[formation, dissipation]`,
/// zero-filled. Posts outside the window are ignored.
pub fn daily_counts<'a>(
    posts: impl IntoIterator<Item = &'a Post>,
    window: &EventWindow,
) -> Vec<DailyCount> {
    let (first, last) = window.day_range();
    let mut counts = vec![0u64; (last - first + 1) as usize];
    for post in posts {
        if !window.contains_time(post.created_at) {
            continue;
        }
        counts[(window.day_offset(post.created_at) - first) as usize] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| DailyCount {
            day_offset: first + i as i64,
            count,
        })
        .collect()
}

#[derive(Serialize)]
struct CorpusRecord<'a> {
    id: &'a str,
    created_at: String,
    text: &'a str,
    lat: f64,
    lon: f64,
    lang: &'a str,
    is_retweet: bool,
    period: PeriodLabel,
}

pub fn format_timestamp(ts: DateTime<Utc>) -> String {
    ts.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

pub fn post_to_json(post: &Post) -> String {
    #[derive(Serialize)]
    struct Out<'a> {
        id: &'a str,
        created_at: String,
        text: &'a str,
        lat: f64,
        lon: f64,
        lang: &'a str,
        is_retweet: bool,
    }
    serde_json::to_string(&Out {
        id: &post.id,
        created_at: format_timestamp(post.created_at),
        text: &post.text,
        lat: post.lat,
        lon: post.lon,
        lang: &post.lang,
        is_retweet: post.is_retweet,
    })
    .expect("post serializes")
}

/// Write the retained corpus in the input record format plus a `period` field.
pub fn write_corpus<W: Write>(mut out: W, corpus: &Corpus) -> std::io::Result<()> {
    for lp in &corpus.posts {
        let rec = CorpusRecord {
            id: &lp.post.id,
            created_at: format_timestamp(lp.post.created_at),
            text: &lp.post.text,
            lat: lp.post.lat,
            lon: lp.post.lon,
            lang: &lp.post.lang,
            is_retweet: lp.post.is_retweet,
            period: lp.period,
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Write rejections as `line_number,reason` rows.
pub fn write_rejections<W: Write>(mut out: W, rejected: &[RejectedLine]) -> std::io::Result<()> {
    writeln!(out, "line_number,reason")?;
    for r in rejected {
        writeln!(out, "{},{}", r.line, r.rejection.reason.code())?;
    }
    Ok(())
}
