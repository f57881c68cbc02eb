//! Per-period TF-IDF profiles of lexicon terms, their 2-means clustering into
//! rising and falling shapes, and rank correlations between periods.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::PeriodLabel;
use crate::error::{Error, Result};
use crate::sentiment::tokenize::{split_words, strip_punct_if_word};
use crate::sentiment::ValenceLexicon;
use crate::stats::stream_rng;

pub const KMEANS_RESTARTS: usize = 20;
const KMEANS_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TermCounts {
    pub counts: BTreeMap<String, [u64; 3]>,
    /// Lexicon tokens per period.
    pub totals: [u64; 3],
}

impl TermCounts {
    pub fn add(&mut self, period: PeriodLabel, text: &str, lexicon: &ValenceLexicon) {
        let p = period.index();
        for raw in split_words(text) {
            let term = strip_punct_if_word(raw).to_lowercase();
            if lexicon.contains(&term) {
                self.counts.entry(term).or_default()[p] += 1;
                self.totals[p] += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &TermCounts) {
        for (term, c) in &other.counts {
            let e = self.counts.entry(term.clone()).or_default();
            for p in 0..3 {
                e[p] += c[p];
            }
        }
        for p in 0..3 {
            self.totals[p] += other.totals[p];
        }
    }
}

/// Count lexicon-member tokens per period.
pub fn term_period_counts<'a>(
    posts: impl IntoIterator<Item = (PeriodLabel, &'a str)>,
    lexicon: &ValenceLexicon,
) -> TermCounts {
    let mut counts = TermCounts::default();
    for (period, text) in posts {
        counts.add(period, text, lexicon);
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cluster {
    Concave,
    Convex,
    /// Zero variance across periods; excluded from clustering.
    Dropped,
}

impl Cluster {
    pub fn as_str(self) -> &'static str {
        match self {
            Cluster::Concave => "concave",
            Cluster::Convex => "convex",
            Cluster::Dropped => "dropped",
        }
    }
}

impl fmt::Display for Cluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermProfile {
    pub term: String,
    pub counts: [u64; 3],
    pub raw_tf: [f64; 3],
    pub tfidf: [f64; 3],
    /// Population z-scores of `tfidf`; all zero for dropped terms.
    pub z: [f64; 3],
    /// `None` until clustered.
    pub cluster: Option<Cluster>,
}

impl TermProfile {
    pub fn is_dropped(&self) -> bool {
        self.cluster == Some(Cluster::Dropped)
    }
}

/// Smoothed inverse document frequency over three period documents.
pub fn smoothed_idf(df: usize) -> f64 {
    ((1.0 + 3.0) / (1.0 + df as f64)).ln() + 1.0
}

/// Population z-score of a 3-vector, `None` when it has no spread.
pub fn zscore3(v: [f64; 3]) -> Option<[f64; 3]> {
    let mean = (v[0] + v[1] + v[2]) / 3.0;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 3.0;
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let std = var.sqrt();
    if !(std > 1e-12 * scale) {
        return None;
    }
    Some(v.map(|x| (x - mean) / std))
}

pub fn tfidf_z(counts: &TermCounts) -> Result<Vec<TermProfile>> {
    tfidf_z_with(counts, smoothed_idf)
}

/// As [`tfidf_z`] with a caller-supplied idf as a function of document
/// frequency.
pub fn tfidf_z_with(counts: &TermCounts, idf: impl Fn(usize) -> f64) -> Result<Vec<TermProfile>> {
    if let Some(p) = counts.totals.iter().position(|&t| t == 0) {
        return Err(Error::Degenerate(format!(
            "no lexicon tokens in the {} period",
            PeriodLabel::ALL[p]
        )));
    }
    let totals = counts.totals.map(|t| t as f64);
    Ok(counts
        .counts
        .iter()
        .map(|(term, &c)| {
            let raw_tf = [0, 1, 2].map(|p| c[p] as f64 / totals[p]);
            let w = idf(c.iter().filter(|&&x| x > 0).count());
            let tfidf = raw_tf.map(|x| x * w);
            let (z, cluster) = match zscore3(tfidf) {
                Some(z) => (z, None),
                None => ([0.0; 3], Some(Cluster::Dropped)),
            };
            TermProfile {
                term: term.clone(),
                counts: c,
                raw_tf,
                tfidf,
                z,
                cluster,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    pub centroids: [[f64; 3]; 2],
    /// Which centroid has the larger During component.
    pub concave_id: usize,
    /// Within-cluster sum of squared distances.
    pub sse: f64,
    /// Centroid index per clustered term, in profile order.
    pub assignment: Vec<(String, usize)>,
}

impl ClusterResult {
    pub fn label(&self, id: usize) -> Cluster {
        if id == self.concave_id {
            Cluster::Concave
        } else {
            Cluster::Convex
        }
    }

    pub fn centroid(&self, cluster: Cluster) -> Option<[f64; 3]> {
        match cluster {
            Cluster::Concave => Some(self.centroids[self.concave_id]),
            Cluster::Convex => Some(self.centroids[1 - self.concave_id]),
            Cluster::Dropped => None,
        }
    }
}

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum()
}

fn lloyd(points: &[[f64; 3]], mut centroids: [[f64; 3]; 2]) -> ([[f64; 3]; 2], Vec<usize>, f64) {
    let mut labels = vec![usize::MAX; points.len()];
    for _ in 0..KMEANS_MAX_ITER {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let l = usize::from(dist2(p, &centroids[1]) < dist2(p, &centroids[0]));
            if labels[i] != l {
                labels[i] = l;
                changed = true;
            }
        }
        let mut sums = [[0.0; 3]; 2];
        let mut ns = [0usize; 2];
        for (p, &l) in points.iter().zip(&labels) {
            ns[l] += 1;
            for d in 0..3 {
                sums[l][d] += p[d];
            }
        }
        for k in 0..2 {
            if ns[k] == 0 {
                // Reseed an empty cluster at the point farthest from the other centroid.
                let other = centroids[1 - k];
                let far = points
                    .iter()
                    .enumerate()
                    .max_by(|a, b| {
                        dist2(a.1, &other)
                            .total_cmp(&dist2(b.1, &other))
                            .then(b.0.cmp(&a.0))
                    })
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                centroids[k] = points[far];
                labels[far] = k;
                changed = true;
            } else {
                centroids[k] = sums[k].map(|s| s / ns[k] as f64);
            }
        }
        if !changed {
            break;
        }
    }
    let sse = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| dist2(p, &centroids[l]))
        .sum();
    (centroids, labels, sse)
}

/// Two-means on the z vectors of all non-dropped profiles with
/// k-means++ seeding and [`KMEANS_RESTARTS`] restarts; the lowest SSE wins,
/// earlier restarts on ties. Sets each profile's `cluster`.
pub fn cluster_profiles(profiles: &mut [TermProfile], seed: u64) -> Result<ClusterResult> {
    let idx: Vec<usize> = (0..profiles.len())
        .filter(|&i| !profiles[i].is_dropped())
        .collect();
    if idx.len() < 2 {
        return Err(Error::InsufficientData {
            got: idx.len(),
            need: 2,
        });
    }
    let points: Vec<[f64; 3]> = idx.iter().map(|&i| profiles[i].z).collect();
    if points.iter().all(|p| dist2(p, &points[0]) < 1e-24) {
        return Err(Error::Degenerate("all term profiles identical".into()));
    }

    let mut best: Option<([[f64; 3]; 2], Vec<usize>, f64)> = None;
    for restart in 0..KMEANS_RESTARTS {
        let mut rng = stream_rng(seed, restart as u64);
        let first = points[rng.random_range(0..points.len())];
        let weights: Vec<f64> = points.iter().map(|p| dist2(p, &first)).collect();
        let total: f64 = weights.iter().sum();
        let mut target = rng.random::<f64>() * total;
        let mut second = points[points.len() - 1];
        for (p, w) in points.iter().zip(&weights) {
            if target < *w {
                second = *p;
                break;
            }
            target -= w;
        }
        let run = lloyd(&points, [first, second]);
        if best.as_ref().is_none_or(|b| run.2 < b.2) {
            best = Some(run);
        }
    }
    let (centroids, labels, sse) = best.expect("at least one restart");
    let concave_id = if centroids[0][1] >= centroids[1][1] {
        0
    } else {
        1
    };
    if centroids[concave_id][1] <= 0.0 || centroids[1 - concave_id][1] >= 0.0 {
        log::warn!(
            "cluster centroids do not separate by During sign: {:.3} and {:.3}",
            centroids[concave_id][1],
            centroids[1 - concave_id][1]
        );
    }
    let result = ClusterResult {
        centroids,
        concave_id,
        sse,
        assignment: idx
            .iter()
            .zip(&labels)
            .map(|(&i, &l)| (profiles[i].term.clone(), l))
            .collect(),
    };
    for (&i, &l) in idx.iter().zip(&labels) {
        profiles[i].cluster = Some(result.label(l));
    }
    Ok(result)
}

/// Tie-adjusted Kendall rank correlation (tau-b) of paired scores, computed
/// by sorting and merge-counting exchanges.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64> {
    assert_eq!(a.len(), b.len(), "rankings must cover the same terms");
    let n = a.len();
    if n < 2 {
        return Err(Error::InsufficientData { got: n, need: 2 });
    }
    let mut pairs: Vec<(f64, f64)> = a.iter().copied().zip(b.iter().copied()).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));

    let tie_pairs = |run: u64| run * (run - 1) / 2;
    let mut ties_a = 0u64;
    let mut ties_joint = 0u64;
    let (mut run_a, mut run_joint) = (1u64, 1u64);
    for i in 1..n {
        if pairs[i].0 == pairs[i - 1].0 {
            run_a += 1;
            if pairs[i].1 == pairs[i - 1].1 {
                run_joint += 1;
            } else {
                ties_joint += tie_pairs(run_joint);
                run_joint = 1;
            }
        } else {
            ties_a += tie_pairs(run_a);
            ties_joint += tie_pairs(run_joint);
            run_a = 1;
            run_joint = 1;
        }
    }
    ties_a += tie_pairs(run_a);
    ties_joint += tie_pairs(run_joint);

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);

    let mut ties_b = 0u64;
    let mut run_b = 1u64;
    for i in 1..n {
        if ys[i] == ys[i - 1] {
            run_b += 1;
        } else {
            ties_b += tie_pairs(run_b);
            run_b = 1;
        }
    }
    ties_b += tie_pairs(run_b);

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let denom = ((n0 - ties_a) as f64 * (n0 - ties_b) as f64).sqrt();
    if denom == 0.0 {
        return Err(Error::Degenerate("a ranking is constant".into()));
    }
    let numer = n0 as f64 - ties_a as f64 - ties_b as f64 + ties_joint as f64 - 2.0 * swaps as f64;
    Ok((numer / denom).clamp(-1.0, 1.0))
}

/// Merge sort returning the number of strict inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (l, r) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(l, bl) + merge_count(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Score used to rank terms within a period, for rank correlations and top
/// term lists.
///
/// Z-scores are a poor ranking key inside one cluster: every z vector lies
/// on the circle `sum = 0, |z|^2 = 3`, so all terms peaking in the same
/// period share nearly the same peak component, and the two off-peak
/// components of a cluster's members are forced into opposite order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankBasis {
    /// Per-period term frequency (equivalently TF-IDF, whose idf factor is
    /// constant per term).
    #[default]
    TermFrequency,
    TfIdf,
    /// Z-scored TF-IDF across periods.
    ZScore,
}

impl RankBasis {
    pub fn score(self, profile: &TermProfile, period: usize) -> f64 {
        match self {
            RankBasis::TermFrequency => profile.raw_tf[period],
            RankBasis::TfIdf => profile.tfidf[period],
            RankBasis::ZScore => profile.z[period],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauMatrix {
    pub before_during: f64,
    pub during_after: f64,
    pub before_after: f64,
}

impl TauMatrix {
    pub fn get(&self, x: PeriodLabel, y: PeriodLabel) -> f64 {
        use PeriodLabel::*;
        match (x, y) {
            _ if x == y => 1.0,
            (Before, During) | (During, Before) => self.before_during,
            (During, After) | (After, During) => self.during_after,
            _ => self.before_after,
        }
    }
}

/// Pairwise rank correlations between periods over the terms of one cluster.
pub fn tau_matrix(
    profiles: &[TermProfile],
    cluster: Cluster,
    basis: RankBasis,
) -> Result<TauMatrix> {
    let members: Vec<&TermProfile> = profiles
        .iter()
        .filter(|p| p.cluster == Some(cluster))
        .collect();
    let scores =
        |period: usize| -> Vec<f64> { members.iter().map(|p| basis.score(p, period)).collect() };
    let (b, d, a) = (scores(0), scores(1), scores(2));
    Ok(TauMatrix {
        before_during: kendall_tau(&b, &d)?,
        during_after: kendall_tau(&d, &a)?,
        before_after: kendall_tau(&b, &a)?,
    })
}

/// The `k` terms of `cluster` with the largest score for `period`, ties
/// broken by term.
pub fn top_terms(
    profiles: &[TermProfile],
    period: PeriodLabel,
    cluster: Cluster,
    k: usize,
    basis: RankBasis,
) -> Vec<(String, f64)> {
    let p = period.index();
    let mut members: Vec<&TermProfile> = profiles
        .iter()
        .filter(|t| t.cluster == Some(cluster))
        .collect();
    if members.is_empty() {
        log::warn!("no terms in the {cluster} cluster");
        return Vec::new();
    }
    members.sort_by(
        |x, y| match basis.score(y, p).total_cmp(&basis.score(x, p)) {
            Ordering::Equal => x.term.cmp(&y.term),
            o => o,
        },
    );
    members
        .into_iter()
        .take(k)
        .map(|t| (t.term.clone(), basis.score(t, p)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexshiftReport {
    pub profiles: Vec<TermProfile>,
    pub clusters: ClusterResult,
    pub concave_tau: Option<TauMatrix>,
    pub convex_tau: Option<TauMatrix>,
}

/// Profiles, clusters and per-cluster rank correlations in one pass.
pub fn analyze(counts: &TermCounts, seed: u64, basis: RankBasis) -> Result<LexshiftReport> {
    let mut profiles = tfidf_z(counts)?;
    let clusters = cluster_profiles(&mut profiles, seed)?;
    let tau = |c| match tau_matrix(&profiles, c, basis) {
        Ok(t) => Some(t),
        Err(e) => {
            log::warn!("rank correlation undefined for the {c} cluster: {e}");
            None
        }
    };
    let concave_tau = tau(Cluster::Concave);
    let convex_tau = tau(Cluster::Convex);
    Ok(LexshiftReport {
        profiles,
        clusters,
        concave_tau,
        convex_tau,
    })
}

pub fn write_profiles<W: Write>(mut out: W, profiles: &[TermProfile]) -> std::io::Result<()> {
    writeln!(
        out,
        "term,count_before,count_during,count_after,tf_before,tf_during,tf_after,z_before,z_during,z_after,cluster"
    )?;
    for p in profiles {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&p.term),
            p.counts[0],
            p.counts[1],
            p.counts[2],
            p.raw_tf[0],
            p.raw_tf[1],
            p.raw_tf[2],
            p.z[0],
            p.z[1],
            p.z[2],
            p.cluster.map(Cluster::as_str).unwrap_or("unassigned")
        )?;
    }
    Ok(())
}

pub fn write_tau<W: Write>(
    mut out: W,
    rows: &[(Cluster, Option<TauMatrix>)],
) -> std::io::Result<()> {
    writeln!(out, "cluster,before_during,during_after,before_after")?;
    for (c, t) in rows {
        match t {
            Some(t) => writeln!(
                out,
                "{c},{:.6},{:.6},{:.6}",
                t.before_during, t.during_after, t.before_after
            )?,
            None => writeln!(out, "{c},NA,NA,NA")?,
        }
    }
    Ok(())
}

pub fn write_top_terms<W: Write>(
    mut out: W,
    profiles: &[TermProfile],
    k: usize,
    basis: RankBasis,
) -> std::io::Result<()> {
    writeln!(out, "period,cluster,rank,term,score,z")?;
    for period in PeriodLabel::ALL {
        for cluster in [Cluster::Concave, Cluster::Convex] {
            for (rank, (term, score)) in top_terms(profiles, period, cluster, k, basis)
                .into_iter()
                .enumerate()
            {
                let z = profiles
                    .iter()
                    .find(|t| t.term == term)
                    .map_or(0.0, |t| t.z[period.index()]);
                writeln!(
                    out,
                    "{period},{cluster},{},{},{score:.9},{z:.6}",
                    rank + 1,
                    csv_field(&term)
                )?;
            }
        }
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(rows: &[(&str, [u64; 3])]) -> TermCounts {
        let mut c = TermCounts::default();
        for (t, v) in rows {
            c.counts.insert(t.to_string(), *v);
            for (total, x) in c.totals.iter_mut().zip(v) {
                *total += x;
            }
        }
        c
    }

    #[test]
    fn counting_ignores_non_lexicon_tokens() {
        let lex = ValenceLexicon::from_entries([("happy", 2.7), ("warning", -1.4)]).unwrap();
        let c = term_period_counts(
            [
                (PeriodLabel::Before, "happy day"),
                (PeriodLabel::During, "Warning! happy, storm warning"),
                (PeriodLabel::After, "happy"),
            ],
            &lex,
        );
        assert_eq!(c.counts["happy"], [1, 1, 1]);
        assert_eq!(c.counts["warning"], [0, 2, 0]);
        assert_eq!(c.totals, [1, 3, 1]);
    }

    #[test]
    fn during_only_term() {
        let p = tfidf_z(&counts(&[("warning", [0, 4, 0]), ("x", [4, 0, 4])])).unwrap();
        let w = &p[0];
        let r2 = std::f64::consts::SQRT_2;
        assert!((w.z[0] + 1.0 / r2).abs() < 1e-12);
        assert!((w.z[1] - r2).abs() < 1e-12);
        assert!((w.z[2] + 1.0 / r2).abs() < 1e-12);
    }

    #[test]
    fn flat_term_dropped() {
        let p = tfidf_z(&counts(&[
            ("calm", [3, 3, 3]),
            ("x", [1, 2, 3]),
            ("y", [3, 2, 1]),
        ]))
        .unwrap();
        assert!(p[0].is_dropped());
        assert!(!p[1].is_dropped());
    }

    #[test]
    fn empty_period_is_error() {
        assert!(tfidf_z(&counts(&[("a", [1, 0, 1])])).is_err());
    }

    #[test]
    fn separated_shapes_cluster_exactly() {
        let mut rows = Vec::new();
        for i in 0..5 {
            rows.push((format!("up{i}"), [1 + i, 5 + i, 1 + i]));
            rows.push((format!("down{i}"), [5 + i, 1 + i, 5 + i]));
        }
        let rows: Vec<(&str, [u64; 3])> = rows.iter().map(|(t, v)| (t.as_str(), *v)).collect();
        let mut p = tfidf_z(&counts(&rows)).unwrap();
        let r = cluster_profiles(&mut p, 7).unwrap();
        for t in &p {
            let want = if t.term.starts_with("up") {
                Cluster::Concave
            } else {
                Cluster::Convex
            };
            assert_eq!(t.cluster, Some(want), "{}", t.term);
        }
        assert!(r.centroid(Cluster::Concave).unwrap()[1] > 0.0);
        assert!(r.centroid(Cluster::Convex).unwrap()[1] < 0.0);
    }

    #[test]
    fn tau_extremes() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(kendall_tau(&a, &a).unwrap(), 1.0);
        assert_eq!(kendall_tau(&a, &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!(kendall_tau(&[1.0], &[1.0]).is_err());
        assert!(kendall_tau(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn tau_with_ties_matches_known_value() {
        // Worked example: x = [1,2,2,3], y = [1,3,2,2]
        // concordant 3, discordant 1, one tie in each ranking: 2 / sqrt(5 * 5)
        let t = kendall_tau(&[1.0, 2.0, 2.0, 3.0], &[1.0, 3.0, 2.0, 2.0]).unwrap();
        assert!((t - 0.4).abs() < 1e-15, "{t}");
    }

    #[test]
    fn top_terms_ordering() {
        let mk = |term: &str, z1: f64| TermProfile {
            term: term.into(),
            counts: [0; 3],
            raw_tf: [0.0; 3],
            tfidf: [0.0; 3],
            z: [0.0, z1, 0.0],
            cluster: Some(Cluster::Concave),
        };
        let p = vec![mk("b", 1.0), mk("a", 1.0), mk("c", 1.2)];
        let top = top_terms(
            &p,
            PeriodLabel::During,
            Cluster::Concave,
            10,
            RankBasis::ZScore,
        );
        let names: Vec<&str> = top.iter().map(|t| t.0.as_str()).collect();
        assert_eq!(names, ["c", "a", "b"]);
        assert!(top_terms(
            &p,
            PeriodLabel::During,
            Cluster::Convex,
            5,
            RankBasis::ZScore
        )
        .is_empty());
    }
}
