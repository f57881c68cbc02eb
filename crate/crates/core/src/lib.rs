//! Event-study analytics for geo-located short posts: valence scoring,
//! bootstrap significance against weekday-matched baselines, exponential
//! decline and recovery fits, and per-period lexicon shift.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod lexshift;
pub mod resilience;
pub mod sentiment;
pub mod stats;
pub mod synth;

pub use corpus::{BoundingBox, Corpus, EventWindow, LabeledPost, PeriodLabel, Post};
pub use error::{Error, FitError, Result};
pub use lexshift::{Cluster, ClusterResult, RankBasis, TauMatrix, TermProfile};
pub use resilience::{BinnedSeries, ExpParams, ModelComparison, ModelFamily, ResilienceFit};
pub use sentiment::{
    CategoryDictionary, PostScorer, ScoredPost, ValenceLexicon, ValenceScore, ValenceScorer,
};
pub use stats::{BootstrapConfig, DaySummary, PercentileTriple, Verdict};
pub use synth::{GroundTruth, SynthConfig};
