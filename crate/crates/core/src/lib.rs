//! Detecting the outbreak of online firestorms from time-stamped short texts.
//!
//! The pipeline buckets an event's tweets into half-hour slices, scores each
//! tweet against a word-category lexicon, builds windowed mention networks,
//! and finds change points in the resulting series with exact PELT. A
//! streaming detector re-runs the segmentation over a rolling window and
//! raises an alert when several categories report a fresh change point.

pub mod changepoint;
pub mod corpus;
pub mod detector;
pub mod error;
pub mod evaluation;
pub mod lexicon;
pub mod network;
pub mod stats;
pub mod synth;
pub mod tables;

pub use changepoint::{
    detect, elbow_penalty, opt_partition, pelt, select_elbow, standardize, ChangePointResult,
    Detection, ElbowSelection, FeatureSeries, PENALTY_SWEEP,
};
pub use corpus::{bucketize, ingest, Buckets, EventDataset, IngestOptions, Target, Tweet};
pub use detector::{run_stream, StreamConfig, StreamDetector, StreamRun, TickReport};
pub use error::{Error, Result};
pub use evaluation::{evaluate_event, EvalConfig, EventEvaluation, OffsetStats};
pub use lexicon::{parse_lexicon, tokenize, CategoryScores, Lexicon};
pub use network::{
    build_network, compute_metrics, MentionNetwork, Metric, NetworkKind, NetworkMetrics,
};
pub use stats::{welch_t_test, WelchTest};
pub use synth::{generate, generate_suite, GroundTruth, SynthConfig};
