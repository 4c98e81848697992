//! Evaluation quantities: firestorm start and peaks, detection offsets,
//! lexical t-test comparisons and predictor relevance.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::changepoint::detect;
use crate::corpus::{
    bucketize, is_firestorm_tweet, Buckets, EventDataset, Target, Tweet, NETWORK_WINDOW,
    SLICES_PER_DAY,
};
use crate::detector::{
    category_series_from_table, run_stream_scored, score_dataset, DetectionSummary, Notice,
    ScoreTable, StreamConfig, STREAM_WINDOW,
};
use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, EMO};
use crate::network::{build_network, metrics_timeline, NetworkKind};
use crate::stats::welch_t_test;

/// Significance threshold for lexical comparisons.
pub const P_THRESHOLD: f64 = 0.01;
/// Hours per slice.
pub const HOURS_PER_SLICE: f64 = 0.5;
pub const DEFAULT_TOLERANCE: usize = 2;

/// Index of the first maximum.
pub fn argmax_first<T: PartialOrd + Copy>(values: &[T]) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Per-slice count of tweets carrying the event token, and the largest count
/// of any other hashtag or mention in the same slice.
pub fn entity_counts(ds: &EventDataset, buckets: &Buckets) -> (Vec<usize>, Vec<usize>) {
    let target_key = match &ds.label {
        Target::Hashtag(h) => format!("#{h}"),
        Target::Mention(m) => format!("@{m}"),
    };
    let mut target = Vec::with_capacity(buckets.n_slices());
    let mut competing = Vec::with_capacity(buckets.n_slices());
    let mut counts: HashMap<String, usize> = HashMap::new();
    for s in 0..buckets.n_slices() {
        counts.clear();
        for t in buckets.bucket(ds, s) {
            let mut seen: HashSet<String> = HashSet::new();
            let keys = t
                .hashtags
                .iter()
                .map(|h| format!("#{h}"))
                .chain(t.mentions.iter().map(|m| format!("@{m}")));
            for k in keys {
                if seen.insert(k.clone()) {
                    *counts.entry(k).or_default() += 1;
                }
            }
        }
        target.push(counts.get(&target_key).copied().unwrap_or(0));
        competing.push(
            counts
                .iter()
                .filter(|(k, _)| **k != target_key)
                .map(|(_, &c)| c)
                .max()
                .unwrap_or(0),
        );
    }
    (target, competing)
}

/// First slice where the target is the most frequent entity. Ties count:
/// the event hashtag and the handle it attacks typically travel together.
pub fn start_from_counts(target: &[usize], competing: &[usize]) -> Result<usize> {
    target
        .iter()
        .zip(competing)
        .position(|(&t, &c)| t > 0 && t >= c)
        .ok_or(Error::NoStartFound)
}

pub fn start_time(ds: &EventDataset) -> Result<usize> {
    let (target, competing) = entity_counts(ds, &bucketize(ds));
    start_from_counts(&target, &competing)
}

/// Firestorm-labelled tweets per slice.
pub fn firestorm_counts(ds: &EventDataset, buckets: &Buckets) -> Vec<usize> {
    (0..buckets.n_slices())
        .map(|s| {
            buckets
                .bucket(ds, s)
                .iter()
                .filter(|t| is_firestorm_tweet(t, &ds.label))
                .count()
        })
        .collect()
}

/// `(peak_indegree_slice, peak_volume_slice)`, earliest slice on ties.
pub fn peaks_from(max_in_degree: &[f64], firestorm_counts: &[usize]) -> Result<(usize, usize)> {
    if firestorm_counts.iter().all(|&c| c == 0) {
        return Err(Error::NoFirestormTweets);
    }
    let pin = argmax_first(max_in_degree).ok_or(Error::EmptySeries)?;
    let pvol = argmax_first(firestorm_counts).ok_or(Error::EmptySeries)?;
    Ok((pin, pvol))
}

pub fn peaks(ds: &EventDataset) -> Result<(usize, usize)> {
    let buckets = bucketize(ds);
    let indeg: Vec<f64> = metrics_timeline(ds, NetworkKind::Mention, NETWORK_WINDOW)
        .iter()
        .map(|m| m.max_in_degree as f64)
        .collect();
    peaks_from(&indeg, &firestorm_counts(ds, &buckets))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventTimeline {
    pub start_slice: Option<usize>,
    pub peak_indegree_slice: Option<usize>,
    pub peak_volume_slice: Option<usize>,
    pub firestorm_counts: Vec<usize>,
    pub max_in_degree: Vec<f64>,
}

/// Signed offset of the change point closest to `reference` (earlier one on ties).
pub fn closest_offset(changepoints: &[usize], reference: usize) -> Option<i64> {
    changepoints
        .iter()
        .map(|&c| c as i64 - reference as i64)
        .min_by_key(|o| (o.unsigned_abs(), *o))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffsetStats {
    /// Included events' offsets, in slices.
    pub offsets: Vec<i64>,
    pub mean_hours: f64,
    /// Sample standard deviation; 0 when fewer than two events.
    pub sd_hours: f64,
    pub sd_defined: bool,
    /// Events without any change point.
    pub excluded: usize,
}

impl OffsetStats {
    pub fn offsets_hours(&self) -> Vec<f64> {
        self.offsets
            .iter()
            .map(|&o| o as f64 * HOURS_PER_SLICE)
            .collect()
    }
}

pub fn offset_stats_from(offsets: &[Option<i64>]) -> OffsetStats {
    let included: Vec<i64> = offsets.iter().flatten().copied().collect();
    let excluded = offsets.len() - included.len();
    let hours: Vec<f64> = included
        .iter()
        .map(|&o| o as f64 * HOURS_PER_SLICE)
        .collect();
    let n = hours.len();
    let mean_hours = if n == 0 {
        0.0
    } else {
        hours.iter().sum::<f64>() / n as f64
    };
    let sd_defined = n >= 2;
    let sd_hours = if sd_defined {
        (hours.iter().map(|h| (h - mean_hours).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    OffsetStats {
        offsets: included,
        mean_hours,
        sd_hours,
        sd_defined,
        excluded,
    }
}

/// Offsets of the closest change point per `(changepoints, reference)` event.
pub fn offset_stats(events: &[(Vec<usize>, usize)]) -> OffsetStats {
    let offsets: Vec<Option<i64>> = events
        .iter()
        .map(|(cps, r)| closest_offset(cps, *r))
        .collect();
    offset_stats_from(&offsets)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    More,
    Less,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::More => "more",
            Direction::Less => "less",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TTestResult {
    pub mean_fire: f64,
    pub mean_nonfire: f64,
    pub t_statistic: f64,
    pub dof: f64,
    pub p_value: f64,
    pub significant: bool,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryComparison {
    pub category: String,
    pub n_fire: usize,
    pub n_nonfire: usize,
    /// `None` when a group has fewer than two tweets.
    pub result: Option<TTestResult>,
}

/// Welch test per column on pre-scored rows.
pub fn compare_rows(
    table: &ScoreTable,
    fire: &[usize],
    nonfire: &[usize],
    columns: &[usize],
) -> Vec<CategoryComparison> {
    columns
        .iter()
        .map(|&col| {
            let a: Vec<f64> = fire.iter().map(|&i| table.get(i, col)).collect();
            let b: Vec<f64> = nonfire.iter().map(|&i| table.get(i, col)).collect();
            let result = welch_t_test(&a, &b).map(|w| TTestResult {
                mean_fire: w.mean_a,
                mean_nonfire: w.mean_b,
                t_statistic: w.t,
                dof: w.dof,
                p_value: w.p,
                significant: w.p < P_THRESHOLD,
                direction: if w.mean_a > w.mean_b {
                    Direction::More
                } else {
                    Direction::Less
                },
            });
            CategoryComparison {
                category: table.columns[col].clone(),
                n_fire: a.len(),
                n_nonfire: b.len(),
                result,
            }
        })
        .collect()
}

/// Compare two tweet groups category by category.
pub fn compare_categories(
    fire: &[&Tweet],
    nonfire: &[&Tweet],
    lexicon: &Lexicon,
    categories: &[String],
) -> Result<Vec<CategoryComparison>> {
    let cols = lexicon.resolve_columns(categories)?;
    let rows: Vec<f64> = fire
        .iter()
        .chain(nonfire)
        .flat_map(|t| lexicon.score(&t.text).values().to_vec())
        .collect();
    let table = ScoreTable::from_parts(lexicon.columns().to_vec(), rows);
    let fire_idx: Vec<usize> = (0..fire.len()).collect();
    let nonfire_idx: Vec<usize> = (fire.len()..fire.len() + nonfire.len()).collect();
    Ok(compare_rows(&table, &fire_idx, &nonfire_idx, &cols))
}

/// Indices of firestorm tweets and of the comparison tweets: tweets by the
/// same authors in the week before `reference`.
pub fn firestorm_groups(
    ds: &EventDataset,
    buckets: &Buckets,
    reference: usize,
    mention_only: bool,
) -> (Vec<usize>, Vec<usize>) {
    let keep = |t: &Tweet| !mention_only || t.mentions_of_others().next().is_some();
    let fire: Vec<usize> = (0..ds.tweets.len())
        .filter(|&i| is_firestorm_tweet(&ds.tweets[i], &ds.label) && keep(&ds.tweets[i]))
        .collect();
    let authors: HashSet<&str> = ds
        .tweets
        .iter()
        .filter(|t| is_firestorm_tweet(t, &ds.label))
        .map(|t| t.author.as_str())
        .collect();
    let first = reference.saturating_sub(7 * SLICES_PER_DAY);
    let range = if reference == 0 {
        0..0
    } else {
        buckets.range(first).start..buckets.range(reference - 1).end
    };
    let nonfire: Vec<usize> = range
        .filter(|&i| {
            let t = &ds.tweets[i];
            !is_firestorm_tweet(t, &ds.label) && authors.contains(t.author.as_str()) && keep(t)
        })
        .collect();
    (fire, nonfire)
}

/// Compare mention tweets by authors inside the largest weak component of
/// the mention network over `slices` against those by authors outside it.
pub fn component_split_compare(
    ds: &EventDataset,
    lexicon: &Lexicon,
    categories: &[String],
    slices: std::ops::Range<usize>,
) -> Result<Vec<CategoryComparison>> {
    let buckets = bucketize(ds);
    if slices.is_empty() || slices.end > buckets.n_slices() {
        return Err(Error::InvalidConfig(format!(
            "invalid slice range {slices:?}"
        )));
    }
    let range = buckets.range(slices.start).start..buckets.range(slices.end - 1).end;
    let tweets = &ds.tweets[range];
    let net = build_network(tweets, NetworkKind::Mention);
    let lcc: HashSet<&str> = net
        .largest_component()
        .into_iter()
        .map(|i| net.nodes[i].as_str())
        .collect();
    if lcc.is_empty() {
        return Err(Error::DegenerateComponents(
            "mention network is empty".into(),
        ));
    }
    let (inside, outside): (Vec<&Tweet>, Vec<&Tweet>) = tweets
        .iter()
        .filter(|t| t.mentions_of_others().next().is_some())
        .partition(|t| lcc.contains(t.author.as_str()));
    if outside.is_empty() {
        return Err(Error::NoOutsideGroup);
    }
    compare_categories(&inside, &outside, lexicon, categories)
}

/// Per-event batch change points of each category, with the event start.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelevanceInput {
    pub start: usize,
    pub changepoints: BTreeMap<String, Vec<usize>>,
}

/// Count, per category, the events whose series has a change point within
/// `tolerance` slices of the event start.
pub fn predictor_relevance(
    events: &[RelevanceInput],
    categories: &[String],
    tolerance: usize,
) -> Vec<(String, usize)> {
    categories
        .iter()
        .map(|c| {
            let count = events
                .iter()
                .filter(|e| {
                    e.changepoints
                        .get(c)
                        .is_some_and(|cps| cps.iter().any(|&cp| cp.abs_diff(e.start) <= tolerance))
                })
                .count();
            (c.clone(), count)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalConfig {
    pub stream: StreamConfig,
    /// Ticks after a reference slice searched for the nearest change point.
    pub horizon: usize,
    /// Predictor-relevance tolerance in slices.
    pub tolerance: usize,
    /// Columns compared by t-tests; `None` means every lexicon column.
    pub test_categories: Option<Vec<String>>,
    /// Columns for predictor relevance; `None` means leaf categories plus `emo`.
    pub relevance_categories: Option<Vec<String>>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            stream: StreamConfig::default(),
            horizon: STREAM_WINDOW - 1,
            tolerance: DEFAULT_TOLERANCE,
            test_categories: None,
            relevance_categories: None,
        }
    }
}

impl EvalConfig {
    pub fn test_columns(&self, lexicon: &Lexicon) -> Vec<String> {
        self.test_categories
            .clone()
            .unwrap_or_else(|| lexicon.columns().to_vec())
    }

    pub fn relevance_columns(&self, lexicon: &Lexicon) -> Vec<String> {
        self.relevance_categories.clone().unwrap_or_else(|| {
            let mut v: Vec<String> = lexicon
                .leaf_categories()
                .iter()
                .map(|s| s.to_string())
                .collect();
            if lexicon.column_index(EMO).is_some() {
                v.push(EMO.to_string());
            }
            v
        })
    }
}

/// Everything computed for one event.
#[derive(Debug, Clone, Serialize)]
pub struct EventEvaluation {
    pub name: String,
    pub label: String,
    pub n_tweets: usize,
    pub n_users: usize,
    pub firestorm_fraction: f64,
    pub timeline: EventTimeline,
    pub start: Option<DetectionSummary>,
    pub peak_indegree: Option<DetectionSummary>,
    pub peak_volume: Option<DetectionSummary>,
    pub alert_rate: f64,
    pub ttests_all: Vec<CategoryComparison>,
    pub ttests_mention: Vec<CategoryComparison>,
    pub relevance: Option<RelevanceInput>,
}

impl EventEvaluation {
    pub fn start_notice(&self) -> Option<Notice> {
        self.start.as_ref().and_then(|s| s.aggregate)
    }
}

/// Run the full per-event evaluation.
pub fn evaluate_event(
    name: &str,
    ds: &EventDataset,
    lexicon: &Lexicon,
    cfg: &EvalConfig,
) -> Result<EventEvaluation> {
    evaluate_event_with_start(name, ds, lexicon, cfg, None)
}

/// As [`evaluate_event`], with an externally supplied start slice (e.g. a
/// synthetic ground truth) instead of the entity-frequency definition.
pub fn evaluate_event_with_start(
    name: &str,
    ds: &EventDataset,
    lexicon: &Lexicon,
    cfg: &EvalConfig,
    start_override: Option<usize>,
) -> Result<EventEvaluation> {
    let buckets = bucketize(ds);
    let table = score_dataset(ds, lexicon);
    let fcounts = firestorm_counts(ds, &buckets);
    let (target, competing) = entity_counts(ds, &buckets);
    let start = start_override.or_else(|| start_from_counts(&target, &competing).ok());
    let indeg: Vec<f64> = metrics_timeline(ds, NetworkKind::Mention, NETWORK_WINDOW)
        .iter()
        .map(|m| m.max_in_degree as f64)
        .collect();
    let peaks = peaks_from(&indeg, &fcounts).ok();

    let run = run_stream_scored(&table, &buckets, lexicon, &cfg.stream)?;
    let summarize = |r: Option<usize>| r.map(|r| run.summarize(r, cfg.horizon));

    let group_ref = start
        .or_else(|| fcounts.iter().position(|&c| c > 0))
        .unwrap_or(0);
    let test_cols = lexicon.resolve_columns(&cfg.test_columns(lexicon))?;
    let (f_all, n_all) = firestorm_groups(ds, &buckets, group_ref, false);
    let (f_men, n_men) = firestorm_groups(ds, &buckets, group_ref, true);

    let relevance = match start {
        Some(s) => {
            let mut changepoints = BTreeMap::new();
            for c in cfg.relevance_columns(lexicon) {
                let col = lexicon
                    .column_index(&c)
                    .ok_or_else(|| Error::UnknownCategory(c.clone()))?;
                let series = category_series_from_table(&table, &buckets, col)?;
                let d = detect(series.series.values())?;
                changepoints.insert(c, d.result.changepoints);
            }
            Some(RelevanceInput {
                start: s,
                changepoints,
            })
        }
        None => None,
    };

    Ok(EventEvaluation {
        name: name.to_string(),
        label: ds.label.to_string(),
        n_tweets: ds.tweets.len(),
        n_users: ds.n_users(),
        firestorm_fraction: ds.firestorm_fraction(),
        start: summarize(start),
        peak_indegree: summarize(peaks.map(|p| p.0)),
        peak_volume: summarize(peaks.map(|p| p.1)),
        alert_rate: run.alert_rate(),
        ttests_all: compare_rows(&table, &f_all, &n_all, &test_cols),
        ttests_mention: compare_rows(&table, &f_men, &n_men, &test_cols),
        relevance,
        timeline: EventTimeline {
            start_slice: start,
            peak_indegree_slice: peaks.map(|p| p.0),
            peak_volume_slice: peaks.map(|p| p.1),
            firestorm_counts: fcounts,
            max_in_degree: indeg,
        },
    })
}

/// Aggregate offset statistics over evaluated events.
pub fn suite_offsets(events: &[EventEvaluation]) -> [(&'static str, OffsetStats); 3] {
    let pick = |f: fn(&EventEvaluation) -> Option<&DetectionSummary>| -> OffsetStats {
        let offs: Vec<Option<i64>> = events
            .iter()
            .map(|e| f(e).and_then(|s| s.aggregate).map(|n| n.offset))
            .collect();
        offset_stats_from(&offs)
    };
    [
        ("start", pick(|e| e.start.as_ref())),
        ("peak_indegree", pick(|e| e.peak_indegree.as_ref())),
        ("peak_volume", pick(|e| e.peak_volume.as_ref())),
    ]
}

/// Predictor-relevance counts over evaluated events.
pub fn suite_relevance(
    events: &[EventEvaluation],
    categories: &[String],
    tolerance: usize,
) -> Vec<(String, usize)> {
    let inputs: Vec<RelevanceInput> = events.iter().filter_map(|e| e.relevance.clone()).collect();
    predictor_relevance(&inputs, categories, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_rule() {
        assert_eq!(start_from_counts(&[0, 1, 5], &[3, 3, 3]).unwrap(), 2);
        assert_eq!(start_from_counts(&[4, 0], &[1, 0]).unwrap(), 0);
        assert_eq!(start_from_counts(&[2, 4], &[3, 3]).unwrap(), 1);
        // a tie with a co-occurring entity counts
        assert_eq!(start_from_counts(&[3, 4], &[3, 3]).unwrap(), 0);
        assert!(matches!(
            start_from_counts(&[0, 0], &[0, 0]),
            Err(Error::NoStartFound)
        ));
    }

    #[test]
    fn peak_ties_take_earlier() {
        assert_eq!(peaks_from(&[1.0, 5.0, 5.0], &[0, 2, 2]).unwrap(), (1, 1));
        assert!(matches!(
            peaks_from(&[1.0], &[0]),
            Err(Error::NoFirestormTweets)
        ));
    }

    #[test]
    fn offsets_example() {
        let s = offset_stats(&[(vec![9], 10), (vec![10, 30], 10), (vec![2, 11], 10)]);
        assert_eq!(s.offsets, [-1, 0, 1]);
        assert_eq!(s.mean_hours, 0.0);
        assert!((s.sd_hours - 0.5).abs() < 1e-15);
        let s = offset_stats(&[(vec![10], 10), (vec![], 4)]);
        assert_eq!(
            (s.mean_hours, s.sd_hours, s.sd_defined, s.excluded),
            (0.0, 0.0, false, 1)
        );
    }

    #[test]
    fn closest_offset_prefers_earlier_on_tie() {
        assert_eq!(closest_offset(&[8, 12], 10), Some(-2));
        assert_eq!(closest_offset(&[], 10), None);
    }

    #[test]
    fn relevance_tolerance() {
        let mut cps = BTreeMap::new();
        cps.insert("a".to_string(), vec![47]);
        cps.insert("b".to_string(), vec![]);
        let ev = [RelevanceInput {
            start: 50,
            changepoints: cps,
        }];
        let cats = ["a".to_string(), "b".to_string()];
        assert_eq!(predictor_relevance(&ev, &cats, 2)[0].1, 0);
        assert_eq!(predictor_relevance(&ev, &cats, 4)[0].1, 1);
        assert_eq!(predictor_relevance(&ev, &cats, 4)[1].1, 0);
    }
}
