//! Streaming firestorm detection over per-slice lexical category means.
//!
//! Every half-hour tick appends one mean score per monitored category to a
//! 49-slice rolling window (the past 24 hours plus the current slice), runs
//! change-point detection on each window, and raises an alert when enough
//! categories show a change point in the most recent slices.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::changepoint::{detect, FeatureSeries};
use crate::corpus::{bucketize, Buckets, EventDataset};
use crate::error::{Error, Result};
use crate::lexicon::{CategoryScores, Lexicon};

/// Window length in slices: `[t-48, t]`.
pub const STREAM_WINDOW: usize = 49;

/// Categories monitored by default.
pub const DEFAULT_MONITORED: [&str; 5] = ["netspeak", "I", "posemo", "emo", "assent"];

/// Per-tweet scores for a whole dataset, row-major `n_tweets x n_columns`.
#[derive(Debug, Clone)]
pub struct ScoreTable {
    pub columns: Vec<String>,
    values: Vec<f64>,
}

impl ScoreTable {
    /// Build from row-major values; `values.len()` must be a multiple of the column count.
    pub fn from_parts(columns: Vec<String>, values: Vec<f64>) -> Self {
        assert!(
            columns.is_empty() && values.is_empty() || values.len().is_multiple_of(columns.len())
        );
        ScoreTable { columns, values }
    }

    pub fn n_rows(&self) -> usize {
        if self.columns.is_empty() {
            0
        } else {
            self.values.len() / self.columns.len()
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.columns.len();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.columns.len() + col]
    }
}

pub fn score_dataset(ds: &EventDataset, lexicon: &Lexicon) -> ScoreTable {
    let rows: Vec<CategoryScores> = ds
        .tweets
        .par_iter()
        .map(|t| lexicon.score(&t.text))
        .collect();
    let mut values = Vec::with_capacity(rows.len() * lexicon.columns().len());
    for r in &rows {
        values.extend_from_slice(r.values());
    }
    ScoreTable {
        columns: lexicon.columns().to_vec(),
        values,
    }
}

/// How a slice value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Gap {
    Observed,
    /// Empty slice, previous value repeated.
    CarriedForward,
    /// Empty slice before any data.
    LeadingZero,
}

impl Gap {
    pub fn as_str(self) -> &'static str {
        match self {
            Gap::Observed => "observed",
            Gap::CarriedForward => "carried_forward",
            Gap::LeadingZero => "leading_zero",
        }
    }
}

/// Fill empty slices: carry the last value forward, zeros before the first data.
pub fn fill_gaps(raw: &[Option<f64>]) -> (Vec<f64>, Vec<Gap>) {
    let mut last = None;
    raw.iter()
        .map(|v| match (*v, last) {
            (Some(x), _) => {
                last = Some(x);
                (x, Gap::Observed)
            }
            (None, Some(prev)) => (prev, Gap::CarriedForward),
            (None, None) => (0.0, Gap::LeadingZero),
        })
        .unzip()
}

fn bucket_mean(table: &ScoreTable, range: std::ops::Range<usize>, col: usize) -> Option<f64> {
    if range.is_empty() {
        return None;
    }
    let n = range.len() as f64;
    let mut sum = 0.0;
    for i in range {
        sum += table.get(i, col);
    }
    Some(sum / n)
}

/// Per-slice mean of one score column, before gap filling.
pub fn slice_means(table: &ScoreTable, buckets: &Buckets, col: usize) -> Vec<Option<f64>> {
    (0..buckets.n_slices())
        .map(|s| bucket_mean(table, buckets.range(s), col))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategorySeries {
    pub series: FeatureSeries,
    pub gaps: Vec<Gap>,
    /// Every bucket was empty; the series is all zeros.
    pub all_empty: bool,
}

pub fn category_series_from_table(
    table: &ScoreTable,
    buckets: &Buckets,
    col: usize,
) -> Result<CategorySeries> {
    let raw = slice_means(table, buckets, col);
    let all_empty = raw.iter().all(Option::is_none);
    let (values, gaps) = fill_gaps(&raw);
    Ok(CategorySeries {
        series: FeatureSeries::new(table.columns[col].clone(), 0, values)?,
        gaps,
        all_empty,
    })
}

/// Mean category score per slice, gap-filled.
pub fn category_series(
    ds: &EventDataset,
    buckets: &Buckets,
    lexicon: &Lexicon,
    category: &str,
) -> Result<CategorySeries> {
    let col = lexicon
        .column_index(category)
        .ok_or_else(|| Error::UnknownCategory(category.to_string()))?;
    category_series_from_table(&score_dataset(ds, lexicon), buckets, col)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamConfig {
    pub categories: Vec<String>,
    /// Categories that must report a fresh change point to raise an alert.
    pub min_categories: usize,
    /// A change point is fresh if the segment it opens starts no more than
    /// this many slices before the tick.
    pub recency: usize,
    pub window: usize,
}

impl Default for StreamConfig {
    fn default() -> Self {
        StreamConfig {
            categories: DEFAULT_MONITORED.iter().map(|s| s.to_string()).collect(),
            min_categories: 4,
            recency: 2,
            window: STREAM_WINDOW,
        }
    }
}

impl StreamConfig {
    fn validate(&self) -> Result<()> {
        if self.categories.is_empty() {
            return Err(Error::InvalidConfig("no categories to monitor".into()));
        }
        if self.window < 3 {
            return Err(Error::InvalidConfig(
                "stream window must hold at least 3 slices".into(),
            ));
        }
        if self.min_categories == 0 || self.min_categories > self.categories.len() {
            return Err(Error::InvalidConfig(format!(
                "min_categories must be in 1..={}",
                self.categories.len()
            )));
        }
        Ok(())
    }
}

/// The last `capacity` slice values of one category, ending at slice `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RollingWindow {
    pub category: String,
    pub t: usize,
    capacity: usize,
    values: VecDeque<f64>,
}

impl RollingWindow {
    pub fn new(category: impl Into<String>, capacity: usize) -> Self {
        RollingWindow {
            category: category.into(),
            t: 0,
            capacity,
            values: VecDeque::with_capacity(capacity),
        }
    }

    /// A full window whose last value sits at slice `t`.
    pub fn from_values(category: impl Into<String>, t: usize, values: &[f64]) -> Self {
        RollingWindow {
            category: category.into(),
            t,
            capacity: values.len(),
            values: values.iter().copied().collect(),
        }
    }

    pub fn push(&mut self, slice: usize, v: f64) {
        if self.values.len() == self.capacity {
            self.values.pop_front();
        }
        self.values.push_back(v);
        self.t = slice;
    }

    pub fn is_full(&self) -> bool {
        self.values.len() == self.capacity
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.values.iter().copied().collect()
    }

    /// Absolute slice of the first value in the window.
    pub fn first_slice(&self) -> usize {
        self.t + 1 - self.values.len()
    }

    /// Detect change points in the window and classify freshness.
    pub fn evaluate(&self, recency: usize) -> Result<CategoryTick> {
        let values = self.values();
        let d = detect(&values)?;
        let base = self.first_slice();
        let changepoints: Vec<usize> = d.result.changepoints.iter().map(|c| c + base).collect();
        let fresh = changepoints.iter().any(|&c| is_fresh(c, self.t, recency));
        Ok(CategoryTick {
            category: self.category.clone(),
            changepoints,
            fresh,
            penalty: d.elbow.penalty(),
            degenerate: d.elbow.degenerate,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryTick {
    pub category: String,
    /// Absolute slice indices.
    pub changepoints: Vec<usize>,
    pub fresh: bool,
    pub penalty: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TickReport {
    pub t: usize,
    pub categories: Vec<CategoryTick>,
    pub alert: bool,
    pub alerting: Vec<String>,
    /// The slice closed at this tick had no tweets.
    pub gap: bool,
}

/// The segment after change point `cp` starts at `cp + 1`; it is fresh at
/// tick `t` when that start lies in `[t - recency, t]`.
pub fn is_fresh(cp: usize, t: usize, recency: usize) -> bool {
    cp + 1 + recency >= t
}

/// Evaluate one tick over a set of rolling windows.
pub fn tick(windows: &[RollingWindow], cfg: &StreamConfig) -> Result<TickReport> {
    let t = windows.first().map(|w| w.t).unwrap_or(0);
    let categories = windows
        .iter()
        .map(|w| w.evaluate(cfg.recency))
        .collect::<Result<Vec<_>>>()?;
    let alerting: Vec<String> = categories
        .iter()
        .filter(|c| c.fresh)
        .map(|c| c.category.clone())
        .collect();
    Ok(TickReport {
        t,
        alert: alerting.len() >= cfg.min_categories,
        alerting,
        categories,
        gap: false,
    })
}

/// Stateful stream consumer. State is bounded by the rolling windows plus
/// one accumulator per category for the open slice.
#[derive(Debug, Clone)]
pub struct StreamDetector<'a> {
    lexicon: &'a Lexicon,
    cfg: StreamConfig,
    columns: Vec<usize>,
    windows: Vec<RollingWindow>,
    last: Vec<Option<f64>>,
    sums: Vec<f64>,
    count: usize,
    next_slice: usize,
}

impl<'a> StreamDetector<'a> {
    pub fn new(lexicon: &'a Lexicon, cfg: StreamConfig) -> Result<Self> {
        cfg.validate()?;
        let columns = lexicon.resolve_columns(&cfg.categories)?;
        let windows = cfg
            .categories
            .iter()
            .map(|c| RollingWindow::new(c.clone(), cfg.window))
            .collect();
        let k = columns.len();
        Ok(StreamDetector {
            lexicon,
            cfg,
            columns,
            windows,
            last: vec![None; k],
            sums: vec![0.0; k],
            count: 0,
            next_slice: 0,
        })
    }

    pub fn config(&self) -> &StreamConfig {
        &self.cfg
    }

    /// Add a tweet to the open slice.
    pub fn observe(&mut self, text: &str) {
        let scores = self.lexicon.score(text);
        self.observe_row(scores.values());
    }

    /// Add a pre-scored tweet (a full lexicon score row) to the open slice.
    pub fn observe_row(&mut self, row: &[f64]) {
        for (sum, &col) in self.sums.iter_mut().zip(&self.columns) {
            *sum += row[col];
        }
        self.count += 1;
    }

    /// Close the open slice. Returns a report once the windows are full.
    pub fn close_slice(&mut self) -> Result<Option<TickReport>> {
        let slice = self.next_slice;
        let gap = self.count == 0;
        for i in 0..self.columns.len() {
            let v = if gap {
                self.last[i].unwrap_or(0.0)
            } else {
                let m = self.sums[i] / self.count as f64;
                self.last[i] = Some(m);
                m
            };
            self.windows[i].push(slice, v);
            self.sums[i] = 0.0;
        }
        self.count = 0;
        self.next_slice += 1;
        if !self.windows[0].is_full() {
            return Ok(None);
        }
        let mut report = tick(&self.windows, &self.cfg)?;
        report.gap = gap;
        Ok(Some(report))
    }

    /// Number of numeric values held between ticks.
    pub fn retained_values(&self) -> usize {
        self.windows.iter().map(RollingWindow::len).sum::<usize>()
            + self.last.len()
            + self.sums.len()
            + 2
    }

    pub fn windows(&self) -> &[RollingWindow] {
        &self.windows
    }
}

/// Output of a simulated stream over one dataset.
#[derive(Debug, Clone, Serialize)]
pub struct StreamRun {
    pub config: StreamConfig,
    pub reports: Vec<TickReport>,
    /// `retained_values()` after each tick.
    pub retained: Vec<usize>,
}

/// Replay a dataset slice by slice through a [`StreamDetector`].
pub fn run_stream(ds: &EventDataset, lexicon: &Lexicon, cfg: &StreamConfig) -> Result<StreamRun> {
    let buckets = bucketize(ds);
    let table = score_dataset(ds, lexicon);
    run_stream_scored(&table, &buckets, lexicon, cfg)
}

pub fn run_stream_scored(
    table: &ScoreTable,
    buckets: &Buckets,
    lexicon: &Lexicon,
    cfg: &StreamConfig,
) -> Result<StreamRun> {
    if buckets.n_slices() < cfg.window {
        return Err(Error::SeriesTooShort {
            needed: cfg.window,
            got: buckets.n_slices(),
        });
    }
    let mut det = StreamDetector::new(lexicon, cfg.clone())?;
    let mut reports = Vec::with_capacity(buckets.n_slices() + 1 - cfg.window);
    let mut retained = Vec::with_capacity(reports.capacity());
    for s in 0..buckets.n_slices() {
        for i in buckets.range(s) {
            det.observe_row(table.row(i));
        }
        if let Some(r) = det.close_slice()? {
            reports.push(r);
            retained.push(det.retained_values());
        }
    }
    Ok(StreamRun {
        config: cfg.clone(),
        reports,
        retained,
    })
}

/// The change point nearest to a reference slice and when it was first seen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Notice {
    pub changepoint: usize,
    /// `changepoint - reference`, in slices.
    pub offset: i64,
    pub notice_tick: usize,
    /// `notice_tick - reference`, in slices.
    pub latency: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategorySummary {
    pub category: String,
    /// Every change point reported over the run with the first tick reporting it.
    pub changepoints: Vec<(usize, usize)>,
    pub nearest: Option<Notice>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionSummary {
    pub reference: usize,
    pub horizon: usize,
    pub per_category: Vec<CategorySummary>,
    /// Nearest change point over all monitored categories.
    pub aggregate: Option<Notice>,
    pub first_alert: Option<usize>,
}

fn better(candidate: Notice, current: Option<Notice>) -> bool {
    match current {
        None => true,
        Some(c) => {
            (
                candidate.offset.unsigned_abs(),
                candidate.notice_tick,
                candidate.changepoint,
            ) < (c.offset.unsigned_abs(), c.notice_tick, c.changepoint)
        }
    }
}

impl StreamRun {
    pub fn alert_count(&self) -> usize {
        self.reports.iter().filter(|r| r.alert).count()
    }

    pub fn alert_rate(&self) -> f64 {
        if self.reports.is_empty() {
            0.0
        } else {
            self.alert_count() as f64 / self.reports.len() as f64
        }
    }

    /// Locate the change point closest to `reference` among those reported
    /// fresh at ticks `reference ..= reference + horizon`. A change point only
    /// counts as noticed while it is fresh; one that first shows up deep
    /// inside a window is a late revision, not an online detection.
    pub fn summarize(&self, reference: usize, horizon: usize) -> DetectionSummary {
        let k = self.config.categories.len();
        let mut first_seen: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); k];
        let mut nearest: Vec<Option<Notice>> = vec![None; k];
        let mut first_alert = None;
        for r in &self.reports {
            let in_horizon = r.t >= reference && r.t <= reference + horizon;
            if in_horizon && r.alert && first_alert.is_none() {
                first_alert = Some(r.t);
            }
            for (i, c) in r.categories.iter().enumerate() {
                for &cp in &c.changepoints {
                    first_seen[i].entry(cp).or_insert(r.t);
                    if in_horizon && is_fresh(cp, r.t, self.config.recency) {
                        let n = Notice {
                            changepoint: cp,
                            offset: cp as i64 - reference as i64,
                            notice_tick: r.t,
                            latency: r.t as i64 - reference as i64,
                        };
                        if better(n, nearest[i]) {
                            nearest[i] = Some(n);
                        }
                    }
                }
            }
        }
        let mut aggregate = None;
        for n in nearest.iter().flatten() {
            if better(*n, aggregate) {
                aggregate = Some(*n);
            }
        }
        let per_category = self
            .config
            .categories
            .iter()
            .zip(first_seen)
            .zip(nearest)
            .map(|((name, seen), nearest)| CategorySummary {
                category: name.clone(),
                changepoints: seen.into_iter().collect(),
                nearest,
            })
            .collect();
        DetectionSummary {
            reference,
            horizon,
            per_category,
            aggregate,
            first_alert,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_policy() {
        let (v, g) = fill_gaps(&[None, Some(10.0), None, Some(20.0)]);
        assert_eq!(v, [0.0, 10.0, 10.0, 20.0]);
        assert_eq!(
            g,
            [
                Gap::LeadingZero,
                Gap::Observed,
                Gap::CarriedForward,
                Gap::Observed
            ]
        );
        let (v, _) = fill_gaps(&[None, None]);
        assert_eq!(v, [0.0, 0.0]);
    }

    fn cfg(cats: &[&str], min: usize) -> StreamConfig {
        StreamConfig {
            categories: cats.iter().map(|s| s.to_string()).collect(),
            min_categories: min,
            ..StreamConfig::default()
        }
    }

    #[test]
    fn flat_window_no_alert() {
        let w = RollingWindow::from_values("I", 100, &[5.0; 49]);
        let r = tick(&[w], &cfg(&["I"], 1)).unwrap();
        assert!(!r.alert);
        assert!(r.categories[0].changepoints.is_empty());
    }

    #[test]
    fn late_step_is_fresh() {
        // baseline with small deterministic wiggle, last 3 values jump by 5 sd
        let mut v: Vec<f64> = (0..49)
            .map(|i| 10.0 + ((i * 7) % 5) as f64 * 0.25 - 0.5)
            .collect();
        let sd = {
            let m = v[..46].iter().sum::<f64>() / 46.0;
            (v[..46].iter().map(|x| (x - m).powi(2)).sum::<f64>() / 46.0).sqrt()
        };
        for x in &mut v[46..] {
            *x += 5.0 * sd;
        }
        let w = RollingWindow::from_values("I", 148, &v);
        let r = tick(&[w], &cfg(&["I"], 1)).unwrap();
        let cps = &r.categories[0].changepoints;
        assert!(cps.iter().any(|&c| c >= 145), "{cps:?}");
        assert!(r.alert);
    }

    #[test]
    fn old_change_is_not_fresh() {
        let v: Vec<f64> = (0..49).map(|i| if i < 8 { 0.0 } else { 3.0 }).collect();
        let w = RollingWindow::from_values("I", 200, &v);
        let c = w.evaluate(2).unwrap();
        assert_eq!(c.changepoints, vec![200 - 48 + 7]);
        assert!(!c.fresh);
    }

    #[test]
    fn rolling_window_drops_oldest() {
        let mut w = RollingWindow::new("x", 3);
        for s in 0..5 {
            w.push(s, s as f64);
        }
        assert_eq!(w.values(), [2.0, 3.0, 4.0]);
        assert_eq!(w.first_slice(), 2);
    }

    #[test]
    fn config_validation() {
        let lex = Lexicon::demo();
        assert!(StreamDetector::new(&lex, cfg(&["I"], 2)).is_err());
        assert!(StreamDetector::new(&lex, cfg(&["nope"], 1)).is_err());
        assert!(StreamDetector::new(&lex, cfg(&[], 1)).is_err());
    }

    #[test]
    fn nearest_prefers_distance_then_tick() {
        let mk = |t: usize, cps: Vec<usize>| TickReport {
            t,
            categories: vec![CategoryTick {
                category: "I".into(),
                changepoints: cps,
                fresh: false,
                penalty: 3.0,
                degenerate: false,
            }],
            alert: false,
            alerting: vec![],
            gap: false,
        };
        let run = StreamRun {
            config: cfg(&["I"], 1),
            reports: vec![
                mk(98, vec![97]),
                mk(100, vec![90, 97]),
                mk(101, vec![99]),
                mk(102, vec![99]),
                mk(140, vec![100]),
            ],
            retained: vec![],
        };
        let s = run.summarize(100, 48);
        let n = s.aggregate.unwrap();
        // cp 100 only appears once stale, so it never counts as a notice
        assert_eq!(
            (n.changepoint, n.offset, n.notice_tick, n.latency),
            (99, -1, 101, 1)
        );
        assert_eq!(s.per_category[0].changepoints[0], (90, 100));
    }
}
