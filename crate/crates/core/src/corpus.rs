//! Event datasets: JSONL ingestion, firestorm labelling, half-hour buckets
//! and moving windows.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;
use std::ops::Range;
use std::str::FromStr;
use std::sync::LazyLock;

use chrono::{DateTime, TimeZone, Utc};
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Length of one slice in seconds.
pub const SLICE_SECONDS: i64 = 30 * 60;
pub const SLICES_PER_DAY: usize = 48;
pub const DEFAULT_SPAN_DAYS: u32 = 15;
/// Moving-window length for network construction (12 hours).
pub const NETWORK_WINDOW: usize = 24;

static HASHTAG_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"#(\w+)").unwrap());
static MENTION_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@(\w+)").unwrap());

/// The entity that identifies a firestorm: a hashtag or a user handle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Hashtag(String),
    Mention(String),
}

impl Target {
    pub fn name(&self) -> &str {
        match self {
            Target::Hashtag(s) | Target::Mention(s) => s,
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (ctor, body): (fn(String) -> Target, &str) = if let Some(b) = s.strip_prefix('#') {
            (Target::Hashtag, b)
        } else if let Some(b) = s.strip_prefix('@') {
            (Target::Mention, b)
        } else {
            return Err(Error::InvalidLabel(s.to_string()));
        };
        if body.is_empty() || body.contains(char::is_whitespace) {
            return Err(Error::InvalidLabel(s.to_string()));
        }
        Ok(ctor(body.to_lowercase()))
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Hashtag(s) => write!(f, "#{s}"),
            Target::Mention(s) => write!(f, "@{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetweetOf {
    pub author: String,
    pub tweet_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tweet {
    pub id: String,
    pub author: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
    pub hashtags: Vec<String>,
    pub mentions: Vec<String>,
    pub retweet_of: Option<RetweetOf>,
}

impl Tweet {
    /// Mentions excluding the author's own handle.
    pub fn mentions_of_others(&self) -> impl Iterator<Item = &str> {
        self.mentions
            .iter()
            .map(String::as_str)
            .filter(move |m| *m != self.author)
    }
}

/// Counters collected while ingesting a record stream.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub accepted: usize,
    pub malformed: usize,
    pub out_of_span: usize,
}

#[derive(Debug, Clone)]
pub struct EventDataset {
    pub label: Target,
    pub span_start: DateTime<Utc>,
    pub span_days: u32,
    /// Sorted by `(timestamp, id)`.
    pub tweets: Vec<Tweet>,
    pub stats: IngestStats,
}

impl EventDataset {
    /// Build a dataset from already-normalized tweets, dropping out-of-span ones.
    pub fn new(
        label: Target,
        span_start: DateTime<Utc>,
        span_days: u32,
        mut tweets: Vec<Tweet>,
    ) -> Result<Self> {
        if span_days == 0 {
            return Err(Error::InvalidConfig("span_days must be positive".into()));
        }
        let end = span_end(span_start, span_days);
        let before = tweets.len();
        tweets.retain(|t| t.timestamp >= span_start && t.timestamp < end);
        let out_of_span = before - tweets.len();
        if tweets.is_empty() {
            return Err(Error::EmptyDataset);
        }
        tweets.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
        Ok(EventDataset {
            label,
            span_start,
            span_days,
            stats: IngestStats {
                accepted: tweets.len(),
                malformed: 0,
                out_of_span,
            },
            tweets,
        })
    }

    pub fn n_slices(&self) -> usize {
        self.span_days as usize * SLICES_PER_DAY
    }

    pub fn slice_of(&self, ts: DateTime<Utc>) -> usize {
        ((ts - self.span_start)
            .num_seconds()
            .div_euclid(SLICE_SECONDS)) as usize
    }

    pub fn n_users(&self) -> usize {
        self.tweets
            .iter()
            .map(|t| t.author.as_str())
            .collect::<HashSet<_>>()
            .len()
    }

    pub fn n_firestorm(&self) -> usize {
        self.tweets
            .iter()
            .filter(|t| is_firestorm_tweet(t, &self.label))
            .count()
    }

    pub fn firestorm_fraction(&self) -> f64 {
        if self.tweets.is_empty() {
            0.0
        } else {
            self.n_firestorm() as f64 / self.tweets.len() as f64
        }
    }

    pub fn meta(&self) -> DatasetMeta {
        DatasetMeta {
            label: self.label.to_string(),
            span_start: self.span_start,
            span_days: self.span_days,
        }
    }
}

fn span_end(start: DateTime<Utc>, days: u32) -> DateTime<Utc> {
    start + chrono::Duration::seconds(days as i64 * SLICES_PER_DAY as i64 * SLICE_SECONDS)
}

/// Event metadata, stored as an optional `{"meta": {...}}` first line of a dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub label: String,
    pub span_start: DateTime<Utc>,
    #[serde(default = "default_span_days")]
    pub span_days: u32,
}

fn default_span_days() -> u32 {
    DEFAULT_SPAN_DAYS
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Overrides the label in the file's meta line.
    pub label: Option<Target>,
    pub span_start: Option<DateTime<Utc>>,
    pub span_days: Option<u32>,
    /// Fail on the first malformed record instead of skipping it.
    pub strict: bool,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum StringOrInt {
    Str(String),
    Int(i64),
}

impl StringOrInt {
    fn into_string(self) -> String {
        match self {
            StringOrInt::Str(s) => s,
            StringOrInt::Int(i) => i.to_string(),
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: StringOrInt,
    user: StringOrInt,
    ts: StringOrInt,
    text: String,
    hashtags: Option<Vec<String>>,
    mentions: Option<Vec<String>>,
    rt_user: Option<String>,
    rt_id: Option<StringOrInt>,
}

/// One JSONL record in the external schema.
#[derive(Debug, Clone, Serialize)]
pub struct RecordOut<'a> {
    pub id: &'a str,
    pub user: &'a str,
    pub ts: String,
    pub text: &'a str,
    pub hashtags: &'a [String],
    pub mentions: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rt_user: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rt_id: Option<&'a str>,
}

impl<'a> From<&'a Tweet> for RecordOut<'a> {
    fn from(t: &'a Tweet) -> Self {
        RecordOut {
            id: &t.id,
            user: &t.author,
            ts: t.timestamp.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
            text: &t.text,
            hashtags: &t.hashtags,
            mentions: &t.mentions,
            rt_user: t.retweet_of.as_ref().map(|r| r.author.as_str()),
            rt_id: t.retweet_of.as_ref().map(|r| r.tweet_id.as_str()),
        }
    }
}

/// Parse an ISO-8601 UTC instant or integer epoch seconds.
pub fn parse_timestamp(s: &str) -> Result<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(secs) = s.parse::<i64>() {
        return Utc
            .timestamp_opt(secs, 0)
            .single()
            .ok_or_else(|| Error::InvalidTimestamp(s.to_string()));
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.with_timezone(&Utc));
    }
    if let Ok(naive) = chrono::NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S") {
        return Ok(naive.and_utc());
    }
    if let Ok(date) = chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(date.and_hms_opt(0, 0, 0).unwrap().and_utc());
    }
    Err(Error::InvalidTimestamp(s.to_string()))
}

fn normalize_entity(s: &str, sigil: char) -> String {
    s.trim().trim_start_matches(sigil).to_lowercase()
}

fn tweet_from_record(rec: RawRecord) -> Result<Tweet, String> {
    let timestamp = match rec.ts {
        StringOrInt::Int(secs) => Utc
            .timestamp_opt(secs, 0)
            .single()
            .ok_or_else(|| format!("timestamp {secs} out of range"))?,
        StringOrInt::Str(s) => parse_timestamp(&s).map_err(|e| e.to_string())?,
    };
    let author = rec.user.into_string().trim().to_lowercase();
    if author.is_empty() {
        return Err("empty user".into());
    }
    let hashtags = match rec.hashtags {
        Some(h) => h.iter().map(|x| normalize_entity(x, '#')).collect(),
        None => HASHTAG_RE
            .captures_iter(&rec.text)
            .map(|c| c[1].to_lowercase())
            .collect(),
    };
    let mentions = match rec.mentions {
        Some(m) => m.iter().map(|x| normalize_entity(x, '@')).collect(),
        None => MENTION_RE
            .captures_iter(&rec.text)
            .map(|c| c[1].to_lowercase())
            .collect(),
    };
    let retweet_of = match (rec.rt_user, rec.rt_id) {
        (Some(u), id) => Some(RetweetOf {
            author: normalize_entity(&u, '@'),
            tweet_id: id.map(StringOrInt::into_string).unwrap_or_default(),
        }),
        (None, Some(_)) => return Err("rt_id without rt_user".into()),
        (None, None) => None,
    };
    Ok(Tweet {
        id: rec.id.into_string(),
        author,
        timestamp,
        text: rec.text,
        hashtags,
        mentions,
        retweet_of,
    })
}

/// Read a JSONL record stream into a dataset.
///
/// A first line of the form `{"meta": {...}}` supplies label and span
/// defaults; explicit options override it.
pub fn ingest<R: BufRead>(reader: R, opts: &IngestOptions) -> Result<EventDataset> {
    let mut meta: Option<DatasetMeta> = None;
    let mut tweets = Vec::new();
    let mut malformed = 0;

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = match serde_json::from_str(&line) {
            Ok(v) => v,
            Err(e) => {
                if opts.strict {
                    return Err(Error::MalformedRecord {
                        line: line_no,
                        message: e.to_string(),
                    });
                }
                malformed += 1;
                continue;
            }
        };
        if let Some(m) = value.get("meta") {
            if tweets.is_empty() && meta.is_none() {
                meta = Some(serde_json::from_value(m.clone()).map_err(|e| {
                    Error::MalformedRecord {
                        line: line_no,
                        message: format!("meta: {e}"),
                    }
                })?);
                continue;
            }
        }
        let parsed = serde_json::from_value::<RawRecord>(value)
            .map_err(|e| e.to_string())
            .and_then(tweet_from_record);
        match parsed {
            Ok(t) => tweets.push(t),
            Err(message) if opts.strict => {
                return Err(Error::MalformedRecord {
                    line: line_no,
                    message,
                })
            }
            Err(_) => malformed += 1,
        }
    }

    let label = match (&opts.label, &meta) {
        (Some(l), _) => l.clone(),
        (None, Some(m)) => m.label.parse()?,
        (None, None) => return Err(Error::InvalidConfig("event label is required".into())),
    };
    let span_start = opts
        .span_start
        .or(meta.as_ref().map(|m| m.span_start))
        .ok_or_else(|| Error::InvalidConfig("span start is required".into()))?;
    let span_days = opts
        .span_days
        .or(meta.as_ref().map(|m| m.span_days))
        .unwrap_or(DEFAULT_SPAN_DAYS);

    let mut ds = EventDataset::new(label, span_start, span_days, tweets)?;
    ds.stats.malformed = malformed;
    Ok(ds)
}

/// Serialize a dataset as JSONL with a leading meta line.
pub fn write_jsonl<W: std::io::Write>(ds: &EventDataset, mut out: W) -> Result<()> {
    let meta = serde_json::json!({ "meta": ds.meta() });
    writeln!(out, "{meta}")?;
    for t in &ds.tweets {
        let line = serde_json::to_string(&RecordOut::from(t)).map_err(std::io::Error::other)?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// True iff the tweet carries the event's hashtag (for `#` labels) or
/// mentions its handle (for `@` labels).
pub fn is_firestorm_tweet(tweet: &Tweet, label: &Target) -> bool {
    match label {
        Target::Hashtag(h) => tweet.hashtags.iter().any(|x| x.eq_ignore_ascii_case(h)),
        Target::Mention(m) => tweet.mentions.iter().any(|x| x.eq_ignore_ascii_case(m)),
    }
}

/// Half-open half-hour buckets over a dataset's (time-sorted) tweets.
///
/// Each bucket is a contiguous index range into `EventDataset::tweets`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Buckets {
    ranges: Vec<Range<usize>>,
}

pub fn bucketize(ds: &EventDataset) -> Buckets {
    let n = ds.n_slices();
    let mut ranges = Vec::with_capacity(n);
    let mut pos = 0;
    for s in 0..n {
        let start = pos;
        while pos < ds.tweets.len() && ds.slice_of(ds.tweets[pos].timestamp) == s {
            pos += 1;
        }
        ranges.push(start..pos);
    }
    debug_assert_eq!(pos, ds.tweets.len());
    Buckets { ranges }
}

impl Buckets {
    pub fn n_slices(&self) -> usize {
        self.ranges.len()
    }

    pub fn range(&self, slice: usize) -> Range<usize> {
        self.ranges[slice].clone()
    }

    pub fn len_of(&self, slice: usize) -> usize {
        self.ranges[slice].len()
    }

    pub fn bucket<'a>(&self, ds: &'a EventDataset, slice: usize) -> &'a [Tweet] {
        &ds.tweets[self.range(slice)]
    }

    /// Index range covering slices `max(0, t-size+1) ..= t`.
    pub fn window_range(&self, t: usize, size: usize) -> Range<usize> {
        let t = t.min(self.ranges.len() - 1);
        let first = (t + 1).saturating_sub(size.max(1));
        self.ranges[first].start..self.ranges[t].end
    }

    pub fn window<'a>(&self, ds: &'a EventDataset, t: usize, size: usize) -> &'a [Tweet] {
        &ds.tweets[self.window_range(t, size)]
    }
}
