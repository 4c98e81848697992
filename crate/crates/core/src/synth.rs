//! Seeded synthetic events: diurnal background traffic with an injected
//! firestorm burst, together with the ground truth used to score detectors.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{EventDataset, RetweetOf, Target, Tweet, SLICES_PER_DAY, SLICE_SECONDS};
use crate::detector::STREAM_WINDOW;
use crate::error::{Error, Result};
use crate::evaluation::Direction;
use crate::lexicon::EMO;

/// Words emitted for each leaf category; every word belongs to exactly one
/// category of the bundled demo lexicon.
pub const CATEGORY_WORDS: [(&str, &[&str]); 12] = [
    (
        "I",
        &["i", "me", "my", "myself", "mine", "im", "i'm", "i've"],
    ),
    ("we", &["we", "us", "our", "ours", "we're", "let's"]),
    ("you", &["you", "your", "yours", "yourself", "you're"]),
    (
        "posemo",
        &[
            "love",
            "nice",
            "sweet",
            "happy",
            "great",
            "good",
            "awesome",
            "beautiful",
            "glad",
            "fun",
            "thanks",
            "amazing",
            "best",
            "proud",
            "hope",
            "cool",
        ],
    ),
    (
        "negemo",
        &[
            "hate",
            "angry",
            "awful",
            "bad",
            "disgusting",
            "stupid",
            "shame",
            "terrible",
            "worst",
            "ugly",
            "pathetic",
            "idiots",
            "ridiculous",
            "outrageous",
            "mad",
            "evil",
        ],
    ),
    (
        "assent",
        &[
            "agree",
            "ok",
            "okay",
            "yes",
            "yeah",
            "yep",
            "absolutely",
            "exactly",
            "indeed",
            "sure",
        ],
    ),
    (
        "netspeak",
        &[
            "lol", "omg", "btw", "smh", "lmao", "tbh", "thx", "ur", "pls", "ffs", "srsly", "nvm",
            "fyi",
        ],
    ),
    (
        "filler",
        &["blah", "meh", "whatever", "anyway", "um", "uh", "like"],
    ),
    ("swear", &["damn", "hell", "crap", "shit", "bloody"]),
    (
        "negate",
        &[
            "no", "not", "never", "don't", "can't", "won't", "nothing", "nobody",
        ],
    ),
    (
        "cogproc",
        &[
            "think",
            "know",
            "because",
            "why",
            "should",
            "maybe",
            "if",
            "believe",
            "understand",
            "perhaps",
        ],
    ),
    (
        "percept",
        &[
            "see", "saw", "look", "hear", "heard", "watch", "feel", "felt", "loud",
        ],
    ),
];

/// Words matching no demo-lexicon category.
pub const NEUTRAL_WORDS: &[&str] = &[
    "the", "a", "to", "and", "of", "in", "on", "at", "for", "with", "from", "this", "that", "it",
    "is", "was", "are", "be", "by", "as", "an", "or", "so", "just", "all", "out", "up", "get",
    "new", "day", "time", "people", "today", "now", "one", "two", "what", "who", "there", "here",
    "about", "then", "than", "more", "over", "after", "into", "again", "still", "back", "way",
    "year", "week", "news", "game", "city", "place", "thing", "work", "home", "team", "video",
    "story", "world", "night", "morning", "next", "last", "first", "really", "very", "much",
    "many", "some", "any", "other", "same", "been", "has", "have", "had", "will", "can", "would",
    "could", "going", "make", "made", "said", "says", "went", "got",
];

pub const TOPIC_HASHTAGS: usize = 40;
const POPULAR_ACCOUNTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FirestormConfig {
    /// First slice of the burst.
    pub start_slice: usize,
    /// Slices of linear ramp up (and down) around the plateau.
    pub ramp_slices: usize,
    /// Plateau length in slices.
    pub duration_slices: usize,
    /// Peak volume as a multiple of the background rate; 1 disables the burst.
    pub magnitude: f64,
    /// Event token, `#hashtag` or `@handle`.
    pub target: String,
    /// Account mentioned by every firestorm tweet.
    pub mention_user: String,
    /// Target share of firestorm-labelled tweets in the whole dataset.
    pub fraction: f64,
    /// Extra probability of a `we` token in labelled tweets.
    pub we_boost: f64,
}

impl Default for FirestormConfig {
    fn default() -> Self {
        FirestormConfig {
            start_slice: 384,
            ramp_slices: 4,
            duration_slices: 40,
            magnitude: 5.0,
            target: "#acmegate".into(),
            mention_user: "acmecorp".into(),
            fraction: 0.04,
            we_boost: 0.0,
        }
    }
}

impl FirestormConfig {
    pub fn is_null(&self) -> bool {
        self.magnitude == 1.0
    }

    /// Half-open burst interval `[start, end)`.
    pub fn burst(&self) -> (usize, usize) {
        if self.is_null() {
            (self.start_slice, self.start_slice)
        } else {
            (
                self.start_slice,
                self.start_slice + 2 * self.ramp_slices + self.duration_slices,
            )
        }
    }

    /// Burst volume profile in `[0, 1]` at slice `s`.
    fn profile(&self, s: usize) -> f64 {
        let (a, b) = self.burst();
        if s < a || s >= b {
            return 0.0;
        }
        let k = s - a;
        let r = self.ramp_slices;
        if k < r {
            (k + 1) as f64 / (r + 1) as f64
        } else if k < r + self.duration_slices {
            1.0
        } else {
            (b - s) as f64 / (r + 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub span_start: DateTime<Utc>,
    pub span_days: u32,
    pub n_users: usize,
    /// Mean background tweets per slice.
    pub base_rate: f64,
    /// Relative amplitude of the daily rate oscillation.
    pub diurnal_amplitude: f64,
    pub hashtag_prob: f64,
    pub mention_prob: f64,
    pub retweet_prob: f64,
    pub min_tokens: usize,
    pub max_tokens: usize,
    pub firestorm: FirestormConfig,
    /// Per category `[baseline, firestorm]` token probabilities.
    pub lexical_shift: BTreeMap<String, [f64; 2]>,
}

pub fn default_lexical_shift() -> BTreeMap<String, [f64; 2]> {
    [
        ("I", [0.09, 0.015]),
        ("we", [0.02, 0.02]),
        ("you", [0.03, 0.03]),
        ("posemo", [0.07, 0.015]),
        ("negemo", [0.02, 0.07]),
        ("assent", [0.015, 0.06]),
        ("netspeak", [0.015, 0.07]),
        ("filler", [0.02, 0.02]),
        ("swear", [0.01, 0.01]),
        ("negate", [0.03, 0.03]),
        ("cogproc", [0.04, 0.04]),
        ("percept", [0.02, 0.02]),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            span_start: Utc.with_ymd_and_hms(2016, 1, 4, 0, 0, 0).unwrap(),
            span_days: 15,
            n_users: 4000,
            base_rate: 24.0,
            diurnal_amplitude: 0.4,
            hashtag_prob: 0.2,
            mention_prob: 0.3,
            retweet_prob: 0.1,
            min_tokens: 8,
            max_tokens: 20,
            firestorm: FirestormConfig::default(),
            lexical_shift: default_lexical_shift(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

impl SynthConfig {
    pub fn n_slices(&self) -> usize {
        self.span_days as usize * SLICES_PER_DAY
    }

    pub fn target(&self) -> Result<Target> {
        self.firestorm.target.parse()
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.firestorm;
        if self.span_days == 0 || self.n_users < 2 * POPULAR_ACCOUNTS {
            return Err(invalid(
                "span_days must be positive and n_users at least 40",
            ));
        }
        if !(self.base_rate.is_finite() && self.base_rate > 0.0) {
            return Err(invalid("base_rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.diurnal_amplitude) {
            return Err(invalid("diurnal_amplitude must lie in [0, 1)"));
        }
        for (name, p) in [
            ("hashtag_prob", self.hashtag_prob),
            ("mention_prob", self.mention_prob),
            ("retweet_prob", self.retweet_prob),
            ("we_boost", f.we_boost),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.min_tokens == 0 || self.min_tokens > self.max_tokens {
            return Err(invalid("need 0 < min_tokens <= max_tokens"));
        }
        let mut sums = [0.0, 0.0];
        for (cat, probs) in &self.lexical_shift {
            if words_for(cat).is_none() {
                return Err(Error::UnknownCategory(cat.clone()));
            }
            for (i, &p) in probs.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(format!("probability for {cat} outside [0, 1]")));
                }
                sums[i] += p;
            }
        }
        if sums[0] > 1.0 || sums[1] + f.we_boost > 1.0 {
            return Err(invalid("category probabilities sum above 1"));
        }
        let target = self.target()?;
        if let Target::Mention(m) = &target {
            if m != &f.mention_user.to_lowercase() {
                return Err(invalid("mention_user must equal an @ target"));
            }
        }
        if !(f.magnitude.is_finite() && f.magnitude >= 1.0) {
            return Err(invalid("magnitude must be at least 1"));
        }
        if !f.is_null() {
            if !(0.02..=0.08).contains(&f.fraction) {
                return Err(invalid("fraction must lie in [0.02, 0.08]"));
            }
            if f.start_slice < STREAM_WINDOW - 1 + f.ramp_slices {
                return Err(invalid("start_slice leaves no headroom before the burst"));
            }
            if f.burst().1 > self.n_slices() {
                return Err(invalid("burst extends past the end of the span"));
            }
        }
        Ok(())
    }

    fn rate(&self, s: usize) -> f64 {
        let phase = 2.0 * PI * (s % SLICES_PER_DAY) as f64 / SLICES_PER_DAY as f64;
        // quietest around 04:00, busiest around 16:00
        self.base_rate * (1.0 - self.diurnal_amplitude * (phase - PI / 3.0).cos())
    }

    fn extra_rate(&self, s: usize) -> f64 {
        self.base_rate * (self.firestorm.magnitude - 1.0) * self.firestorm.profile(s)
    }

    /// Probability that a burst tweet carries the event token.
    pub fn label_probability(&self) -> Result<f64> {
        let f = &self.firestorm;
        if f.is_null() {
            return Ok(0.0);
        }
        let n = self.n_slices();
        let background: f64 = (0..n).map(|s| self.rate(s)).sum();
        let extras: f64 = (0..n).map(|s| self.extra_rate(s)).sum();
        let required = f.fraction * (background + extras) / extras;
        if required > 1.0 {
            return Err(Error::InfeasibleFraction {
                fraction: f.fraction,
                magnitude: f.magnitude,
                required,
            });
        }
        Ok(required)
    }
}

pub fn words_for(category: &str) -> Option<&'static [&'static str]> {
    CATEGORY_WORDS
        .iter()
        .find(|(c, _)| *c == category)
        .map(|(_, w)| *w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub start_slice: usize,
    /// Half-open `[start, end)`; empty for null events.
    pub burst: (usize, usize),
    pub directions: BTreeMap<String, Direction>,
    pub target: String,
    pub label_probability: f64,
}

impl GroundTruth {
    pub fn is_null(&self) -> bool {
        self.burst.0 == self.burst.1
    }

    pub fn in_burst(&self, slice: usize) -> bool {
        (self.burst.0..self.burst.1).contains(&slice)
    }

    pub fn shifted(&self) -> impl Iterator<Item = &str> {
        self.directions.keys().map(String::as_str)
    }
}

fn directions(cfg: &SynthConfig) -> BTreeMap<String, Direction> {
    let mut out = BTreeMap::new();
    if cfg.firestorm.is_null() {
        return out;
    }
    let dir = |b: f64, f: f64| {
        if f > b {
            Direction::More
        } else {
            Direction::Less
        }
    };
    for (cat, [b, f]) in &cfg.lexical_shift {
        if b != f {
            out.insert(cat.clone(), dir(*b, *f));
        }
    }
    let get = |c: &str| cfg.lexical_shift.get(c).copied().unwrap_or([0.0, 0.0]);
    let (p, n) = (get("posemo"), get("negemo"));
    if p[0] - n[0] != p[1] - n[1] {
        out.insert(EMO.to_string(), dir(p[0] - n[0], p[1] - n[1]));
    }
    out
}

struct TokenModel {
    cumulative: Vec<(f64, &'static [&'static str])>,
}

impl TokenModel {
    fn new(probs: impl Iterator<Item = (&'static [&'static str], f64)>) -> Self {
        let mut acc = 0.0;
        let cumulative = probs
            .filter(|(_, p)| *p > 0.0)
            .map(|(w, p)| {
                acc += p;
                (acc, w)
            })
            .collect();
        TokenModel { cumulative }
    }

    fn word(&self, rng: &mut ChaCha8Rng) -> &'static str {
        let u: f64 = rng.random();
        let words = self
            .cumulative
            .iter()
            .find(|(c, _)| u < *c)
            .map(|(_, w)| *w)
            .unwrap_or(NEUTRAL_WORDS);
        words[rng.random_range(0..words.len())]
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Background,
    Extra,
    Labelled,
}

struct Generator<'a> {
    cfg: &'a SynthConfig,
    users: Vec<String>,
    tags: Vec<String>,
    baseline: TokenModel,
    firestorm: TokenModel,
    labelled: TokenModel,
    target: Target,
}

impl Generator<'_> {
    fn user(&self, rng: &mut ChaCha8Rng) -> &str {
        // skewed activity: low indices tweet more
        let u: f64 = rng.random();
        &self.users[((u * u) * self.users.len() as f64) as usize]
    }

    fn mention(&self, rng: &mut ChaCha8Rng) -> &str {
        if rng.random_bool(0.3) {
            &self.users[rng.random_range(0..POPULAR_ACCOUNTS)]
        } else {
            &self.users[rng.random_range(0..self.users.len())]
        }
    }

    /// `shift` is the probability that a background tweet already uses the
    /// firestorm distribution; burst tweets always do.
    fn tweet(&self, rng: &mut ChaCha8Rng, s: usize, kind: Kind, shift: f64, id: usize) -> Tweet {
        let cfg = self.cfg;
        let author = self.user(rng).to_string();
        let model = match kind {
            Kind::Labelled => &self.labelled,
            Kind::Extra => &self.firestorm,
            Kind::Background if shift > 0.0 && rng.random_bool(shift) => &self.firestorm,
            _ => &self.baseline,
        };
        let n_tokens = rng.random_range(cfg.min_tokens..=cfg.max_tokens);
        let mut words: Vec<String> = (0..n_tokens).map(|_| model.word(rng).to_string()).collect();
        let mut hashtags = Vec::new();
        let mut mentions = Vec::new();
        if kind == Kind::Labelled {
            match &self.target {
                Target::Hashtag(h) => {
                    hashtags.push(h.clone());
                    mentions.push(cfg.firestorm.mention_user.to_lowercase());
                }
                Target::Mention(m) => mentions.push(m.clone()),
            }
        } else {
            if rng.random_bool(cfg.hashtag_prob) {
                let u: f64 = rng.random();
                hashtags.push(self.tags[(u * u * TOPIC_HASHTAGS as f64) as usize].clone());
            }
            if rng.random_bool(cfg.mention_prob) {
                let m = self.mention(rng);
                if m != author {
                    mentions.push(m.to_string());
                }
            }
        }
        let retweet_of = rng.random_bool(cfg.retweet_prob).then(|| RetweetOf {
            author: self.user(rng).to_string(),
            tweet_id: format!("{}", rng.random_range(0..id.max(1))),
        });
        words.extend(hashtags.iter().map(|h| format!("#{h}")));
        words.extend(mentions.iter().map(|m| format!("@{m}")));
        let offset = s as i64 * SLICE_SECONDS + rng.random_range(0..SLICE_SECONDS);
        Tweet {
            id: id.to_string(),
            author,
            timestamp: cfg.span_start + Duration::seconds(offset),
            text: words.join(" "),
            hashtags,
            mentions,
            retweet_of,
        }
    }
}

/// Generate one event from its configuration.
pub fn generate(cfg: &SynthConfig) -> Result<(EventDataset, GroundTruth)> {
    cfg.validate()?;
    let p_label = cfg.label_probability()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f = &cfg.firestorm;
    let shift = |i: usize| {
        CATEGORY_WORDS.iter().map(move |(c, w)| {
            let p = cfg.lexical_shift.get(*c).map_or(0.0, |v| v[i]);
            (*w, p)
        })
    };
    let we = words_for("we").unwrap_or_default();
    let gen = Generator {
        cfg,
        users: (0..cfg.n_users).map(|i| format!("user{i:05}")).collect(),
        tags: (0..TOPIC_HASHTAGS)
            .map(|i| format!("topic{i:02}"))
            .collect(),
        baseline: TokenModel::new(shift(0)),
        firestorm: TokenModel::new(shift(1)),
        labelled: TokenModel::new(shift(1).chain(std::iter::once((we, f.we_boost)))),
        target: cfg.target()?,
    };
    let (b0, b1) = f.burst();
    let mut tweets = Vec::new();
    for s in 0..cfg.n_slices() {
        let shift = f.profile(s);
        let n_bg = poisson(&mut rng, cfg.rate(s));
        let n_ex = poisson(&mut rng, cfg.extra_rate(s));
        for _ in 0..n_bg {
            let id = tweets.len();
            tweets.push(gen.tweet(&mut rng, s, Kind::Background, shift, id));
        }
        for _ in 0..n_ex {
            let kind = if rng.random_bool(p_label) {
                Kind::Labelled
            } else {
                Kind::Extra
            };
            let id = tweets.len();
            tweets.push(gen.tweet(&mut rng, s, kind, shift, id));
        }
    }
    let ds = EventDataset::new(gen.target.clone(), cfg.span_start, cfg.span_days, tweets)?;
    let truth = GroundTruth {
        seed: cfg.seed,
        start_slice: f.start_slice,
        burst: (b0, b1),
        directions: directions(cfg),
        target: gen.target.to_string(),
        label_probability: p_label,
    };
    Ok((ds, truth))
}

fn poisson(rng: &mut ChaCha8Rng, lambda: f64) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).map_or(0, |d| d.sample(rng) as u64)
}

/// Parameter ranges for suite jitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteJitter {
    pub start_slice: (usize, usize),
    pub magnitude: (f64, f64),
    pub duration_slices: (usize, usize),
    pub fraction: (f64, f64),
    /// Multiplier on base rate and user count, drawn log-uniformly.
    pub volume_scale: (f64, f64),
}

impl Default for SuiteJitter {
    fn default() -> Self {
        SuiteJitter {
            start_slice: (360, 420),
            magnitude: (4.0, 7.0),
            duration_slices: (30, 48),
            fraction: (0.03, 0.06),
            volume_scale: (0.5, 2.0),
        }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Per-event configurations of a suite, before generation.
pub fn suite_configs(
    n: usize,
    base: &SynthConfig,
    jitter: &SuiteJitter,
    seed: u64,
) -> Result<Vec<SynthConfig>> {
    if n == 0 {
        return Err(invalid("suite needs at least one event"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = jitter.start_slice;
    if lo > hi {
        return Err(invalid("empty start_slice range"));
    }
    let width = hi - lo + 1;
    let starts: Vec<usize> = if n <= width {
        sample(&mut rng, width, n)
            .into_iter()
            .map(|k| lo + k)
            .collect()
    } else {
        (0..n).map(|_| rng.random_range(lo..=hi)).collect()
    };
    let uniform =
        |rng: &mut ChaCha8Rng, (a, b): (f64, f64)| if a < b { rng.random_range(a..b) } else { a };
    let mut out = Vec::with_capacity(n);
    for (i, start) in starts.into_iter().enumerate() {
        let mut c = base.clone();
        c.seed = splitmix(seed ^ splitmix(i as u64));
        c.firestorm.start_slice = start;
        c.firestorm.magnitude = uniform(&mut rng, jitter.magnitude);
        let (d0, d1) = jitter.duration_slices;
        c.firestorm.duration_slices = rng.random_range(d0.min(d1)..=d1.max(d0));
        c.firestorm.fraction = uniform(&mut rng, jitter.fraction);
        let (v0, v1) = jitter.volume_scale;
        let scale = uniform(&mut rng, (v0.ln(), v1.ln())).exp();
        c.base_rate = base.base_rate * scale;
        c.n_users = ((base.n_users as f64 * scale).round() as usize).max(2 * POPULAR_ACCOUNTS);
        c.validate()?;
        out.push(c);
    }
    Ok(out)
}

/// Generate `n` independent events with jittered parameters.
pub fn generate_suite(
    n: usize,
    base: &SynthConfig,
    seed: u64,
) -> Result<Vec<(EventDataset, GroundTruth)>> {
    generate_suite_with(n, base, &SuiteJitter::default(), seed)
}

pub fn generate_suite_with(
    n: usize,
    base: &SynthConfig,
    jitter: &SuiteJitter,
    seed: u64,
) -> Result<Vec<(EventDataset, GroundTruth)>> {
    suite_configs(n, base, jitter, seed)?
        .par_iter()
        .map(generate)
        .collect()
}

/// Null (burst-free) configuration derived from `base`.
pub fn null_config(base: &SynthConfig) -> SynthConfig {
    let mut c = base.clone();
    c.firestorm.magnitude = 1.0;
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::bucketize;
    use crate::lexicon::Lexicon;

    #[test]
    fn word_lists_hit_one_leaf_each() {
        let lex = Lexicon::demo();
        for w in NEUTRAL_WORDS {
            assert!(lex.score(w).values().iter().all(|&v| v == 0.0), "{w}");
        }
        let leaves = lex.leaf_categories();
        for (cat, words) in CATEGORY_WORDS {
            for w in words {
                let s = lex.score(w);
                for leaf in &leaves {
                    let expect = if leaf == &cat { 100.0 } else { 0.0 };
                    assert_eq!(s.get(leaf), Some(expect), "{w} in {leaf}");
                }
            }
        }
    }

    fn small() -> SynthConfig {
        SynthConfig {
            span_days: 10,
            base_rate: 8.0,
            n_users: 600,
            firestorm: FirestormConfig {
                start_slice: 300,
                ..FirestormConfig::default()
            },
            ..SynthConfig::default()
        }
    }

    #[test]
    fn deterministic() {
        let (a, _) = generate(&small()).unwrap();
        let (b, _) = generate(&small()).unwrap();
        assert_eq!(a.tweets, b.tweets);
    }

    #[test]
    fn fraction_in_range() {
        let (ds, t) = generate(&SynthConfig::default()).unwrap();
        let f = ds.firestorm_fraction();
        assert!((0.02..=0.08).contains(&f), "{f}");
        assert_eq!(t.burst, (384, 432));
        assert_eq!(t.directions["I"], Direction::Less);
        assert_eq!(t.directions[EMO], Direction::Less);
        assert_eq!(t.directions["assent"], Direction::More);
    }

    #[test]
    fn labelled_tweets_only_inside_burst() {
        let (ds, t) = generate(&small()).unwrap();
        for tw in &ds.tweets {
            if crate::corpus::is_firestorm_tweet(tw, &ds.label) {
                assert!(t.in_burst(ds.slice_of(tw.timestamp)));
                assert!(tw.mentions.contains(&"acmecorp".to_string()));
            } else {
                assert!(!tw.mentions.contains(&"acmecorp".to_string()));
            }
        }
    }

    #[test]
    fn null_has_no_labels() {
        let (ds, t) = generate(&null_config(&small())).unwrap();
        assert_eq!(ds.n_firestorm(), 0);
        assert!(t.is_null() && t.directions.is_empty());
        assert_eq!(bucketize(&ds).n_slices(), 480);
    }

    #[test]
    fn infeasible_fraction() {
        let mut c = small();
        c.firestorm.magnitude = 1.05;
        c.firestorm.fraction = 0.08;
        assert!(matches!(
            generate(&c),
            Err(Error::InfeasibleFraction { .. })
        ));
    }

    #[test]
    fn validation() {
        let mut c = small();
        c.firestorm.start_slice = 10;
        assert!(c.validate().is_err());
        let mut c = small();
        c.lexical_shift.insert("bogus".into(), [0.1, 0.1]);
        assert!(matches!(c.validate(), Err(Error::UnknownCategory(_))));
        let mut c = small();
        c.firestorm.fraction = 0.1;
        assert!(c.validate().is_err());
    }

    #[test]
    fn suite_starts_distinct_and_scaled() {
        let cfgs = suite_configs(21, &SynthConfig::default(), &SuiteJitter::default(), 7).unwrap();
        let mut starts: Vec<usize> = cfgs.iter().map(|c| c.firestorm.start_slice).collect();
        starts.sort();
        starts.dedup();
        assert_eq!(starts.len(), 21);
        for c in &cfgs {
            assert!((12.0..=48.0).contains(&c.base_rate));
            assert!((4.0..7.0).contains(&c.firestorm.magnitude));
        }
        assert_eq!(
            cfgs,
            suite_configs(21, &SynthConfig::default(), &SuiteJitter::default(), 7).unwrap()
        );
    }
}
