//! Directed, unweighted mention and retweet networks over moving windows,
//! and the metric vector tracked per window.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::changepoint::FeatureSeries;
use crate::corpus::{bucketize, EventDataset, Tweet, NETWORK_WINDOW};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Mention,
    Retweet,
}

impl FromStr for NetworkKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mention" => Ok(NetworkKind::Mention),
            "retweet" => Ok(NetworkKind::Retweet),
            _ => Err(Error::InvalidConfig(format!("unknown network kind `{s}`"))),
        }
    }
}

/// A simple directed graph: self-loops dropped, parallel edges collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionNetwork {
    pub kind: NetworkKind,
    /// Sorted user ids; edges index into this list.
    pub nodes: Vec<String>,
    /// Sorted, deduplicated `(source, target)` pairs.
    pub edges: Vec<(u32, u32)>,
    /// Self-mentions (or self-retweets) removed during construction.
    pub self_loops_dropped: usize,
}

fn edge_targets(t: &Tweet, kind: NetworkKind) -> impl Iterator<Item = &str> {
    let (mentions, rt) = match kind {
        NetworkKind::Mention => (t.mentions.as_slice(), None),
        NetworkKind::Retweet => (&[][..], t.retweet_of.as_ref().map(|r| r.author.as_str())),
    };
    mentions.iter().map(String::as_str).chain(rt)
}

/// True if the tweet contributes at least one (non-self) edge.
fn qualifies(t: &Tweet, kind: NetworkKind) -> bool {
    edge_targets(t, kind).any(|u| u != t.author)
}

pub fn build_network(tweets: &[Tweet], kind: NetworkKind) -> MentionNetwork {
    let mut pairs: Vec<(&str, &str)> = Vec::new();
    let mut self_loops = 0;
    for t in tweets {
        for target in edge_targets(t, kind) {
            if target == t.author {
                self_loops += 1;
            } else {
                pairs.push((t.author.as_str(), target));
            }
        }
    }
    let mut nodes: Vec<&str> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    let index: HashMap<&str, u32> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (*n, i as u32))
        .collect();
    let mut edges: Vec<(u32, u32)> = pairs.iter().map(|(a, b)| (index[a], index[b])).collect();
    edges.sort_unstable();
    edges.dedup();
    MentionNetwork {
        kind,
        nodes: nodes.into_iter().map(str::to_string).collect(),
        edges,
        self_loops_dropped: self_loops,
    }
}

impl MentionNetwork {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for &(_, b) in &self.edges {
            d[b as usize] += 1;
        }
        d
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for &(a, _) in &self.edges {
            d[a as usize] += 1;
        }
        d
    }

    /// Weakly connected component label per node (labels are root indices).
    pub fn weak_components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.nodes.len());
        for &(a, b) in &self.edges {
            uf.union(a as usize, b as usize);
        }
        (0..self.nodes.len()).map(|i| uf.find(i)).collect()
    }

    /// Node indices of the largest weakly connected component (lowest label on ties).
    pub fn largest_component(&self) -> Vec<usize> {
        let labels = self.weak_components();
        let mut sizes: HashMap<usize, usize> = HashMap::new();
        for &l in &labels {
            *sizes.entry(l).or_default() += 1;
        }
        let Some(best) = sizes
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(l, _)| *l)
        else {
            return Vec::new();
        };
        (0..labels.len()).filter(|&i| labels[i] == best).collect()
    }

    pub fn node_index(&self, user: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(user)).ok()
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Per-window network and activity metrics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct NetworkMetrics {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub density: f64,
    pub avg_out_degree: f64,
    pub max_out_degree: usize,
    pub max_in_degree: usize,
    pub lcc_abs: usize,
    pub lcc_rel: f64,
    pub n_tweets: usize,
    pub n_mention_tweets: usize,
    pub mention_tweet_ratio: f64,
    pub mentions_per_tweet: f64,
    pub mentions_per_user: f64,
    pub tweets_per_user: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn compute_metrics(net: &MentionNetwork, tweets: &[Tweet]) -> NetworkMetrics {
    let n = net.n_nodes();
    let e = net.n_edges();
    let (nf, ef) = (n as f64, e as f64);
    let lcc_abs = net.largest_component().len();
    let n_tweets = tweets.len();
    let n_mention_tweets = tweets.iter().filter(|t| qualifies(t, net.kind)).count();
    NetworkMetrics {
        n_nodes: n,
        n_edges: e,
        density: if n >= 2 { ef / (nf * (nf - 1.0)) } else { 0.0 },
        avg_out_degree: ratio(ef, nf),
        max_out_degree: net.out_degrees().into_iter().max().unwrap_or(0),
        max_in_degree: net.in_degrees().into_iter().max().unwrap_or(0),
        lcc_abs,
        lcc_rel: ratio(lcc_abs as f64, nf),
        n_tweets,
        n_mention_tweets,
        mention_tweet_ratio: ratio(n_mention_tweets as f64, n_tweets as f64),
        mentions_per_tweet: ratio(ef, n_tweets as f64),
        mentions_per_user: ratio(ef, nf),
        tweets_per_user: ratio(n_tweets as f64, nf),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    NNodes,
    NEdges,
    Density,
    AvgOutDegree,
    MaxOutDegree,
    MaxInDegree,
    LccAbs,
    LccRel,
    NTweets,
    NMentionTweets,
    MentionTweetRatio,
    MentionsPerTweet,
    MentionsPerUser,
    TweetsPerUser,
}

impl Metric {
    pub const ALL: [Metric; 14] = [
        Metric::NNodes,
        Metric::NEdges,
        Metric::Density,
        Metric::AvgOutDegree,
        Metric::MaxOutDegree,
        Metric::MaxInDegree,
        Metric::LccAbs,
        Metric::LccRel,
        Metric::NTweets,
        Metric::NMentionTweets,
        Metric::MentionTweetRatio,
        Metric::MentionsPerTweet,
        Metric::MentionsPerUser,
        Metric::TweetsPerUser,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::NNodes => "n_nodes",
            Metric::NEdges => "n_edges",
            Metric::Density => "density",
            Metric::AvgOutDegree => "avg_out_degree",
            Metric::MaxOutDegree => "max_out_degree",
            Metric::MaxInDegree => "max_in_degree",
            Metric::LccAbs => "lcc_abs",
            Metric::LccRel => "lcc_rel",
            Metric::NTweets => "n_tweets",
            Metric::NMentionTweets => "n_mention_tweets",
            Metric::MentionTweetRatio => "mention_tweet_ratio",
            Metric::MentionsPerTweet => "mentions_per_tweet",
            Metric::MentionsPerUser => "mentions_per_user",
            Metric::TweetsPerUser => "tweets_per_user",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

impl NetworkMetrics {
    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::NNodes => self.n_nodes as f64,
            Metric::NEdges => self.n_edges as f64,
            Metric::Density => self.density,
            Metric::AvgOutDegree => self.avg_out_degree,
            Metric::MaxOutDegree => self.max_out_degree as f64,
            Metric::MaxInDegree => self.max_in_degree as f64,
            Metric::LccAbs => self.lcc_abs as f64,
            Metric::LccRel => self.lcc_rel,
            Metric::NTweets => self.n_tweets as f64,
            Metric::NMentionTweets => self.n_mention_tweets as f64,
            Metric::MentionTweetRatio => self.mention_tweet_ratio,
            Metric::MentionsPerTweet => self.mentions_per_tweet,
            Metric::MentionsPerUser => self.mentions_per_user,
            Metric::TweetsPerUser => self.tweets_per_user,
        }
    }
}

/// Metrics for every slice `t`, each over the trailing `window` slices.
pub fn metrics_timeline(
    ds: &EventDataset,
    kind: NetworkKind,
    window: usize,
) -> Vec<NetworkMetrics> {
    let buckets = bucketize(ds);
    (0..buckets.n_slices())
        .into_par_iter()
        .map(|t| {
            let tweets = buckets.window(ds, t, window);
            compute_metrics(&build_network(tweets, kind), tweets)
        })
        .collect()
}

/// One mention-network metric per slice over the standard 24-slice window.
pub fn metric_series(ds: &EventDataset, metric: &str) -> Result<FeatureSeries> {
    let metric: Metric = metric.parse()?;
    let values = metrics_timeline(ds, NetworkKind::Mention, NETWORK_WINDOW)
        .iter()
        .map(|m| m.get(metric))
        .collect();
    FeatureSeries::new(metric.name(), 0, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::RetweetOf;
    use chrono::{TimeZone, Utc};

    fn tw(author: &str, mentions: &[&str]) -> Tweet {
        Tweet {
            id: String::new(),
            author: author.into(),
            timestamp: Utc.timestamp_opt(0, 0).unwrap(),
            text: String::new(),
            hashtags: vec![],
            mentions: mentions.iter().map(|s| s.to_string()).collect(),
            retweet_of: None,
        }
    }

    #[test]
    fn single_tweet_two_mentions() {
        let tweets = [tw("u1", &["u2", "u3"])];
        let net = build_network(&tweets, NetworkKind::Mention);
        assert_eq!((net.n_nodes(), net.n_edges()), (3, 2));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let tweets = [tw("u1", &["u2"]), tw("u1", &["u2"])];
        let net = build_network(&tweets, NetworkKind::Mention);
        assert_eq!(net.n_edges(), 1);
        let m = compute_metrics(&net, &tweets);
        assert_eq!(m.n_mention_tweets, 2);
        assert_eq!(m.mentions_per_tweet, 0.5);
    }

    #[test]
    fn self_mentions_dropped() {
        let tweets = [tw("u1", &["u1"]), tw("u2", &["u1", "u2"])];
        let net = build_network(&tweets, NetworkKind::Mention);
        assert_eq!(net.n_edges(), 1);
        assert_eq!(net.self_loops_dropped, 2);
        assert_eq!(compute_metrics(&net, &tweets).n_mention_tweets, 1);
    }

    #[test]
    fn retweet_edges() {
        let mut t = tw("u1", &["x"]);
        t.retweet_of = Some(RetweetOf {
            author: "u2".into(),
            tweet_id: "9".into(),
        });
        let net = build_network(&[t], NetworkKind::Retweet);
        assert_eq!(net.nodes, ["u1", "u2"]);
        assert_eq!(net.edges, [(0, 1)]);
    }

    #[test]
    fn empty_network_metrics() {
        let net = build_network(&[], NetworkKind::Mention);
        assert_eq!(compute_metrics(&net, &[]), NetworkMetrics::default());
    }

    #[test]
    fn star_metrics() {
        let tweets: Vec<_> = (1..=5).map(|i| tw(&format!("u{i}"), &["x"])).collect();
        let m = compute_metrics(&build_network(&tweets, NetworkKind::Mention), &tweets);
        assert_eq!(m.max_in_degree, 5);
        assert_eq!(m.max_out_degree, 1);
        assert_eq!((m.lcc_abs, m.lcc_rel), (6, 1.0));
        assert_eq!(m.n_edges, 5);
        assert!((m.density - 5.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn disjoint_dyads() {
        let tweets = [tw("a", &["b"]), tw("c", &["d"])];
        let m = compute_metrics(&build_network(&tweets, NetworkKind::Mention), &tweets);
        assert_eq!((m.lcc_abs, m.lcc_rel), (2, 0.5));
    }

    #[test]
    fn metric_names_roundtrip() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert!(matches!(
            "pagerank".parse::<Metric>(),
            Err(Error::UnknownMetric(_))
        ));
    }
}
