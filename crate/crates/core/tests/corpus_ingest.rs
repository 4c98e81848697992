use std::io::Cursor;

use chrono::{TimeZone, Utc};
use firestorm_core::corpus::{
    bucketize, ingest, write_jsonl, EventDataset, IngestOptions, Target, Tweet,
};
use firestorm_core::synth::{generate, SynthConfig};

fn opts(label: &str) -> IngestOptions {
    IngestOptions {
        label: Some(label.parse().unwrap()),
        span_start: Some(Utc.with_ymd_and_hms(2014, 5, 14, 0, 0, 0).unwrap()),
        ..IngestOptions::default()
    }
}

#[test]
fn table_one_style_counts_echo() {
    let (n_tweets, n_users) = (39_969usize, 32_382usize);
    let mut data = String::with_capacity(n_tweets * 90);
    for i in 0..n_tweets {
        let user = i % n_users;
        let ts = 1_400_025_600 + (i as i64 * 29) % (15 * 86_400);
        data.push_str(&format!(
            "{{\"id\":\"{i}\",\"user\":\"u{user}\",\"ts\":{ts},\"text\":\"#whyimvotingukip because\"}}\n"
        ));
    }
    let ds = ingest(Cursor::new(data), &opts("#whyimvotingukip")).unwrap();
    assert_eq!(ds.tweets.len(), n_tweets);
    assert_eq!(ds.n_users(), n_users);
    assert_eq!(ds.stats.malformed, 0);
    assert_eq!(ds.n_firestorm(), n_tweets);
}

#[test]
fn jsonl_round_trip_preserves_dataset() {
    let cfg = SynthConfig {
        span_days: 3,
        base_rate: 5.0,
        n_users: 300,
        firestorm: firestorm_core::synth::FirestormConfig {
            start_slice: 80,
            duration_slices: 20,
            ..Default::default()
        },
        ..SynthConfig::default()
    };
    let (ds, _) = generate(&cfg).unwrap();
    let mut buf = Vec::new();
    write_jsonl(&ds, &mut buf).unwrap();
    let back = ingest(Cursor::new(&buf), &IngestOptions::default()).unwrap();
    assert_eq!(back.label, ds.label);
    assert_eq!(back.span_start, ds.span_start);
    assert_eq!(back.span_days, ds.span_days);
    assert_eq!(back.tweets, ds.tweets);
    let mut again = Vec::new();
    write_jsonl(&back, &mut again).unwrap();
    assert_eq!(buf, again);
}

#[test]
fn uniform_traffic_window_counts() {
    let start = Utc.with_ymd_and_hms(2016, 1, 1, 0, 0, 0).unwrap();
    let tweets: Vec<Tweet> = (0..720)
        .map(|s| Tweet {
            id: s.to_string(),
            author: format!("u{s}"),
            timestamp: start + chrono::Duration::seconds(s * 1800 + 60),
            text: "x".into(),
            hashtags: vec![],
            mentions: vec![],
            retweet_of: None,
        })
        .collect();
    let ds = EventDataset::new(Target::Hashtag("x".into()), start, 15, tweets).unwrap();
    let b = bucketize(&ds);
    assert_eq!(b.n_slices(), 720);
    assert_eq!(b.window(&ds, 100, 24).len(), 24);
    assert_eq!(b.window(&ds, 5, 24).len(), 6);
    assert!((0..720).all(|s| b.len_of(s) == 1));
}

#[test]
fn strict_mode_reports_line() {
    let data = "{\"id\":\"1\",\"user\":\"a\",\"ts\":1400025700,\"text\":\"ok\"}\n{\"id\":2}\n";
    let mut o = opts("#x");
    o.strict = true;
    let err = ingest(Cursor::new(data), &o).unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
}
