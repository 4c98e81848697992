use firestorm_core::corpus::{bucketize, EventDataset};
use firestorm_core::detector::{run_stream, StreamConfig, StreamDetector};
use firestorm_core::lexicon::Lexicon;
use firestorm_core::synth::{generate, FirestormConfig, SynthConfig};

fn small_event() -> (EventDataset, firestorm_core::synth::GroundTruth) {
    let cfg = SynthConfig {
        span_days: 5,
        base_rate: 16.0,
        n_users: 800,
        firestorm: FirestormConfig {
            start_slice: 150,
            duration_slices: 30,
            ..Default::default()
        },
        ..SynthConfig::default()
    };
    generate(&cfg).unwrap()
}

#[test]
fn later_tweets_never_change_earlier_reports() {
    let (ds, _) = small_event();
    let lex = Lexicon::demo();
    let cfg = StreamConfig::default();
    let full = run_stream(&ds, &lex, &cfg).unwrap();
    for cut in [60usize, 149, 152, 200] {
        let kept: Vec<_> = ds
            .tweets
            .iter()
            .filter(|t| ds.slice_of(t.timestamp) <= cut)
            .cloned()
            .collect();
        let truncated =
            EventDataset::new(ds.label.clone(), ds.span_start, ds.span_days, kept).unwrap();
        let part = run_stream(&truncated, &lex, &cfg).unwrap();
        for (a, b) in full
            .reports
            .iter()
            .zip(&part.reports)
            .take_while(|(a, _)| a.t <= cut)
        {
            assert_eq!(a, b, "tick {} differs after cutting at {cut}", a.t);
        }
    }
}

#[test]
fn text_path_matches_pre_scored_path() {
    let (ds, _) = small_event();
    let lex = Lexicon::demo();
    let cfg = StreamConfig::default();
    let batch = run_stream(&ds, &lex, &cfg).unwrap();
    let buckets = bucketize(&ds);
    let mut det = StreamDetector::new(&lex, cfg).unwrap();
    let mut reports = Vec::new();
    for s in 0..buckets.n_slices() {
        for t in buckets.bucket(&ds, s) {
            det.observe(&t.text);
        }
        if let Some(r) = det.close_slice().unwrap() {
            reports.push(r);
        }
    }
    assert_eq!(reports, batch.reports);
    assert_eq!(reports.first().map(|r| r.t), Some(48));
    assert_eq!(reports.len(), buckets.n_slices() - 48);
}

#[test]
fn injected_step_is_found_near_the_start() {
    let (ds, truth) = small_event();
    let lex = Lexicon::demo();
    let cfg = StreamConfig {
        categories: vec!["I".into(), "posemo".into()],
        min_categories: 2,
        ..StreamConfig::default()
    };
    let run = run_stream(&ds, &lex, &cfg).unwrap();
    let s = run.summarize(truth.start_slice, 48);
    let n = s.aggregate.expect("no change point near the start");
    assert!(n.offset.abs() <= 2, "{n:?}");
    for c in &s.per_category {
        assert!(c.nearest.is_some_and(|n| n.offset.abs() <= 2), "{c:?}");
    }
    assert!(s.first_alert.is_some());
}

#[test]
fn retained_state_does_not_grow() {
    let (ds, _) = small_event();
    let lex = Lexicon::demo();
    let run = run_stream(&ds, &lex, &StreamConfig::default()).unwrap();
    let first = run.retained[0];
    assert!(run.retained.iter().all(|&r| r == first));
    assert_eq!(first, 49 * 5 + 2 * 5 + 2);
}

#[test]
fn short_dataset_is_rejected() {
    let (ds, _) = small_event();
    let lex = Lexicon::demo();
    let cfg = StreamConfig {
        window: 300,
        ..StreamConfig::default()
    };
    assert!(matches!(
        run_stream(&ds, &lex, &cfg),
        Err(firestorm_core::Error::SeriesTooShort {
            needed: 300,
            got: 240
        })
    ));
}
