mod common;

use chrono::{TimeZone, Utc};
use firestorm_core::corpus::{bucketize, RetweetOf, Tweet};
use firestorm_core::network::{build_network, compute_metrics, metrics_timeline, NetworkKind};
use firestorm_core::synth::{generate, SynthConfig};
use proptest::prelude::*;

fn tweets_from(spec: &[(u8, Vec<u8>, Option<u8>)]) -> Vec<Tweet> {
    let ts = Utc.with_ymd_and_hms(2016, 1, 1, 0, 0, 0).unwrap();
    spec.iter()
        .enumerate()
        .map(|(i, (a, ms, rt))| Tweet {
            id: i.to_string(),
            author: format!("u{a}"),
            timestamp: ts,
            text: String::new(),
            hashtags: vec![],
            mentions: ms.iter().map(|m| format!("u{m}")).collect(),
            retweet_of: rt.map(|r| RetweetOf {
                author: format!("u{r}"),
                tweet_id: "0".into(),
            }),
        })
        .collect()
}

fn graph_spec() -> impl Strategy<Value = Vec<(u8, Vec<u8>, Option<u8>)>> {
    prop::collection::vec(
        (
            0u8..30,
            prop::collection::vec(0u8..30, 0..4),
            prop::option::of(0u8..30),
        ),
        0..80,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mention_network_matches_adjacency_oracle(spec in graph_spec()) {
        let tweets = tweets_from(&spec);
        let net = build_network(&tweets, NetworkKind::Mention);
        let m = compute_metrics(&net, &tweets);
        let o = common::NetworkOracle::from_mentions(&tweets);
        prop_assert_eq!(&net.nodes, &o.nodes);
        prop_assert_eq!(m.n_edges, o.n_edges());
        prop_assert_eq!(m.density, o.density());
        prop_assert_eq!(m.lcc_abs, o.largest_weak_component());
        let indeg = net.in_degrees();
        let outdeg = net.out_degrees();
        for j in 0..o.n() {
            prop_assert_eq!(indeg[j], o.in_degree(j));
            prop_assert_eq!(outdeg[j], o.out_degree(j));
        }
        prop_assert_eq!(indeg.iter().sum::<usize>(), m.n_edges);
        prop_assert_eq!(outdeg.iter().sum::<usize>(), m.n_edges);
        prop_assert!(m.lcc_rel <= 1.0 && m.density <= 1.0);
    }

    #[test]
    fn retweet_network_has_one_edge_per_retweeted_pair(spec in graph_spec()) {
        let tweets = tweets_from(&spec);
        let net = build_network(&tweets, NetworkKind::Retweet);
        let mut pairs: Vec<(String, String)> = tweets
            .iter()
            .filter_map(|t| t.retweet_of.as_ref().map(|r| (t.author.clone(), r.author.clone())))
            .filter(|(a, b)| a != b)
            .collect();
        pairs.sort();
        pairs.dedup();
        prop_assert_eq!(net.edges.len(), pairs.len());
    }
}

#[test]
fn timeline_windows_match_direct_computation() {
    let cfg = SynthConfig {
        span_days: 4,
        base_rate: 6.0,
        n_users: 200,
        firestorm: firestorm_core::synth::FirestormConfig {
            start_slice: 100,
            duration_slices: 30,
            ..Default::default()
        },
        ..SynthConfig::default()
    };
    let (ds, truth) = generate(&cfg).unwrap();
    let timeline = metrics_timeline(&ds, NetworkKind::Mention, 24);
    let b = bucketize(&ds);
    for t in [0, 23, 24, 100, 150, 191] {
        let w = b.window(&ds, t, 24);
        assert_eq!(
            timeline[t],
            compute_metrics(&build_network(w, NetworkKind::Mention), w)
        );
    }
    let peak = firestorm_core::evaluation::argmax_first(
        &timeline.iter().map(|m| m.max_in_degree).collect::<Vec<_>>(),
    )
    .unwrap();
    assert!(
        truth.in_burst(peak),
        "peak {peak} outside {:?}",
        truth.burst
    );
}
