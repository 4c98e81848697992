use firestorm_core::corpus::{bucketize, is_firestorm_tweet};
use firestorm_core::detector::{category_series_from_table, score_dataset};
use firestorm_core::evaluation::{
    component_split_compare, evaluate_event, peaks, start_time, Direction, EvalConfig,
};
use firestorm_core::lexicon::Lexicon;
use firestorm_core::synth::{
    default_lexical_shift, generate, generate_suite, null_config, SynthConfig,
};
use firestorm_core::Error;

fn categories(lex: &Lexicon) -> Vec<String> {
    lex.columns().to_vec()
}

#[test]
fn default_event_fraction_and_peaks() {
    let (ds, truth) = generate(&SynthConfig::default()).unwrap();
    let f = ds.firestorm_fraction();
    assert!((0.02..=0.08).contains(&f), "fraction {f}");
    let (pin, pvol) = peaks(&ds).unwrap();
    assert!(
        truth.in_burst(pin) && truth.in_burst(pvol),
        "{pin} {pvol} {:?}",
        truth.burst
    );
    let start = start_time(&ds).unwrap();
    assert!(
        start.abs_diff(truth.start_slice) <= 4,
        "{start} vs {}",
        truth.start_slice
    );
}

#[test]
fn null_event_has_no_start() {
    let (ds, _) = generate(&null_config(&SynthConfig::default())).unwrap();
    assert!(matches!(start_time(&ds), Err(Error::NoStartFound)));
    assert!(matches!(peaks(&ds), Err(Error::NoFirestormTweets)));
}

#[test]
fn lexical_means_shift_in_configured_directions() {
    let lex = Lexicon::demo();
    for (ds, truth) in generate_suite(4, &SynthConfig::default(), 99).unwrap() {
        let table = score_dataset(&ds, &lex);
        let buckets = bucketize(&ds);
        let (a, b) = truth.burst;
        for (cat, dir) in &truth.directions {
            let col = lex.column_index(cat).unwrap();
            let s = category_series_from_table(&table, &buckets, col).unwrap();
            let v = s.series.values();
            let inside = v[a..b].iter().sum::<f64>() / (b - a) as f64;
            let outside = v[..a].iter().sum::<f64>() / a as f64;
            let got = if inside > outside {
                Direction::More
            } else {
                Direction::Less
            };
            assert_eq!(got, *dir, "{cat}: inside {inside} outside {outside}");
        }
    }
}

fn homogeneous() -> SynthConfig {
    SynthConfig {
        lexical_shift: default_lexical_shift()
            .into_iter()
            .map(|(k, [b, _])| (k, [b, b]))
            .collect(),
        ..SynthConfig::default()
    }
}

#[test]
fn homogeneous_language_has_no_component_differences() {
    let lex = Lexicon::demo();
    let (ds, truth) = generate(&homogeneous()).unwrap();
    let rows = component_split_compare(&ds, &lex, &categories(&lex), truth.burst.0..truth.burst.1)
        .unwrap();
    let significant: Vec<&str> = rows
        .iter()
        .filter(|r| r.result.as_ref().is_some_and(|t| t.significant))
        .map(|r| r.category.as_str())
        .collect();
    assert!(significant.is_empty(), "{significant:?}");
}

#[test]
fn we_enriched_core_is_detected_inside() {
    let lex = Lexicon::demo();
    let mut cfg = homogeneous();
    cfg.firestorm.we_boost = 0.05;
    let (ds, truth) = generate(&cfg).unwrap();
    let rows =
        component_split_compare(&ds, &lex, &["we".to_string()], truth.burst.0..truth.burst.1)
            .unwrap();
    let r = rows[0].result.as_ref().unwrap();
    assert!(r.significant && r.direction == Direction::More, "{r:?}");
}

#[test]
fn evaluation_uses_entity_start_and_fire_authors() {
    let lex = Lexicon::demo();
    let (ds, truth) = generate(&SynthConfig::default()).unwrap();
    let e = evaluate_event("seed42", &ds, &lex, &EvalConfig::default()).unwrap();
    let start = e.timeline.start_slice.unwrap();
    assert!(start.abs_diff(truth.start_slice) <= 4);
    let fire = ds
        .tweets
        .iter()
        .filter(|t| is_firestorm_tweet(t, &ds.label))
        .count();
    let i_row = e.ttests_all.iter().find(|c| c.category == "I").unwrap();
    assert_eq!(i_row.n_fire, fire);
    assert!(i_row.n_nonfire > 100);
    let r = i_row.result.as_ref().unwrap();
    assert!(r.significant && r.direction == Direction::Less);
    assert!(e.start_notice().is_some_and(|n| n.offset.abs() <= 6));
    assert!(e.relevance.is_some());
}
