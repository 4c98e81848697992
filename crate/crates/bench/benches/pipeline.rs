use criterion::{criterion_group, criterion_main, Criterion};
use firestorm_core::detector::{run_stream, StreamConfig};
use firestorm_core::lexicon::Lexicon;
use firestorm_core::network::{metrics_timeline, NetworkKind};
use firestorm_core::synth::{generate, SynthConfig};

fn bench_pipeline(c: &mut Criterion) {
    let cfg = SynthConfig {
        base_rate: 12.0,
        ..SynthConfig::default()
    };
    let (ds, _) = generate(&cfg).unwrap();
    let lex = Lexicon::demo();
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10);
    g.bench_function("synth_generate", |b| b.iter(|| generate(&cfg).unwrap()));
    g.bench_function("score_dataset", |b| {
        b.iter(|| firestorm_core::detector::score_dataset(&ds, &lex))
    });
    g.bench_function("mention_metrics_timeline", |b| {
        b.iter(|| metrics_timeline(&ds, NetworkKind::Mention, 24))
    });
    g.bench_function("stream_full_event", |b| {
        b.iter(|| run_stream(&ds, &lex, &StreamConfig::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
