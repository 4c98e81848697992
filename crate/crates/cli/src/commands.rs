use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use firestorm_core::changepoint::{pelt, standardize};
use firestorm_core::corpus::{parse_timestamp, write_jsonl, NETWORK_WINDOW};
use firestorm_core::detector::{category_series_from_table, score_dataset, STREAM_WINDOW};
use firestorm_core::evaluation::{
    evaluate_event_with_start, start_time, suite_offsets, suite_relevance,
};
use firestorm_core::network::metrics_timeline;
use firestorm_core::synth::generate_suite_with;
use firestorm_core::{
    bucketize, detect, generate, ingest, run_stream, tables, EvalConfig, EventDataset,
    EventEvaluation, GroundTruth, IngestOptions, Lexicon, Metric, NetworkKind, StreamConfig,
};
use rayon::prelude::*;
use tracing::{debug, info};

use crate::config::RunConfig;
use crate::failure::{CliResult, Failure};
use crate::{
    report, Cli, Command, DatasetOpts, DetectArgs, EvaluateArgs, IngestArgs, NetworksArgs,
    ScoreArgs, StreamArgs, SynthArgs,
};

pub fn run(cli: Cli) -> CliResult {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(n) = cli.jobs.or(cfg.jobs) {
        if n == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Internal(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Ingest(a) => cmd_ingest(&cfg, a),
        Command::Synth(a) => cmd_synth(&cfg, a),
        Command::Score(a) => cmd_score(&cfg, a),
        Command::Networks(a) => cmd_networks(&cfg, a),
        Command::Detect(a) => cmd_detect(a),
        Command::Stream(a) => cmd_stream(&cfg, a),
        Command::Evaluate(a) => cmd_evaluate(&cfg, a),
        Command::Report(a) => report::run(a),
    }
}

// ---------------------------------------------------------------------------
// shared I/O

pub fn require_file(path: &Path) -> CliResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Data(format!("{}: no such file", path.display())))
    }
}

pub fn write_output(path: &Path, contents: &str) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Data(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    debug!(path = %path.display(), bytes = contents.len(), "wrote");
    Ok(())
}

fn create_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| Failure::Data(format!("{}: {e}", dir.display())))
}

fn ingest_options(opts: &DatasetOpts, cfg: &RunConfig) -> CliResult<IngestOptions> {
    Ok(IngestOptions {
        label: opts.label.as_deref().map(str::parse).transpose()?,
        span_start: opts
            .span_start
            .as_deref()
            .map(|s| parse_timestamp(s).map_err(|e| Failure::Usage(format!("--span-start: {e}"))))
            .transpose()?,
        span_days: opts.span_days,
        strict: opts.strict || cfg.strict.unwrap_or(false),
    })
}

fn read_dataset(path: &Path, opts: &IngestOptions) -> CliResult<EventDataset> {
    let file = File::open(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let ds = ingest(BufReader::new(file), opts).map_err(|e| Failure::at(path, e))?;
    if ds.stats.malformed > 0 {
        tracing::warn!(
            path = %path.display(),
            skipped = ds.stats.malformed,
            "skipped malformed records"
        );
    }
    Ok(ds)
}

fn load_lexicon(flag: Option<&Path>, cfg: &RunConfig) -> CliResult<Lexicon> {
    match flag.or(cfg.lexicon.as_deref()) {
        None => Ok(Lexicon::demo()),
        Some(path) => {
            require_file(path)?;
            let src = fs::read_to_string(path)
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            firestorm_core::parse_lexicon(&src)
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
        }
    }
}

fn read_truth(path: &Path) -> CliResult<GroundTruth> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn write_dataset(path: &Path, ds: &EventDataset) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    let file = File::create(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    write_jsonl(ds, &mut w).map_err(|e| Failure::at(path, e))?;
    w.flush()
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn stream_config(
    cfg: &RunConfig,
    categories: Option<Vec<String>>,
    min_categories: Option<usize>,
    recency: Option<usize>,
) -> StreamConfig {
    let d = StreamConfig::default();
    StreamConfig {
        categories: categories
            .or_else(|| cfg.stream.categories.clone())
            .unwrap_or(d.categories),
        min_categories: min_categories
            .or(cfg.stream.min_categories)
            .unwrap_or(d.min_categories),
        recency: recency.or(cfg.stream.recency).unwrap_or(d.recency),
        window: cfg.stream.window.unwrap_or(d.window),
    }
}

fn check_categories(lex: &Lexicon, cats: &[String]) -> CliResult {
    lex.resolve_columns(cats)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// subcommands

fn cmd_ingest(cfg: &RunConfig, a: IngestArgs) -> CliResult {
    require_file(&a.input)?;
    let opts = ingest_options(&a.dataset, cfg)?;
    let ds = read_dataset(&a.input, &opts)?;
    write_dataset(&a.out, &ds)?;
    println!(
        "{} tweets from {} users over {} slices ({} malformed, {} out of span)",
        ds.tweets.len(),
        ds.n_users(),
        ds.n_slices(),
        ds.stats.malformed,
        ds.stats.out_of_span
    );
    Ok(())
}

fn cmd_synth(cfg: &RunConfig, a: SynthArgs) -> CliResult {
    let mut base = cfg.synth.clone();
    if let Some(m) = a.magnitude {
        base.firestorm.magnitude = m;
    }
    if let Some(dir) = &a.out_dir {
        let n = a.events.or(cfg.suite.events).unwrap_or(21);
        let seed = a.seed.or(cfg.suite.seed).unwrap_or(base.seed);
        let suite = generate_suite_with(n, &base, &cfg.suite.jitter, seed)?;
        create_dir(dir)?;
        for (i, (ds, truth)) in suite.iter().enumerate() {
            write_dataset(&dir.join(format!("event{i:02}.jsonl")), ds)?;
            write_output(
                &dir.join(format!("event{i:02}.truth.json")),
                &to_json(truth)?,
            )?;
        }
        println!("{n} events written to {}", dir.display());
        return Ok(());
    }
    let Some(out) = &a.out else {
        return Err(Failure::Usage("synth needs --out or --out-dir".into()));
    };
    if let Some(seed) = a.seed {
        base.seed = seed;
    }
    let (ds, truth) = generate(&base)?;
    write_dataset(out, &ds)?;
    if let Some(t) = &a.truth {
        write_output(t, &to_json(&truth)?)?;
    }
    println!(
        "{} tweets, {:.2}% labelled, burst slices {}..{}",
        ds.tweets.len(),
        100.0 * ds.firestorm_fraction(),
        truth.burst.0,
        truth.burst.1
    );
    Ok(())
}

fn cmd_score(cfg: &RunConfig, a: ScoreArgs) -> CliResult {
    require_file(&a.input)?;
    let lex = load_lexicon(a.lexicon.as_deref(), cfg)?;
    let cats = a
        .categories
        .clone()
        .unwrap_or_else(|| lex.columns().to_vec());
    let cols = lex.resolve_columns(&cats)?;
    let ds = read_dataset(&a.input, &ingest_options(&a.dataset, cfg)?)?;
    let buckets = bucketize(&ds);
    let table = score_dataset(&ds, &lex);

    let csv = if a.per_tweet {
        let mut out = String::from("id,author,slice");
        for c in &cats {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for s in 0..buckets.n_slices() {
            for i in buckets.range(s) {
                let t = &ds.tweets[i];
                let _ = write!(out, "{},{},{s}", t.id, t.author);
                for &c in &cols {
                    let _ = write!(out, ",{:.6}", table.get(i, c));
                }
                out.push('\n');
            }
        }
        out
    } else {
        let series = cols
            .par_iter()
            .map(|&c| category_series_from_table(&table, &buckets, c))
            .collect::<Result<Vec<_>, _>>()?;
        let counts: Vec<usize> = (0..buckets.n_slices()).map(|s| buckets.len_of(s)).collect();
        tables::category_series_csv(&series, &counts)
    };
    write_output(&a.out, &csv)
}

fn cmd_networks(cfg: &RunConfig, a: NetworksArgs) -> CliResult {
    require_file(&a.input)?;
    let kind: NetworkKind = a
        .kind
        .as_deref()
        .or(cfg.networks.kind.as_deref())
        .unwrap_or("mention")
        .parse()?;
    let window = a.window.or(cfg.networks.window).unwrap_or(NETWORK_WINDOW);
    if window == 0 {
        return Err(Failure::Usage("--window must be at least 1".into()));
    }
    let metric: Option<Metric> = a.metric.as_deref().map(str::parse).transpose()?;
    let ds = read_dataset(&a.input, &ingest_options(&a.dataset, cfg)?)?;
    let timeline = metrics_timeline(&ds, kind, window);
    let csv = match metric {
        Some(m) => {
            let mut out = String::from("slice,value\n");
            for (s, row) in timeline.iter().enumerate() {
                let _ = writeln!(out, "{s},{:.6}", row.get(m));
            }
            out
        }
        None => tables::network_csv(&timeline),
    };
    write_output(&a.out, &csv)
}

/// Read one numeric column of a CSV file.
pub fn read_column(path: &Path, column: Option<&str>) -> CliResult<(String, Vec<f64>)> {
    require_file(path)?;
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let headers = rdr
        .headers()
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?
        .clone();
    let idx = match column {
        Some(c) => headers
            .iter()
            .position(|h| h == c)
            .ok_or_else(|| Failure::Usage(format!("{}: no column `{c}`", path.display())))?,
        None => headers
            .len()
            .checked_sub(1)
            .ok_or_else(|| Failure::Data(format!("{}: empty header", path.display())))?,
    };
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        // header is line 1
        let line = i + 2;
        let rec =
            rec.map_err(|e| Failure::Data(format!("{}: line {line}: {e}", path.display())))?;
        let field = rec.get(idx).unwrap_or("");
        let v: f64 = field.trim().parse().map_err(|_| {
            Failure::Data(format!(
                "{}: line {line}: `{field}` is not a number",
                path.display()
            ))
        })?;
        values.push(v);
    }
    Ok((headers[idx].to_string(), values))
}

fn default_counts_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("changepoints");
    out.with_file_name(format!("{stem}.counts.csv"))
}

fn cmd_detect(a: DetectArgs) -> CliResult {
    let fixed = match a.penalty.as_str() {
        "auto" => None,
        p => Some(
            p.parse::<f64>()
                .ok()
                .filter(|p| p.is_finite() && *p > 0.0)
                .ok_or_else(|| {
                    Failure::Usage(format!(
                        "--penalty: expected `auto` or a positive number, got `{p}`"
                    ))
                })?,
        ),
    };
    let (name, y) = read_column(&a.series, a.column.as_deref())?;
    let (result, elbow) = match fixed {
        None => {
            let d = detect(&y).map_err(|e| Failure::at(&a.series, e))?;
            (d.result, d.elbow)
        }
        Some(p) => {
            let d = detect(&y).map_err(|e| Failure::at(&a.series, e))?;
            (pelt(&standardize(&y), p)?, d.elbow)
        }
    };
    let mut out = String::from("changepoint_index,penalty,total_cost\n");
    for cp in &result.changepoints {
        let _ = writeln!(out, "{cp},{:.6},{:.6}", result.penalty, result.total_cost);
    }
    write_output(&a.out, &out)?;
    let counts = a.counts.unwrap_or_else(|| default_counts_path(&a.out));
    write_output(&counts, &tables::penalty_counts_csv(&name, &elbow))?;
    println!(
        "{}: {} change points at penalty {}",
        name,
        result.changepoints.len(),
        result.penalty
    );
    Ok(())
}

fn cmd_stream(cfg: &RunConfig, a: StreamArgs) -> CliResult {
    require_file(&a.input)?;
    if let Some(t) = &a.truth {
        require_file(t)?;
    }
    let lex = load_lexicon(a.lexicon.as_deref(), cfg)?;
    let scfg = stream_config(cfg, a.categories.clone(), a.min_categories, a.recency);
    check_categories(&lex, &scfg.categories)?;
    let ds = read_dataset(&a.input, &ingest_options(&a.dataset, cfg)?)?;
    let run = run_stream(&ds, &lex, &scfg).map_err(|e| Failure::at(&a.input, e))?;
    write_output(&a.out, &tables::stream_csv(&run))?;
    info!(
        ticks = run.reports.len(),
        alerts = run.alert_count(),
        "stream replayed"
    );

    if let Some(path) = &a.summary {
        let reference = match (a.reference, &a.truth) {
            (Some(r), _) => r,
            (None, Some(t)) => read_truth(t)?.start_slice,
            (None, None) => start_time(&ds).map_err(|e| Failure::at(&a.input, e))?,
        };
        let horizon = cfg.evaluate.horizon.unwrap_or(STREAM_WINDOW - 1);
        write_output(path, &to_json(&run.summarize(reference, horizon))?)?;
    }
    println!(
        "{} ticks, {} alerts ({:.2}%)",
        run.reports.len(),
        run.alert_count(),
        100.0 * run.alert_rate()
    );
    Ok(())
}

fn event_name(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("event")
        .to_string()
}

fn events_csv(events: &[EventEvaluation]) -> String {
    let mut out = String::from("event,label,n_tweets,n_users,firestorm_fraction,alert_rate\n");
    for e in events {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{:.6}",
            e.name, e.label, e.n_tweets, e.n_users, e.firestorm_fraction, e.alert_rate
        );
    }
    out
}

fn cmd_evaluate(cfg: &RunConfig, a: EvaluateArgs) -> CliResult {
    if !a.truth.is_empty() && a.truth.len() != a.input.len() {
        return Err(Failure::Usage(format!(
            "--truth given {} times for {} inputs",
            a.truth.len(),
            a.input.len()
        )));
    }
    for p in a.input.iter().chain(&a.truth) {
        require_file(p)?;
    }
    let mut names: Vec<String> = a.input.iter().map(|p| event_name(p)).collect();
    names.sort();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Failure::Usage("input file names must be distinct".into()));
    }

    let lex = load_lexicon(a.lexicon.as_deref(), cfg)?;
    let d = EvalConfig::default();
    let ecfg = EvalConfig {
        stream: stream_config(cfg, a.categories.clone(), a.min_categories, None),
        horizon: a.horizon.or(cfg.evaluate.horizon).unwrap_or(d.horizon),
        tolerance: a
            .tolerance
            .or(cfg.evaluate.tolerance)
            .unwrap_or(d.tolerance),
        test_categories: cfg.evaluate.test_categories.clone(),
        relevance_categories: cfg.evaluate.relevance_categories.clone(),
    };
    check_categories(&lex, &ecfg.stream.categories)?;
    check_categories(&lex, &ecfg.test_columns(&lex))?;
    let relevance_cols = ecfg.relevance_columns(&lex);
    check_categories(&lex, &relevance_cols)?;
    let opts = IngestOptions {
        strict: a.strict || cfg.strict.unwrap_or(false),
        ..IngestOptions::default()
    };

    let events: Vec<EventEvaluation> = a
        .input
        .par_iter()
        .enumerate()
        .map(|(i, path)| {
            let ds = read_dataset(path, &opts)?;
            let start = match a.truth.get(i) {
                Some(t) => Some(read_truth(t)?.start_slice),
                None => None,
            };
            let e = evaluate_event_with_start(&event_name(path), &ds, &lex, &ecfg, start)
                .map_err(|e| Failure::at(path, e))?;
            info!(event = %e.name, start = ?e.timeline.start_slice, "evaluated");
            Ok(e)
        })
        .collect::<CliResult<_>>()?;

    let dir = &a.out_dir;
    create_dir(dir)?;
    write_output(&dir.join("events.csv"), &events_csv(&events))?;
    write_output(&dir.join("offsets.csv"), &tables::offsets_csv(&events))?;
    write_output(
        &dir.join("offsets_summary.csv"),
        &tables::offsets_summary_csv(&suite_offsets(&events)),
    )?;
    write_output(
        &dir.join("ttests_all.csv"),
        &tables::ttests_csv(&events, false),
    )?;
    write_output(
        &dir.join("ttests_mention.csv"),
        &tables::ttests_csv(&events, true),
    )?;
    let counts = suite_relevance(&events, &relevance_cols, ecfg.tolerance);
    write_output(
        &dir.join("predictor_counts.csv"),
        &tables::predictor_counts_csv(&counts, events.len(), ecfg.tolerance),
    )?;
    println!("{} events evaluated into {}", events.len(), dir.display());
    Ok(())
}
