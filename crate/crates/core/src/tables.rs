//! CSV renderings of pipeline outputs. Every table starts with a header row
//! and uses fixed float formats so reruns are byte-identical.

use std::fmt::Write;

use crate::changepoint::{ChangePointResult, ElbowSelection};
use crate::detector::{CategorySeries, StreamRun};
use crate::evaluation::{CategoryComparison, EventEvaluation, OffsetStats, HOURS_PER_SLICE};
use crate::network::{Metric, NetworkMetrics};

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per event: for each reference slice (start, in-degree peak,
/// volume peak) the nearest fresh change point, its offset and latency.
pub fn offsets_csv(events: &[EventEvaluation]) -> String {
    let mut out = String::from("event,label");
    for r in ["start", "peak_indegree", "peak_volume"] {
        let _ = write!(
            out,
            ",{r}_slice,{r}_changepoint,{r}_offset_hours,{r}_latency_slices"
        );
    }
    out.push('\n');
    for e in events {
        let _ = write!(out, "{},{}", e.name, e.label);
        for (summary, slice) in [
            (&e.start, e.timeline.start_slice),
            (&e.peak_indegree, e.timeline.peak_indegree_slice),
            (&e.peak_volume, e.timeline.peak_volume_slice),
        ] {
            let n = summary.as_ref().and_then(|s| s.aggregate);
            let _ = write!(
                out,
                ",{},{},{},{}",
                opt(slice),
                opt(n.map(|n| n.changepoint)),
                n.map(|n| format!("{:.1}", n.offset as f64 * HOURS_PER_SLICE))
                    .unwrap_or_default(),
                opt(n.map(|n| n.latency)),
            );
        }
        out.push('\n');
    }
    out
}

pub fn offsets_summary_csv(stats: &[(&str, OffsetStats)]) -> String {
    let mut out = String::from("reference,n_detected,n_excluded,mean_hours,sd_hours,sd_defined\n");
    for (name, s) in stats {
        let _ = writeln!(
            out,
            "{name},{},{},{},{},{}",
            s.offsets.len(),
            s.excluded,
            f6(s.mean_hours),
            f6(s.sd_hours),
            s.sd_defined
        );
    }
    out
}

fn ttest_rows(out: &mut String, event: &str, rows: &[CategoryComparison]) {
    for c in rows {
        let _ = write!(out, "{event},{},{},{},", c.category, c.n_fire, c.n_nonfire);
        match &c.result {
            Some(r) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{:.6e},{},{}",
                    f6(r.mean_fire),
                    f6(r.mean_nonfire),
                    f6(r.t_statistic),
                    f6(r.dof),
                    r.p_value,
                    r.significant,
                    r.direction.as_str()
                );
            }
            None => out.push_str(",,,,,,skipped\n"),
        }
    }
}

pub const TTEST_HEADER: &str =
    "event,category,n_fire,n_nonfire,mean_fire,mean_nonfire,t,dof,p,significant,direction\n";

/// Per-event t-tests; `mention_only` selects the mention-tweet variant.
pub fn ttests_csv(events: &[EventEvaluation], mention_only: bool) -> String {
    let mut out = String::from(TTEST_HEADER);
    for e in events {
        let rows = if mention_only {
            &e.ttests_mention
        } else {
            &e.ttests_all
        };
        ttest_rows(&mut out, &e.name, rows);
    }
    out
}

pub fn comparisons_csv(event: &str, rows: &[CategoryComparison]) -> String {
    let mut out = String::from(TTEST_HEADER);
    ttest_rows(&mut out, event, rows);
    out
}

pub fn predictor_counts_csv(
    counts: &[(String, usize)],
    n_events: usize,
    tolerance: usize,
) -> String {
    let mut out = String::from("category,count,n_events,tolerance\n");
    for (c, n) in counts {
        let _ = writeln!(out, "{c},{n},{n_events},{tolerance}");
    }
    out
}

pub fn network_csv(timeline: &[NetworkMetrics]) -> String {
    let mut out = String::from("slice");
    for m in Metric::ALL {
        out.push(',');
        out.push_str(m.name());
    }
    out.push('\n');
    for (s, row) in timeline.iter().enumerate() {
        let _ = write!(out, "{s}");
        for m in Metric::ALL {
            let _ = write!(out, ",{}", f6(row.get(m)));
        }
        out.push('\n');
    }
    out
}

/// Per-slice category means with the gap marker of each slice.
pub fn category_series_csv(series: &[CategorySeries], counts: &[usize]) -> String {
    let mut out = String::from("slice,n_tweets,gap");
    for s in series {
        out.push(',');
        out.push_str(&s.series.name);
    }
    out.push('\n');
    for (i, n) in counts.iter().enumerate() {
        let gap = series.first().map_or("observed", |s| s.gaps[i].as_str());
        let _ = write!(out, "{i},{n},{gap}");
        for s in series {
            let _ = write!(out, ",{}", f6(s.series.values()[i]));
        }
        out.push('\n');
    }
    out
}

pub fn changepoints_csv(series: &str, result: &ChangePointResult) -> String {
    let mut out = String::from("series,changepoint,penalty\n");
    for cp in &result.changepoints {
        let _ = writeln!(out, "{series},{cp},{:.1}", result.penalty);
    }
    out
}

/// Change-point count per penalty, with the elbow choice marked.
pub fn penalty_counts_csv(series: &str, elbow: &ElbowSelection) -> String {
    let mut out = String::from("series,penalty,count,selected,degenerate\n");
    for (i, (p, c)) in elbow.penalties.iter().zip(&elbow.counts).enumerate() {
        let _ = writeln!(
            out,
            "{series},{p:.1},{c},{},{}",
            i == elbow.selected,
            elbow.degenerate
        );
    }
    out
}

/// One row per (tick, category, reported change point); categories without
/// change points get a single row with an empty change point.
pub fn stream_csv(run: &StreamRun) -> String {
    let mut out = String::from("tick,category,changepoint_abs_slice,fresh,alert\n");
    for r in &run.reports {
        for c in &r.categories {
            if c.changepoints.is_empty() {
                let _ = writeln!(out, "{},{},,{},{}", r.t, c.category, c.fresh, r.alert);
            }
            for cp in &c.changepoints {
                let _ = writeln!(out, "{},{},{cp},{},{}", r.t, c.category, c.fresh, r.alert);
            }
        }
    }
    out
}
