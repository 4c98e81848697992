//! Minimal static SVG charts: grouped bars and a single line with markers.

use std::fmt::Write;

const HEIGHT: f64 = 360.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 96.0;

pub struct Bars<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub values: Vec<f64>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

struct Frame {
    width: f64,
    lo: f64,
    hi: f64,
}

impl Frame {
    fn new(width: f64, values: impl Iterator<Item = f64>, include_zero: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if include_zero {
            lo = lo.min(0.0);
            hi = hi.max(0.0);
        }
        if hi - lo < 1e-12 {
            hi = lo + 1.0;
        }
        Frame { width, lo, hi }
    }

    fn y(&self, v: f64) -> f64 {
        TOP + (self.hi - v) / (self.hi - self.lo) * (HEIGHT - TOP - BOTTOM)
    }

    fn open(&self, out: &mut String, title: &str, y_label: &str) {
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{HEIGHT}" viewBox="0 0 {w} {HEIGHT}" font-family="sans-serif" font-size="11">"#,
            w = self.width
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            self.width / 2.0,
            escape(title)
        );
        let mid = (TOP + HEIGHT - BOTTOM) / 2.0;
        let _ = writeln!(
            out,
            r#"<text x="14" y="{mid}" text-anchor="middle" transform="rotate(-90 14 {mid})">{}</text>"#,
            escape(y_label)
        );
        for k in 0..=4 {
            let v = self.lo + (self.hi - self.lo) * k as f64 / 4.0;
            let y = self.y(v);
            let _ = writeln!(
                out,
                r##"<line x1="{LEFT}" x2="{}" y1="{y:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">{}</text>"##,
                self.width - RIGHT,
                LEFT - 4.0,
                y + 4.0,
                fmt_tick(v)
            );
        }
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" x2="{LEFT}" y1="{TOP}" y2="{}" stroke="#333"/>"##,
            HEIGHT - BOTTOM
        );
    }
}

/// Grouped bars, one group per label, drawn from a zero baseline.
pub fn bar_chart(title: &str, y_label: &str, labels: &[String], series: &[Bars]) -> String {
    let group = (series.len() as f64 * 12.0 + 8.0).max(20.0);
    let width = (LEFT + RIGHT + group * labels.len() as f64).max(480.0);
    let frame = Frame::new(
        width,
        series.iter().flat_map(|s| s.values.iter().copied()),
        true,
    );
    let mut out = String::new();
    frame.open(&mut out, title, y_label);
    let slot = (width - LEFT - RIGHT) / labels.len().max(1) as f64;
    let bar = (slot - 8.0) / series.len().max(1) as f64;
    let zero = frame.y(0.0);
    for (i, label) in labels.iter().enumerate() {
        let x0 = LEFT + slot * i as f64 + 4.0;
        for (j, s) in series.iter().enumerate() {
            let Some(&v) = s.values.get(i).filter(|v| v.is_finite()) else {
                continue;
            };
            let y = frame.y(v);
            let _ = writeln!(
                out,
                r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{}"><title>{}: {}</title></rect>"#,
                x0 + bar * j as f64,
                y.min(zero),
                bar.max(1.0),
                (y - zero).abs(),
                s.color,
                escape(label),
                fmt_tick(v)
            );
        }
        let lx = x0 + slot / 2.0 - 4.0;
        let ly = HEIGHT - BOTTOM + 12.0;
        let _ = writeln!(
            out,
            r#"<text x="{lx:.1}" y="{ly}" text-anchor="end" transform="rotate(-45 {lx:.1} {ly})">{}</text>"#,
            escape(label)
        );
    }
    let _ = writeln!(
        out,
        r##"<line x1="{LEFT}" x2="{}" y1="{zero:.1}" y2="{zero:.1}" stroke="#333"/>"##,
        width - RIGHT
    );
    legend(&mut out, width, series.iter().map(|s| (s.name, s.color)));
    out.push_str("</svg>\n");
    out
}

fn legend<'a>(out: &mut String, width: f64, items: impl Iterator<Item = (&'a str, &'a str)>) {
    for (k, (name, color)) in items.enumerate() {
        let y = TOP + 14.0 * k as f64;
        let x = width - RIGHT - 110.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{}" width="10" height="10" fill="{color}"/><text x="{}" y="{}">{}</text>"#,
            y - 9.0,
            x + 14.0,
            y,
            escape(name)
        );
    }
}

/// One series against its index, with optional vertical markers.
pub fn line_chart(title: &str, y_label: &str, ys: &[f64], markers: &[usize]) -> String {
    let width = 900.0;
    let frame = Frame::new(width, ys.iter().copied(), false);
    let mut out = String::new();
    frame.open(&mut out, title, y_label);
    let n = ys.len().max(2) - 1;
    let x = |i: usize| LEFT + (width - LEFT - RIGHT) * i as f64 / n as f64;
    for &m in markers.iter().filter(|&&m| m < ys.len()) {
        let _ = writeln!(
            out,
            r##"<line x1="{0:.1}" x2="{0:.1}" y1="{TOP}" y2="{1}" stroke="#c0392b" stroke-dasharray="4 3"/>"##,
            x(m),
            HEIGHT - BOTTOM
        );
    }
    let mut path = String::new();
    for (i, &v) in ys.iter().enumerate().filter(|(_, v)| v.is_finite()) {
        let _ = write!(
            path,
            "{}{:.1},{:.1} ",
            if path.is_empty() { "M" } else { "L" },
            x(i),
            frame.y(v)
        );
    }
    let _ = writeln!(
        out,
        r##"<path d="{}" fill="none" stroke="#2c6fbb" stroke-width="1.2"/>"##,
        path.trim_end()
    );
    let step = (ys.len() / 10).max(1);
    for i in (0..ys.len()).step_by(step) {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{i}</text>"#,
            x(i),
            HEIGHT - BOTTOM + 14.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">slice</text>"#,
        (LEFT + width - RIGHT) / 2.0,
        HEIGHT - BOTTOM + 32.0
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bars_below_zero_hang_from_baseline() {
        let svg = bar_chart(
            "t",
            "y",
            &["a".into(), "b".into()],
            &[Bars {
                name: "s",
                color: "#000",
                values: vec![2.0, -2.0],
            }],
        );
        assert_eq!(svg.matches("<rect x=").count(), 3);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn labels_escaped() {
        let svg = line_chart("a<b & c", "y", &[1.0, 2.0, 3.0], &[1]);
        assert!(svg.contains("a&lt;b &amp; c"));
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn tick_format() {
        assert_eq!(fmt_tick(2.50), "2.5");
        assert_eq!(fmt_tick(-0.0001), "0");
        assert_eq!(fmt_tick(3.0), "3");
    }
}
