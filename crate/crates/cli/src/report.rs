//! The `report` subcommand: static SVG charts from `evaluate` outputs.

use std::collections::BTreeMap;
use std::path::Path;

use crate::commands::{read_column, require_file, write_output};
use crate::failure::{CliResult, Failure};
use crate::svg::{bar_chart, line_chart, Bars};
use crate::ReportArgs;

struct Table {
    path: String,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> CliResult<Self> {
        require_file(path)?;
        let err = |e: csv::Error| Failure::Data(format!("{}: {e}", path.display()));
        let mut rdr = csv::Reader::from_path(path).map_err(err)?;
        let headers = rdr
            .headers()
            .map_err(err)?
            .iter()
            .map(String::from)
            .collect();
        let rows = rdr
            .records()
            .map(|r| r.map(|r| r.iter().map(String::from).collect()).map_err(err))
            .collect::<CliResult<_>>()?;
        Ok(Table {
            path: path.display().to_string(),
            headers,
            rows,
        })
    }

    fn col(&self, name: &str) -> CliResult<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Failure::Data(format!("{}: missing column `{name}`", self.path)))
    }

    fn floats(&self, name: &str) -> CliResult<Vec<f64>> {
        let i = self.col(name)?;
        Ok(self
            .rows
            .iter()
            .map(|r| r[i].parse().unwrap_or(f64::NAN))
            .collect())
    }

    fn strings(&self, name: &str) -> CliResult<Vec<String>> {
        let i = self.col(name)?;
        Ok(self.rows.iter().map(|r| r[i].clone()).collect())
    }
}

fn offsets_chart(t: &Table) -> CliResult<String> {
    let labels = t.strings("event")?;
    let series = [
        ("start", "#2c6fbb"),
        ("peak_indegree", "#e67e22"),
        ("peak_volume", "#27ae60"),
    ]
    .into_iter()
    .map(|(r, color)| {
        Ok(Bars {
            name: r,
            color,
            values: t.floats(&format!("{r}_offset_hours"))?,
        })
    })
    .collect::<CliResult<Vec<_>>>()?;
    Ok(bar_chart(
        "Offset of the nearest change point",
        "hours",
        &labels,
        &series,
    ))
}

fn ttests_chart(t: &Table, title: &str) -> CliResult<String> {
    let (cat, sig, dir) = (
        t.col("category")?,
        t.col("significant")?,
        t.col("direction")?,
    );
    let mut counts: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    let mut order = Vec::new();
    for r in &t.rows {
        let e = counts.entry(&r[cat]).or_insert_with(|| {
            order.push(r[cat].clone());
            (0.0, 0.0)
        });
        if r[sig] == "true" {
            match r[dir].as_str() {
                "more" => e.0 += 1.0,
                "less" => e.1 -= 1.0,
                _ => {}
            }
        }
    }
    let more = order.iter().map(|c| counts[c.as_str()].0).collect();
    let less = order.iter().map(|c| counts[c.as_str()].1).collect();
    Ok(bar_chart(
        title,
        "events (more up, less down)",
        &order,
        &[
            Bars {
                name: "more",
                color: "#c0392b",
                values: more,
            },
            Bars {
                name: "less",
                color: "#2c6fbb",
                values: less,
            },
        ],
    ))
}

fn predictors_chart(t: &Table) -> CliResult<String> {
    Ok(bar_chart(
        "Change points near the start per category",
        "events",
        &t.strings("category")?,
        &[Bars {
            name: "count",
            color: "#2c6fbb",
            values: t.floats("count")?,
        }],
    ))
}

fn changepoint_markers(path: &Path) -> CliResult<Vec<usize>> {
    let t = Table::read(path)?;
    let i = t.col("changepoint_index")?;
    t.rows
        .iter()
        .map(|r| {
            r[i].parse().map_err(|_| {
                Failure::Data(format!("{}: bad change point `{}`", path.display(), r[i]))
            })
        })
        .collect()
}

pub fn run(a: ReportArgs) -> CliResult {
    let dir = &a.input_dir;
    let out = a.out_dir.as_deref().unwrap_or(dir);
    let inputs = [
        "offsets.csv",
        "ttests_all.csv",
        "ttests_mention.csv",
        "predictor_counts.csv",
    ];
    for f in inputs {
        require_file(&dir.join(f))?;
    }
    for p in [&a.networks, &a.series, &a.changepoints]
        .into_iter()
        .flatten()
    {
        require_file(p)?;
    }

    let read = |f: &str| Table::read(&dir.join(f));
    let mut written = vec![];
    let mut emit = |name: &str, svg: String| -> CliResult {
        write_output(&out.join(name), &svg)?;
        written.push(name.to_string());
        Ok(())
    };

    emit("offsets.svg", offsets_chart(&read("offsets.csv")?)?)?;
    emit(
        "ttests_all.svg",
        ttests_chart(
            &read("ttests_all.csv")?,
            "Significant differences, all tweets",
        )?,
    )?;
    emit(
        "ttests_mention.svg",
        ttests_chart(
            &read("ttests_mention.csv")?,
            "Significant differences, mention tweets",
        )?,
    )?;
    emit(
        "predictor_counts.svg",
        predictors_chart(&read("predictor_counts.csv")?)?,
    )?;

    if let Some(p) = &a.networks {
        let (name, ys) = read_column(p, Some(&a.metric))?;
        emit(
            "networks.svg",
            line_chart(&format!("{name} per slice"), &name, &ys, &[]),
        )?;
    }
    if let (Some(s), Some(c)) = (&a.series, &a.changepoints) {
        let (name, ys) = read_column(s, a.column.as_deref())?;
        let markers = changepoint_markers(c)?;
        emit(
            "series.svg",
            line_chart(&format!("{name} with change points"), &name, &ys, &markers),
        )?;
    }
    println!("{} charts written to {}", written.len(), out.display());
    Ok(())
}
