//! Deterministic SVG charts from the CSV artifacts.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 5;
const HISTOGRAM_BINS: usize = 20;
const COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    RiskVsM,
    Scaling,
    GapHistogram,
}

impl PlotKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "risk-vs-m" => Ok(PlotKind::RiskVsM),
            "scaling" => Ok(PlotKind::Scaling),
            "gap-histogram" => Ok(PlotKind::GapHistogram),
            other => Err(LabError::param("kind", format!("unknown plot kind `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::RiskVsM => "risk-vs-m",
            PlotKind::Scaling => "scaling",
            PlotKind::GapHistogram => "gap-histogram",
        }
    }

    /// Columns the input CSV must contain.
    pub fn required_columns(self) -> &'static [&'static str] {
        match self {
            PlotKind::RiskVsM => &["m", "risk_h", "risk_hi"],
            PlotKind::Scaling => &["n", "exhaustive_seconds", "expansion_seconds"],
            PlotKind::GapHistogram => &["risk_gap"],
        }
    }
}

/// Numeric columns of a CSV file, keyed by header name.
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let headers = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(|s| s.trim().to_string()).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        Ok(Table { headers, rows })
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| LabError::Schema(format!("missing column `{name}`")))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.index(name)?;
        self.rows
            .iter()
            .map(|row| {
                let cell = row.get(i).map(String::as_str).unwrap_or("");
                cell.parse::<f64>()
                    .map_err(|_| LabError::Schema(format!("column `{name}`: `{cell}` is not a number")))
            })
            .collect()
    }

    fn flags(&self, name: &str) -> Option<Vec<bool>> {
        let i = self.index(name).ok()?;
        Some(self.rows.iter().map(|row| row.get(i).is_some_and(|c| c == "true")).collect())
    }
}

struct Axis {
    label: String,
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(label: impl Into<String>, values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            let v = if log { v.log10() } else { v };
            (a.min(v), b.max(v))
        });
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        } else {
            let pad = (hi - lo) * 0.05;
            lo -= pad;
            hi += pad;
        }
        Axis { label: label.into(), lo, hi, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn tick_label(&self, t: f64) -> String {
        if self.log {
            format!("1e{t:.1}")
        } else if t.abs() >= 1e4 || (t != 0.0 && t.abs() < 1e-3) {
            format!("{t:.2e}")
        } else {
            format!("{t:.3}")
        }
    }
}

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
    hollow: Vec<bool>,
}

fn px(x: &Axis, v: f64) -> f64 {
    LEFT + x.frac(v) * (WIDTH - LEFT - RIGHT)
}

fn py(y: &Axis, v: f64) -> f64 {
    HEIGHT - BOTTOM - y.frac(v) * (HEIGHT - TOP - BOTTOM)
}

fn frame(svg: &mut String, title: &str, x: &Axis, y: &Axis) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{title}</text>"#, WIDTH / 2.0);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(svg, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black"/>"#);
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let tx = x.lo + f * (x.hi - x.lo);
        let sx = x0 + f * (x1 - x0);
        let _ = writeln!(svg, r#"<line x1="{sx:.2}" y1="{y0:.2}" x2="{sx:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(svg, r#"<text x="{sx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 20.0, x.tick_label(tx));
        let ty = y.lo + f * (y.hi - y.lo);
        let sy = y0 - f * (y0 - y1);
        let _ = writeln!(svg, r#"<line x1="{:.2}" y1="{sy:.2}" x2="{x0:.2}" y2="{sy:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, sy + 4.0, y.tick_label(ty));
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 20.0, x.label);
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        y.label
    );
}

fn line_chart(title: &str, x: &Axis, y: &Axis, series: &[Series]) -> String {
    let mut svg = String::new();
    frame(&mut svg, title, x, y);
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = s.points.iter().map(|&(a, b)| format!("{:.2},{:.2}", px(x, a), py(y, b))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-name="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            s.name,
            path.join(" ")
        );
        for (i, &(a, b)) in s.points.iter().enumerate() {
            let fill = if s.hollow.get(i).copied().unwrap_or(false) { "white" } else { color };
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{fill}" stroke="{color}"/>"#, px(x, a), py(y, b));
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let _ = writeln!(svg, r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, WIDTH - 220.0, WIDTH - 195.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, WIDTH - 188.0, ly + 4.0, s.name);
    }
    svg.push_str("</svg>\n");
    svg
}

fn histogram(values: &[f64], column: &str) -> String {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi - lo < 1e-12 { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    let mut counts = [0usize; HISTOGRAM_BINS];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1);
        counts[b] += 1;
    }
    let x = Axis { label: format!("{column} (risk difference)"), lo, hi, log: false };
    let top = *counts.iter().max().unwrap_or(&1) as f64;
    let y = Axis { label: "trials (count)".into(), lo: 0.0, hi: top * 1.05, log: false };
    let mut svg = String::new();
    frame(&mut svg, &format!("gap histogram: {column}"), &x, &y);
    for (b, &c) in counts.iter().enumerate() {
        let a = lo + b as f64 * width;
        let (x0, x1) = (px(&x, a), px(&x, a + width));
        let (y0, y1) = (py(&y, 0.0), py(&y, c as f64));
        let _ = writeln!(
            svg,
            r#"<rect class="bar" x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="{}" stroke="white"/>"#,
            (x1 - x0).max(0.0),
            (y0 - y1).max(0.0),
            COLORS[0]
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Renders `table` as the chart `kind`. `log` switches the scaling chart's
/// time axis to log10.
pub fn render(table: &Table, kind: PlotKind, log: bool) -> Result<String> {
    for c in kind.required_columns() {
        table.index(c).map_err(|_| LabError::Schema(format!("{} plot needs column `{c}`", kind.name())))?;
    }
    if table.rows.is_empty() {
        return Err(LabError::Schema("no data rows".into()));
    }
    match kind {
        PlotKind::RiskVsM => {
            let m = table.column("m")?;
            let series = [("risk_h", "ERM over H"), ("risk_hi", "ERM over H_I")]
                .iter()
                .map(|(col, name)| {
                    Ok(Series {
                        name: name.to_string(),
                        points: m.iter().copied().zip(table.column(col)?).collect(),
                        hollow: Vec::new(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let x = Axis::new("m (examples)", m.iter().copied(), false);
            let y = Axis::new("mean risk (probability)", series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), false);
            Ok(line_chart("risk vs sample size", &x, &y, &series))
        }
        PlotKind::Scaling => {
            let n = table.column("n")?;
            let projected = table.flags("exhaustive_projected").unwrap_or_default();
            let exhaustive = table.column("exhaustive_seconds")?;
            let expansion = table.column("expansion_seconds")?;
            if log && exhaustive.iter().chain(&expansion).any(|&v| v <= 0.0) {
                return Err(LabError::Schema("log scale needs positive times".into()));
            }
            let series = vec![
                Series { name: "exhaustive ERM".into(), points: n.iter().copied().zip(exhaustive).collect(), hollow: projected },
                Series { name: "expansion learner".into(), points: n.iter().copied().zip(expansion).collect(), hollow: Vec::new() },
            ];
            let x = Axis::new("n (variables)", n.iter().copied(), false);
            let label = if log { "time (seconds, log10)" } else { "time (seconds)" };
            let y = Axis::new(label, series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), log);
            Ok(line_chart("learner runtime", &x, &y, &series))
        }
        PlotKind::GapHistogram => Ok(histogram(&table.column("risk_gap")?, "risk_gap")),
    }
}

pub fn plot_file(csv: &Path, kind: PlotKind, log: bool, out: &Path) -> Result<()> {
    let svg = render(&Table::read(csv)?, kind, log)?;
    std::fs::write(out, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(text: &str) -> Table {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        std::fs::write(&p, text).unwrap();
        Table::read(&p).unwrap()
    }

    #[test]
    fn header_only_is_rejected() {
        let err = render(&table("trial,estdecr,emp_gap,gen_gap,risk_gap\n"), PlotKind::GapHistogram, false).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("no data rows"));
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let err = render(&table("a,b\n1,2\n"), PlotKind::Scaling, false).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn scaling_has_two_series_and_is_stable() {
        let t = table("n,class_cardinality,expanded_dim,exhaustive_seconds,exhaustive_projected,expansion_seconds\n2,729,64,0.001,false,0.0001\n3,19683,216,0.03,false,0.0002\n6,387420489,1728,500,true,0.001\n");
        let a = render(&t, PlotKind::Scaling, true).unwrap();
        assert_eq!(a.matches(r#"class="series""#).count(), 2);
        assert!(a.contains(r#"width="800" height="600""#));
        assert_eq!(a, render(&t, PlotKind::Scaling, true).unwrap());
    }

    #[test]
    fn histogram_of_constant_column() {
        let t = table("trial,estdecr,emp_gap,gen_gap,risk_gap\n0,0,0,0,0\n1,0,0,0,0\n");
        let svg = render(&t, PlotKind::GapHistogram, false).unwrap();
        assert_eq!(svg.matches(r#"class="bar""#).count(), HISTOGRAM_BINS);
    }
}
