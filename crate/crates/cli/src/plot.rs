//! SVG line plots of aggregate residual curves: linear iteration axis,
//! log-scale residual axis with one tick per decade.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// A named curve; `None` marks a missing sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

/// Reads an aggregate CSV (`k,<name>...`).
pub fn read_aggregate(path: &Path) -> Result<Vec<Series>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers = r.headers()?.clone();
    ensure!(headers.len() >= 2 && &headers[0] == "k", "{}: expected header `k,<series>...`", path.display());
    let mut series: Vec<Series> =
        headers.iter().skip(1).map(|h| Series { name: h.to_string(), values: Vec::new() }).collect();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        let k: usize = rec[0].trim().parse().with_context(|| format!("{}: row {}: bad k", path.display(), i + 2))?;
        ensure!(k == i, "{}: row {}: expected k = {i}", path.display(), i + 2);
        for (s, cell) in series.iter_mut().zip(rec.iter().skip(1)) {
            let cell = cell.trim();
            s.values.push(if cell.is_empty() {
                None
            } else {
                Some(cell.parse().with_context(|| format!("{}: row {}: bad value {cell:?}", path.display(), i + 2))?)
            });
        }
    }
    if series.iter().all(|s| s.values.is_empty()) {
        bail!("{}: no data rows", path.display());
    }
    Ok(series)
}

fn plottable(v: Option<f64>) -> Option<f64> {
    v.filter(|x| x.is_finite() && *x > 0.0)
}

/// Decade range `[lo, hi]` (exponents) covering every positive sample.
pub fn decade_range(series: &[Series]) -> (i32, i32) {
    let vals = series.iter().flat_map(|s| s.values.iter().copied().filter_map(plottable));
    let (mut min, mut max) = (f64::INFINITY, 0.0f64);
    for v in vals {
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() {
        return (0, 1);
    }
    let lo = min.log10().floor() as i32;
    let mut hi = max.log10().ceil() as i32;
    if hi <= lo {
        hi = lo + 1;
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the curves. Output depends only on the arguments.
pub fn render_svg(title: &str, series: &[Series]) -> String {
    let (lo, hi) = decade_range(series);
    let len = series.iter().map(|s| s.values.len()).max().unwrap_or(1).max(2);
    let kmax = (len - 1) as f64;
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |k: f64| LEFT + pw * k / kmax;
    let sy = |v: f64| TOP + ph * (hi as f64 - v.log10()) / (hi - lo) as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(title));

    let _ = writeln!(s, r#"<g class="y-axis">"#);
    for e in lo..=hi {
        let y = sy(10f64.powi(e));
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text class="y-tick" x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="x-axis">"#);
    let step = nice_step(kmax);
    let mut k = 0.0;
    while k <= kmax + 1e-9 {
        let x = sx(k);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#444444"/><text class="x-tick" x="{x:.2}" y="{:.2}" text-anchor="middle">{k}</text>"##,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0
        );
        k += step;
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#444444"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">iteration</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">normalized residual</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut pts = String::new();
        for (k, v) in ser.values.iter().enumerate() {
            if let Some(v) = plottable(*v) {
                let _ = write!(pts, "{}{:.2},{:.2}", if pts.is_empty() { "" } else { " " }, sx(k as f64), sy(v));
            }
        }
        let _ = writeln!(
            s,
            r#"<polyline data-series="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>"#,
            escape(&ser.name)
        );
    }

    let _ = writeln!(s, r#"<g class="legend">"#);
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let y = TOP + 14.0 + 20.0 * i as f64;
        let x = WIDTH - RIGHT + 14.0;
        let _ = writeln!(
            s,
            r#"<g class="legend-entry"><line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="3"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            x + 24.0,
            x + 30.0,
            y + 4.0,
            escape(&ser.name)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

fn nice_step(span: f64) -> f64 {
    let raw = (span / 8.0).max(1.0);
    let mag = 10f64.powf(raw.log10().floor());
    let unit = [1.0, 2.0, 5.0, 10.0].into_iter().find(|m| m * mag >= raw).unwrap_or(10.0);
    unit * mag
}
