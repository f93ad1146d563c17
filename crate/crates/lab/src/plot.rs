//! Log-log SVG plots: measured points from a CSV plus reference lines.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};
use crate::table::read_column;

/// A polyline drawn over the measured points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

/// What to draw; stored in the report so plots can be re-rendered from CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub title: String,
    pub csv: String,
    pub x: String,
    pub y: String,
    pub x_label: String,
    pub y_label: String,
    pub lines: Vec<Line>,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLOURS: [&str; 4] = ["#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    /// Decade-padded log10 range covering `values`.
    fn fit(values: impl Iterator<Item = f64>) -> Option<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| *v > 0.0 && v.is_finite()) {
            lo = lo.min(v.log10());
            hi = hi.max(v.log10());
        }
        if !lo.is_finite() {
            return None;
        }
        if hi - lo < 1e-9 {
            lo -= 0.5;
            hi += 0.5;
        }
        Some(Self { lo: lo.floor(), hi: hi.ceil() })
    }

    fn frac(&self, v: f64) -> f64 {
        (v.log10() - self.lo) / (self.hi - self.lo)
    }
}

/// Renders the plot for the CSV in `dir`.
pub fn render(spec: &PlotSpec, dir: &Path) -> LabResult<String> {
    let path = dir.join(&spec.csv);
    let xs = read_column(&path, &spec.x)?;
    let ys = read_column(&path, &spec.y)?;
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(&ys)
        .filter_map(|(x, y)| Some((((*x)?), (*y)?)))
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .collect();
    let all = pts.iter().copied().chain(spec.lines.iter().flat_map(|l| l.points.iter().copied()));
    let (ax, ay): (Vec<f64>, Vec<f64>) = all.unzip();
    let xa = Axis::fit(ax.into_iter()).ok_or_else(|| LabError::validation(&spec.x, "nothing positive to plot"))?;
    let ya = Axis::fit(ay.into_iter()).ok_or_else(|| LabError::validation(&spec.y, "nothing positive to plot"))?;
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let px = |x: f64| LEFT + xa.frac(x) * pw;
    let py = |y: f64| TOP + (1.0 - ya.frac(y)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, esc(&spec.title));
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for d in xa.lo as i32..=xa.hi as i32 {
        let x = LEFT + (d as f64 - xa.lo) / (xa.hi - xa.lo) * pw;
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{}" stroke="#ddd"/>"##, TOP + ph);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{d}</text>"#, TOP + ph + 16.0);
    }
    for d in ya.lo as i32..=ya.hi as i32 {
        let y = TOP + (1.0 - (d as f64 - ya.lo) / (ya.hi - ya.lo)) * ph;
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"#, LEFT - 6.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 12.0, esc(&spec.x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        esc(&spec.y_label)
    );
    for (x, y) in &pts {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f77b4"/>"##, px(*x), py(*y));
    }
    for (i, l) in spec.lines.iter().enumerate() {
        let c = COLOURS[i % COLOURS.len()];
        let path: Vec<String> = l
            .points
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        let dash = if l.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.5"{dash}/>"#, path.join(" "));
        let ly = TOP + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{c}" stroke-width="1.5"{dash}/><text x="{3}" y="{4}">{5}</text>"#,
            LEFT + 10.0,
            ly,
            LEFT + 34.0,
            LEFT + 40.0,
            ly + 4.0,
            esc(&l.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write(spec: &PlotSpec, dir: &Path, name: &str) -> LabResult<()> {
    let svg = render(spec, dir)?;
    let path = dir.join(name);
    std::fs::write(&path, svg).map_err(|e| LabError::io(path, e))
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
