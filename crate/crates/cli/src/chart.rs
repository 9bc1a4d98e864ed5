//! Minimal standalone SVG line charts.

use std::fmt::Write as _;
use std::path::Path;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 58.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dashed: bool,
    /// Palette index; series without one take the next free colour.
    pub color: Option<usize>,
}

impl Series {
    pub fn new(label: impl Into<String>, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { label: label.into(), x, y, dashed: false, color: None }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }

    pub fn color(mut self, index: usize) -> Self {
        self.color = Some(index);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl LineChart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), series: Vec::new() }
    }

    pub fn with(mut self, series: Series) -> Self {
        self.series.push(series);
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ChartError {
    #[error("chart has no series")]
    NoSeries,
    #[error("series {0:?}: x and y lengths differ")]
    LengthMismatch(String),
    #[error("series {0:?} is empty")]
    Empty(String),
    #[error("series {0:?} contains non-finite values")]
    NonFinite(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub fn render_line_chart(chart: &LineChart, path: &Path) -> Result<(), ChartError> {
    let svg = to_svg(chart)?;
    std::fs::write(path, svg).map_err(|source| ChartError::Io { path: path.display().to_string(), source })
}

pub fn to_svg(chart: &LineChart) -> Result<String, ChartError> {
    if chart.series.is_empty() {
        return Err(ChartError::NoSeries);
    }
    for s in &chart.series {
        if s.x.len() != s.y.len() {
            return Err(ChartError::LengthMismatch(s.label.clone()));
        }
        if s.x.is_empty() {
            return Err(ChartError::Empty(s.label.clone()));
        }
        if s.x.iter().chain(&s.y).any(|v| !v.is_finite()) {
            return Err(ChartError::NonFinite(s.label.clone()));
        }
    }
    let all = |f: fn(&Series) -> &Vec<f64>| chart.series.iter().flat_map(move |s| f(s).iter().copied());
    let (x_lo, x_hi) = padded_range(all(|s| &s.x));
    let (y_lo, y_hi) = padded_range(all(|s| &s.y));

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, LEFT + plot_w / 2.0, escape(&chart.title));

    // axes
    let (bx, by) = (LEFT, TOP + plot_h);
    let _ = writeln!(
        out,
        r#"<path d="M{bx:.2},{TOP:.2} L{bx:.2},{by:.2} L{:.2},{by:.2}" fill="none" stroke="black"/>"#,
        LEFT + plot_w
    );
    let (x_ticks, x_dec) = ticks(x_lo, x_hi);
    for t in &x_ticks {
        let x = sx(*t);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{by:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, by + 5.0);
        let _ = writeln!(out, r#"<text class="xtick" x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, by + 19.0, label(*t, x_dec));
    }
    let (y_ticks, y_dec) = ticks(y_lo, y_hi);
    for t in &y_ticks {
        let y = sy(*t);
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{bx:.2}" y2="{y:.2}" stroke="black"/>"#, bx - 5.0);
        let _ = writeln!(
            out,
            r##"<line x1="{bx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e5e5e5"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(out, r#"<text class="ytick" x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, bx - 8.0, y + 4.0, label(*t, y_dec));
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&chart.y_label)
    );

    let mut next_color = 0;
    for (i, s) in chart.series.iter().enumerate() {
        let color = PALETTE[s.color.unwrap_or_else(|| {
            let c = next_color;
            next_color += 1;
            c
        }) % PALETTE.len()];
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let points: Vec<String> = s.x.iter().zip(&s.y).map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + plot_w + 14.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2.5"{dash}/>"#,
            lx + 22.0
        );
        let _ = writeln!(out, r#"<text class="legend" x="{:.2}" y="{:.2}">{}</text>"#, lx + 28.0, ly + 4.0, escape(&s.label));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        (lo - pad, hi + pad)
    }
}

/// Round ticks inside `[lo, hi]` plus both end points, with the decimals
/// needed to print them.
fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut out = vec![lo];
    let mut t = (lo / step).ceil() * step;
    while t < hi {
        if t - lo > 0.4 * step && hi - t > 0.4 * step {
            out.push(t);
        }
        t += step;
    }
    out.push(hi);
    let integral = out.iter().all(|v| v.fract() == 0.0);
    let decimals = if integral { 0 } else { ((-step.log10()).ceil().max(0.0) as usize + 1).min(8) };
    (out, decimals)
}

fn label(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    // avoid "-0" and "-0.00"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_ends_are_the_data_range() {
        let (t, d) = ticks(1950.0, 2050.0);
        assert_eq!(d, 0);
        assert_eq!(t.first(), Some(&1950.0));
        assert_eq!(t.last(), Some(&2050.0));
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn fractional_ticks_get_decimals() {
        let (t, d) = ticks(-0.013, 0.021);
        assert!(d >= 3);
        assert_eq!(label(t[0], d), format!("{:.d$}", -0.013));
    }

    #[test]
    fn rejects_bad_input() {
        let c = LineChart::new("t", "x", "y");
        assert!(matches!(to_svg(&c), Err(ChartError::NoSeries)));
        let c = c.with(Series::new("a", vec![1.0, 2.0], vec![1.0]));
        assert!(matches!(to_svg(&c), Err(ChartError::LengthMismatch(_))));
        let c = LineChart::new("t", "x", "y").with(Series::new("a", vec![1.0], vec![f64::NAN]));
        assert!(matches!(to_svg(&c), Err(ChartError::NonFinite(_))));
    }

    #[test]
    fn labels_are_escaped() {
        let c = LineChart::new("a < b", "x", "y").with(Series::new("p & q", vec![0.0, 1.0], vec![0.0, 1.0]));
        let svg = to_svg(&c).unwrap();
        assert!(svg.contains("a &lt; b") && svg.contains("p &amp; q"));
    }
}
