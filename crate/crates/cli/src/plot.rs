//! Standalone SVG convergence plot: the median best-so-far value as a line
//! over a shaded interquartile band, against the evaluation count.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{io_err, CliError, Result};
use crate::summary::Summary;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

#[derive(Debug, Clone, Default)]
pub struct PlotOptions {
    pub title: String,
    pub log_y: bool,
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    log_y: bool,
}

impl Frame {
    fn value(&self, v: f64) -> f64 {
        if self.log_y {
            v.log10()
        } else {
            v
        }
    }

    fn px(&self, n: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1.0);
        MARGIN_LEFT + (n - self.x_min) / span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    /// Larger values map to smaller SVG y, i.e. higher on the page.
    fn py(&self, v: f64) -> f64 {
        let v = self.value(v);
        let span = self.y_max - self.y_min;
        let t = if span > 0.0 {
            (v - self.y_min) / span
        } else {
            0.5
        };
        HEIGHT - MARGIN_BOTTOM - t * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn frame(summary: &Summary, log_y: bool) -> Result<Frame> {
    let first = summary.rows.first().ok_or(CliError::EmptySummary)?;
    let last = summary.rows.last().ok_or(CliError::EmptySummary)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in &summary.rows {
        for v in [r.q25, r.median, r.q75] {
            if log_y && v <= 0.0 {
                return Err(CliError::NonPositiveLog(v));
            }
            let v = if log_y { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok(Frame {
        x_min: first.n as f64,
        x_max: last.n as f64,
        y_min: lo,
        y_max: hi,
        log_y,
    })
}

fn tick_label(f: &Frame, t: f64) -> String {
    let v = f.y_min + t * (f.y_max - f.y_min);
    if f.log_y {
        format!("1e{v:.1}")
    } else {
        format!("{v:.4}")
    }
}

/// Renders the summary as an SVG document.
pub fn render_svg(summary: &Summary, opts: &PlotOptions) -> Result<String> {
    let f = frame(summary, opts.log_y)?;
    let mut svg = String::new();
    let w = &mut svg;
    // writing into a String cannot fail
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(&opts.title)
    );

    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
    let _ = writeln!(
        w,
        r#"<path d="M{x0},{y0} L{x0},{y1} L{x1},{y1}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let y = y1 - t * (y1 - y0);
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            y + 4.0,
            tick_label(&f, t)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">evaluations ({} to {})</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        f.x_min,
        f.x_max
    );

    let upper: Vec<String> = summary
        .rows
        .iter()
        .map(|r| format!("{:.2},{:.2}", f.px(r.n as f64), f.py(r.q75)))
        .collect();
    let lower: Vec<String> = summary
        .rows
        .iter()
        .rev()
        .map(|r| format!("{:.2},{:.2}", f.px(r.n as f64), f.py(r.q25)))
        .collect();
    let _ = writeln!(
        w,
        r##"<polygon class="iqr" points="{} {}" fill="#4a7ebb" fill-opacity="0.25" stroke="none"/>"##,
        upper.join(" "),
        lower.join(" ")
    );
    let median: Vec<String> = summary
        .rows
        .iter()
        .map(|r| format!("{:.2},{:.2}", f.px(r.n as f64), f.py(r.median)))
        .collect();
    let _ = writeln!(
        w,
        r##"<polyline class="median" points="{}" fill="none" stroke="#1f4e8c" stroke-width="1.5"/>"##,
        median.join(" ")
    );
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Writes the plot to `path`. Nothing is created when rendering fails.
pub fn emit_plot(summary: &Summary, opts: &PlotOptions, path: &Path) -> Result<()> {
    let svg = render_svg(summary, opts)?;
    fs::write(path, svg).map_err(io_err(path))
}
