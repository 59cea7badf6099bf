//! Minimal SVG output for geometry overlays and CSV plots.

use crate::error::Result;
use crate::geom::{Rect, Vec2};
use std::fmt::Write as _;
use std::path::Path;

pub struct SvgCanvas {
    window: Rect,
    size: f64,
    body: String,
}

impl SvgCanvas {
    pub fn new(window: Rect, size: f64) -> Self {
        SvgCanvas {
            window,
            size,
            body: String::new(),
        }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        let s = self.size / self.window.width().max(self.window.height());
        (
            (p.x - self.window.lo.x) * s,
            // flip: SVG y grows downward
            (self.window.hi.y - p.y) * s,
        )
    }

    pub fn polyline(&mut self, pts: &[Vec2], color: &str, width: f64, close: bool) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.map(*p);
            let _ = write!(d, "{}{x:.2},{y:.2} ", if i == 0 { "M" } else { "L" });
        }
        if close {
            d.push('Z');
        }
        let _ = writeln!(
            self.body,
            r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="{width}"/>"#
        );
    }

    pub fn circle(&mut self, center: Vec2, r: f64, color: &str, width: f64) {
        let (cx, cy) = self.map(center);
        let s = self.size / self.window.width().max(self.window.height());
        let _ = writeln!(
            self.body,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
            r * s
        );
    }

    pub fn dot(&mut self, p: Vec2, r: f64, color: &str) {
        let (cx, cy) = self.map(p);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{color}"/>"#
        );
    }

    pub fn segment(&mut self, a: Vec2, b: Vec2, color: &str, width: f64) {
        let (x1, y1) = self.map(a);
        let (x2, y2) = self.map(b);
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{color}" stroke-width="{width}"/>"#
        );
    }

    pub fn label(&mut self, p: Vec2, text: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="12" font-family="monospace">{text}</text>"#
        );
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let s = self.size / self.window.width().max(self.window.height());
        let w = self.window.width() * s;
        let h = self.window.height() * s;
        let doc = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        );
        std::fs::write(path, doc)?;
        Ok(())
    }
}

/// Line plot of (x, y) series, used by the CLI `plot` subcommand.
pub fn plot_series(series: &[(String, Vec<(f64, f64)>)], path: &Path) -> Result<()> {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (_, pts) in series {
        for &(x, y) in pts {
            lo.x = lo.x.min(x);
            lo.y = lo.y.min(y);
            hi.x = hi.x.max(x);
            hi.y = hi.y.max(y);
        }
    }
    if !lo.x.is_finite() {
        lo = Vec2::ZERO;
        hi = Vec2::new(1.0, 1.0);
    }
    let pad = Vec2::new(
        (hi.x - lo.x).max(1e-9) * 0.08,
        (hi.y - lo.y).max(1e-9) * 0.08,
    );
    let window = Rect::new(lo - pad, hi + pad);
    let mut canvas = SvgCanvas::new(window, 640.0);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];
    canvas.segment(Vec2::new(lo.x, lo.y), Vec2::new(hi.x, lo.y), "#888", 1.0);
    canvas.segment(Vec2::new(lo.x, lo.y), Vec2::new(lo.x, hi.y), "#888", 1.0);
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = colors[i % colors.len()];
        let v: Vec<Vec2> = pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect();
        canvas.polyline(&v, color, 1.5, false);
        for p in &v {
            canvas.dot(*p, 2.5, color);
        }
        if let Some(p) = v.last() {
            canvas.label(*p, name);
        }
    }
    canvas.save(path)
}
