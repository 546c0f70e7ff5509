//! Bare-bones SVG markup: axes, rectangles, polylines.

use std::fmt::Write;

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
    clips: usize,
}

/// Maps data coordinates inside `(x0, x1) × (y0, y1)` onto a pixel box.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Frame {
    pub fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width,
            self.top + self.height - (y - self.y.0) / (self.y.1 - self.y.0) * self.height,
        )
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Svg { width, height, body: String::new(), clips: 0 }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#);
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, s: &str) {
        let _ = writeln!(self.body, r#"<text x="{x:.2}" y="{y:.2}" font-size="{size}" font-family="sans-serif">{}</text>"#, esc(s));
    }

    pub fn line(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{stroke}" stroke-width="1"/>"#,
            a.0, a.1, b.0, b.1
        );
    }

    /// Axes with end labels, plus a clip region for the frame's interior.
    /// Returns the clip id.
    pub fn axes(&mut self, f: &Frame, title: &str) -> String {
        let id = format!("c{}", self.clips);
        self.clips += 1;
        let _ = writeln!(
            self.body,
            r#"<clipPath id="{id}"><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/></clipPath>"#,
            f.left, f.top, f.width, f.height
        );
        let (l, b) = (f.left, f.top + f.height);
        self.line((l, b), (l + f.width, b), "black");
        self.line((l, b), (l, f.top), "black");
        self.text(l, b + 14.0, 10.0, &format!("{}", f.x.0));
        self.text(l + f.width - 20.0, b + 14.0, 10.0, &format!("{:.3}", f.x.1));
        self.text(l - 30.0, f.top + 8.0, 10.0, &format!("{:.3}", f.y.1));
        self.text(l, f.top - 6.0, 11.0, title);
        id
    }

    /// Polyline through data points; non-finite points split the line.
    pub fn polyline(&mut self, f: &Frame, clip: &str, pts: &[(f64, f64)], stroke: &str, width: f64) {
        for run in pts.split(|p| !(p.0.is_finite() && p.1.is_finite())) {
            if run.len() < 2 {
                continue;
            }
            let mut d = String::new();
            for &(x, y) in run {
                let (px, py) = f.px(x, y);
                let _ = write!(d, "{px:.2},{py:.2} ");
            }
            let _ = writeln!(
                self.body,
                r#"<polyline clip-path="url(#{clip})" fill="none" stroke="{stroke}" stroke-width="{width}" points="{}"/>"#,
                d.trim_end()
            );
        }
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}
