//! Minimal deterministic SVG plotting. Coordinates are printed with two
//! decimals so identical inputs give identical bytes.

use std::fmt::Write as _;

pub const WIDTH: f64 = 720.0;
pub const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 52.0;

pub const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#7f7f7f"];

fn f(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Round step for roughly `target` ticks over `span`.
fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    step * mag
}

pub fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return vec![lo];
    }
    let step = nice_step(hi - lo, target);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let r = (v * 1000.0).round() / 1000.0;
    let s = format!("{r}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Pad a data range so flat series still get a visible axis.
pub fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo.abs() > 1e-12 {
            lo.abs() * 0.1
        } else {
            1.0
        };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

pub fn extent(values: impl IntoIterator<Item = f64>) -> Option<(f64, f64)> {
    values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
}

pub struct Plot {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    body: String,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) -> Plot {
        let mut p = Plot {
            x0: x.0,
            x1: x.1,
            y0: y.0,
            y1: y.1,
            body: String::new(),
        };
        p.axes(title, x_label, y_label);
        p
    }

    pub fn sx(&self, v: f64) -> f64 {
        let w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        if self.x1 > self.x0 {
            MARGIN_LEFT + (v - self.x0) / (self.x1 - self.x0) * w
        } else {
            MARGIN_LEFT + w / 2.0
        }
    }

    pub fn sy(&self, v: f64) -> f64 {
        let h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        if self.y1 > self.y0 {
            HEIGHT - MARGIN_BOTTOM - (v - self.y0) / (self.y1 - self.y0) * h
        } else {
            MARGIN_TOP + h / 2.0
        }
    }

    fn axes(&mut self, title: &str, x_label: &str, y_label: &str) {
        let (l, r, t, b) = (
            MARGIN_LEFT,
            WIDTH - MARGIN_RIGHT,
            MARGIN_TOP,
            HEIGHT - MARGIN_BOTTOM,
        );
        let _ = writeln!(
            self.body,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333" stroke-width="1"/>"##,
            f(l),
            f(t),
            f(r - l),
            f(b - t)
        );
        for v in ticks(self.x0, self.x1, 8) {
            let x = self.sx(v);
            let _ = writeln!(
                self.body,
                r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#333"/><text x="{0}" y="{3}" font-size="11" text-anchor="middle">{4}</text>"##,
                f(x),
                f(b),
                f(b + 5.0),
                f(b + 18.0),
                tick_label(v)
            );
        }
        for v in ticks(self.y0, self.y1, 6) {
            let y = self.sy(v);
            let _ = writeln!(
                self.body,
                r##"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#333"/><line x1="{2}" y1="{1}" x2="{3}" y2="{1}" stroke="#ddd"/><text x="{4}" y="{5}" font-size="11" text-anchor="end">{6}</text>"##,
                f(l - 5.0),
                f(y),
                f(l),
                f(r),
                f(l - 8.0),
                f(y + 4.0),
                tick_label(v)
            );
        }
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="15" text-anchor="middle">{}</text>"#,
            f(WIDTH / 2.0),
            f(MARGIN_TOP - 14.0),
            escape(title)
        );
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            f((l + r) / 2.0),
            f(HEIGHT - 12.0),
            escape(x_label)
        );
        let _ = writeln!(
            self.body,
            r#"<text x="16" y="{0}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
            f((t + b) / 2.0),
            escape(y_label)
        );
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], color: &str, width: f64, dashed: bool) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{},{}", f(self.sx(x)), f(self.sy(y))))
            .collect();
        let dash = if dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{}"{dash}/>"#,
            coords.join(" "),
            f(width)
        );
    }

    /// Filled region between `lower` and `upper` over the same x positions.
    pub fn band(&mut self, xs: &[f64], lower: &[f64], upper: &[f64], color: &str, opacity: f64) {
        if xs.is_empty() {
            return;
        }
        let mut coords: Vec<String> = xs
            .iter()
            .zip(upper)
            .map(|(&x, &y)| format!("{},{}", f(self.sx(x)), f(self.sy(y))))
            .collect();
        coords.extend(
            xs.iter()
                .zip(lower)
                .rev()
                .map(|(&x, &y)| format!("{},{}", f(self.sx(x)), f(self.sy(y)))),
        );
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{color}" fill-opacity="{}" stroke="none"/>"#,
            coords.join(" "),
            f(opacity)
        );
    }

    pub fn marker(&mut self, x: f64, y: f64, color: &str, r: f64) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{color}"/>"#,
            f(self.sx(x)),
            f(self.sy(y)),
            f(r)
        );
    }

    pub fn vline(&mut self, x: f64, color: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="{color}" stroke-dasharray="3 3"/>"#,
            f(self.sx(x)),
            f(MARGIN_TOP),
            f(HEIGHT - MARGIN_BOTTOM)
        );
    }

    pub fn hline(&mut self, y: f64, color: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{color}" stroke-width="0.8"/>"#,
            f(MARGIN_LEFT),
            f(self.sy(y)),
            f(WIDTH - MARGIN_RIGHT)
        );
    }

    /// Shaded vertical span between two x values.
    pub fn span(&mut self, xa: f64, xb: f64, color: &str, opacity: f64) {
        let (a, b) = (self.sx(xa), self.sx(xb));
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{color}" fill-opacity="{}"/>"#,
            f(a.min(b)),
            f(MARGIN_TOP),
            f((b - a).abs()),
            f(HEIGHT - MARGIN_TOP - MARGIN_BOTTOM),
            f(opacity)
        );
    }

    /// Bar from the y = 0 baseline, `width` in data units.
    pub fn bar(&mut self, x: f64, width: f64, value: f64, color: &str) {
        let base = self.y0.max(0.0).min(self.y1);
        let (xa, xb) = (self.sx(x - width / 2.0), self.sx(x + width / 2.0));
        let (ya, yb) = (self.sy(value), self.sy(base));
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{color}"/>"#,
            f(xa),
            f(ya.min(yb)),
            f(xb - xa),
            f((yb - ya).abs())
        );
    }

    pub fn label(&mut self, x: f64, y: f64, text: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
            f(self.sx(x)),
            f(self.sy(y)),
            escape(text)
        );
    }

    /// Legend entries in the top-right corner.
    pub fn legend(&mut self, entries: &[(&str, &str)]) {
        let x = WIDTH - MARGIN_RIGHT - 150.0;
        for (i, (name, color)) in entries.iter().enumerate() {
            let y = MARGIN_TOP + 14.0 + i as f64 * 16.0;
            let _ = writeln!(
                self.body,
                r#"<rect x="{}" y="{}" width="12" height="10" fill="{color}"/><text x="{}" y="{}" font-size="11">{}</text>"#,
                f(x),
                f(y - 9.0),
                f(x + 18.0),
                f(y),
                escape(name)
            );
        }
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = WIDTH,
            h = HEIGHT
        )
    }
}
