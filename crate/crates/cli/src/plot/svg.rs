use std::fmt::Write;

use super::Violin;

const SLOT: f64 = 64.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 36.0;
const PLOT_H: f64 = 240.0;
const LABEL_H: f64 = 150.0;
const PANEL_H: f64 = TOP + PLOT_H + LABEL_H;

pub struct Panel {
    pub title: String,
    pub y_label: String,
    pub violins: Vec<Violin>,
    /// Draw a dashed horizontal reference line at this value.
    pub reference: Option<f64>,
}

pub struct Bar {
    pub label: String,
    pub value: f64,
    pub error: f64,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<title>{}</title>"#, esc(title));
}

struct Axis {
    lo: f64,
    hi: f64,
    top: f64,
}

impl Axis {
    fn y(&self, v: f64) -> f64 {
        self.top + PLOT_H * (1.0 - (v - self.lo) / (self.hi - self.lo))
    }
}

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo < 1e-9 {
        (lo - 0.01, hi + 0.01)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn axes(out: &mut String, axis: &Axis, width: f64, slots: usize, title: &str, y_label: &str) {
    let right = LEFT + slots as f64 * SLOT;
    let bottom = axis.top + PLOT_H;
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
        width / 2.0,
        axis.top - 14.0,
        esc(title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{LEFT:.1}" y="{:.1}" width="{:.1}" height="{PLOT_H:.1}" fill="none" stroke="#444"/>"##,
        axis.top,
        right - LEFT
    );
    for i in 0..=4 {
        let v = axis.lo + (axis.hi - axis.lo) * f64::from(i) / 4.0;
        let y = axis.y(v);
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.2}" x2="{LEFT:.1}" y2="{y:.2}" stroke="#444"/><text x="{:.1}" y="{:.2}" text-anchor="end">{v:.3}</text>"##,
            LEFT - 4.0,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text transform="translate(16,{:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        axis.top + PLOT_H / 2.0,
        esc(y_label)
    );
    let _ = bottom;
}

fn slot_label(out: &mut String, x: f64, bottom: f64, label: &str) {
    let _ = writeln!(
        out,
        r#"<text transform="translate({x:.1},{:.1}) rotate(-40)" text-anchor="end" font-size="10">{}</text>"#,
        bottom + 12.0,
        esc(label)
    );
}

/// Mirrored-KDE violins with median (thick) and 5%/95% (thin) ticks, one
/// panel per row.
pub fn render_violins(title: &str, panels: &[Panel]) -> String {
    let slots = panels
        .iter()
        .map(|p| p.violins.len())
        .max()
        .unwrap_or(1)
        .max(1);
    let width = LEFT + slots as f64 * SLOT + RIGHT;
    let height = PANEL_H * panels.len() as f64;
    let mut out = String::new();
    header(&mut out, width, height, title);

    for (pi, panel) in panels.iter().enumerate() {
        let (mut lo, mut hi) = panel
            .violins
            .iter()
            .map(Violin::value_range)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| {
                (a.min(c), b.max(d))
            });
        if let Some(r) = panel.reference {
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let (lo, hi) = padded_range(lo, hi);
        let axis = Axis {
            lo,
            hi,
            top: pi as f64 * PANEL_H + TOP,
        };
        axes(&mut out, &axis, width, slots, &panel.title, &panel.y_label);
        if let Some(r) = panel.reference {
            let y = axis.y(r);
            let _ = writeln!(
                out,
                r##"<line x1="{LEFT:.1}" y1="{y:.2}" x2="{:.1}" y2="{y:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
                LEFT + slots as f64 * SLOT
            );
        }
        let max_density = panel
            .violins
            .iter()
            .flat_map(|v| v.density.iter().map(|d| d.1))
            .fold(0.0_f64, f64::max);

        for (i, v) in panel.violins.iter().enumerate() {
            let cx = LEFT + (i as f64 + 0.5) * SLOT;
            let half = 0.42 * SLOT;
            if v.density.is_empty() || max_density == 0.0 {
                let y = axis.y(v.summary.median);
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.1}" y1="{y:.2}" x2="{:.1}" y2="{y:.2}" stroke="#3b6ea8" stroke-width="3"/>"##,
                    cx - half,
                    cx + half
                );
            } else {
                let mut pts = String::new();
                for &(x, d) in &v.density {
                    let _ = write!(pts, "{:.2},{:.2} ", cx + half * d / max_density, axis.y(x));
                }
                for &(x, d) in v.density.iter().rev() {
                    let _ = write!(pts, "{:.2},{:.2} ", cx - half * d / max_density, axis.y(x));
                }
                let _ = writeln!(
                    out,
                    r##"<polygon points="{}" fill="#9ec1e6" stroke="#3b6ea8" stroke-width="1"/>"##,
                    pts.trim_end()
                );
            }
            for (value, w, sw) in [
                (v.summary.q05, 0.18, 1.0),
                (v.summary.median, 0.3, 2.5),
                (v.summary.q95, 0.18, 1.0),
            ] {
                let y = axis.y(value);
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.1}" y1="{y:.2}" x2="{:.1}" y2="{y:.2}" stroke="#111" stroke-width="{sw}"/>"##,
                    cx - w * SLOT,
                    cx + w * SLOT
                );
            }
            slot_label(&mut out, cx, axis.top + PLOT_H, &v.label);
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Bar chart with ±error whiskers, values in `[0, 1]`.
pub fn render_bars(title: &str, y_label: &str, bars: &[Bar]) -> String {
    let slots = bars.len().max(1);
    let width = LEFT + slots as f64 * SLOT + RIGHT;
    let mut out = String::new();
    header(&mut out, width, PANEL_H, title);
    let axis = Axis {
        lo: 0.0,
        hi: 1.0,
        top: TOP,
    };
    axes(&mut out, &axis, width, slots, title, y_label);
    for (i, b) in bars.iter().enumerate() {
        let cx = LEFT + (i as f64 + 0.5) * SLOT;
        let y = axis.y(b.value);
        let _ = writeln!(
            out,
            r##"<rect x="{:.1}" y="{y:.2}" width="{:.1}" height="{:.2}" fill="#9ec1e6" stroke="#3b6ea8"/>"##,
            cx - 0.35 * SLOT,
            0.7 * SLOT,
            axis.y(0.0) - y
        );
        let (lo, hi) = ((b.value - b.error).max(0.0), (b.value + b.error).min(1.0));
        let _ = writeln!(
            out,
            r##"<line x1="{cx:.1}" y1="{:.2}" x2="{cx:.1}" y2="{:.2}" stroke="#111"/>"##,
            axis.y(lo),
            axis.y(hi)
        );
        let _ = writeln!(
            out,
            r#"<text x="{cx:.1}" y="{:.2}" text-anchor="middle" font-size="10">{:.3}</text>"#,
            axis.y(hi) - 4.0,
            b.value
        );
        slot_label(&mut out, cx, axis.top + PLOT_H, &b.label);
    }
    out.push_str("</svg>\n");
    out
}
