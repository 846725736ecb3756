//! Minimal static SVG rendering for the experiment curves: mean lines with
//! optional translucent +-1 standard deviation bands. No plotting dependency;
//! the files are small, self-contained documents.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 28.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 58.0;

/// One plotted curve; `band` holds per-point half-widths (one standard
/// deviation) around the mean.
pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub mean: &'a [f64],
    pub band: Option<&'a [f64]>,
}

struct Scale {
    min: f64,
    span: f64,
    pix_lo: f64,
    pix_span: f64,
}

impl Scale {
    fn new(min: f64, max: f64, pix_lo: f64, pix_hi: f64) -> Self {
        let span = if max > min { max - min } else { 1.0 };
        Self {
            min,
            span,
            pix_lo,
            pix_span: pix_hi - pix_lo,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.pix_lo + (v - self.min) / self.span * self.pix_span
    }
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, x: &[f64], series: &[Series]) -> String {
    let x_min = x.first().copied().unwrap_or(0.0);
    let x_max = x.last().copied().unwrap_or(1.0);
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for (i, &m) in s.mean.iter().enumerate() {
            let half = s.band.map_or(0.0, |b| b[i]);
            y_min = y_min.min(m - half);
            y_max = y_max.max(m + half);
        }
    }
    if !y_min.is_finite() || !y_max.is_finite() {
        y_min = 0.0;
        y_max = 1.0;
    }
    let pad = 0.05 * (y_max - y_min).max(1e-9);
    y_min -= pad;
    y_max += pad;

    let sx = Scale::new(x_min, x_max, MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let sy = Scale::new(y_min, y_max, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        title
    );

    // Grid and ticks.
    for k in 0..=5 {
        let xv = x_min + (x_max - x_min) * k as f64 / 5.0;
        let xp = sx.map(xv);
        let _ = writeln!(
            svg,
            r##"<line x1="{xp:.1}" y1="{}" x2="{xp:.1}" y2="{}" stroke="#dddddd"/>"##,
            MARGIN_TOP,
            HEIGHT - MARGIN_BOTTOM
        );
        let _ = writeln!(
            svg,
            r#"<text x="{xp:.1}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{xv:.2}</text>"#,
            HEIGHT - MARGIN_BOTTOM + 18.0
        );
        let yv = y_min + (y_max - y_min) * k as f64 / 5.0;
        let yp = sy.map(yv);
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{yp:.1}" x2="{}" y2="{yp:.1}" stroke="#dddddd"/>"##,
            MARGIN_LEFT,
            WIDTH - MARGIN_RIGHT
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="end">{yv:.3}</text>"#,
            MARGIN_LEFT - 8.0,
            yp + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{}" y="{}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        MARGIN_LEFT,
        MARGIN_TOP,
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        x_label
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y_label
    );

    // Bands first so lines draw on top of them.
    for s in series {
        if let Some(band) = s.band {
            let mut points = String::new();
            for (i, &xv) in x.iter().enumerate() {
                let _ = write!(
                    points,
                    "{:.1},{:.1} ",
                    sx.map(xv),
                    sy.map(s.mean[i] + band[i])
                );
            }
            for (i, &xv) in x.iter().enumerate().rev() {
                let _ = write!(
                    points,
                    "{:.1},{:.1} ",
                    sx.map(xv),
                    sy.map(s.mean[i] - band[i])
                );
            }
            let _ = writeln!(
                svg,
                r#"<polygon points="{}" fill="{}" fill-opacity="0.25" stroke="none"/>"#,
                points.trim_end(),
                s.color
            );
        }
    }
    for s in series {
        let mut points = String::new();
        for (i, &xv) in x.iter().enumerate() {
            let _ = write!(points, "{:.1},{:.1} ", sx.map(xv), sy.map(s.mean[i]));
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            points.trim_end(),
            s.color
        );
    }

    // Legend.
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN_TOP + 18.0 + 20.0 * i as f64;
        let x0 = WIDTH - MARGIN_RIGHT - 170.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{x0}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/>"#,
            x0 + 26.0,
            s.color
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13">{}</text>"#,
            x0 + 34.0,
            y + 4.0,
            s.label
        );
    }

    svg.push_str("</svg>\n");
    svg
}
