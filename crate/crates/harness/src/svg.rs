//! Minimal SVG histogram: z-score density bars with the standard normal
//! density overlaid. No plotting dependency; output is deterministic.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 50.0;
const MARGIN_RIGHT: f64 = 15.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 40.0;
const X_MIN: f64 = -4.0;
const X_MAX: f64 = 4.0;
const BINS: usize = 64;

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Render sorted z-scores as a density histogram with a Φ′ overlay.
pub fn zscore_histogram(z_scores: &[f64], title: &str) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let bin_width = (X_MAX - X_MIN) / BINS as f64;

    let mut bins = [0u64; BINS];
    let mut in_range = 0u64;
    for &z in z_scores {
        if (X_MIN..X_MAX).contains(&z) {
            let b = ((z - X_MIN) / bin_width) as usize;
            bins[b.min(BINS - 1)] += 1;
            in_range += 1;
        }
    }
    let total = z_scores.len().max(1) as f64;
    let density: Vec<f64> = bins
        .iter()
        .map(|&c| c as f64 / total / bin_width)
        .collect();
    let y_max = density
        .iter()
        .copied()
        .fold(normal_pdf(0.0), f64::max)
        * 1.1;

    let to_x = |x: f64| MARGIN_LEFT + (x - X_MIN) / (X_MAX - X_MIN) * plot_w;
    let to_y = |y: f64| MARGIN_TOP + plot_h - (y / y_max) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" font-family="monospace" font-size="14">{}</text>"#,
        MARGIN_LEFT,
        xml_escape(title)
    );

    // histogram bars
    for (i, &d) in density.iter().enumerate() {
        if d <= 0.0 {
            continue;
        }
        let x0 = to_x(X_MIN + i as f64 * bin_width);
        let y0 = to_y(d);
        let h = MARGIN_TOP + plot_h - y0;
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#6baed6" stroke-width="0.5"/>"##,
            x0,
            y0,
            plot_w / BINS as f64,
            h
        );
    }

    // standard normal overlay
    let mut path = String::new();
    for k in 0..=200 {
        let x = X_MIN + (X_MAX - X_MIN) * k as f64 / 200.0;
        let _ = write!(
            path,
            "{}{:.2},{:.2}",
            if k == 0 { "" } else { " " },
            to_x(x),
            to_y(normal_pdf(x))
        );
    }
    let _ = writeln!(
        s,
        r##"<polyline points="{path}" fill="none" stroke="#d62728" stroke-width="1.8"/>"##
    );

    // axes
    let _ = writeln!(
        s,
        r#"<line x1="{l:.1}" y1="{b:.1}" x2="{r:.1}" y2="{b:.1}" stroke="black" stroke-width="1"/>"#,
        l = MARGIN_LEFT,
        b = MARGIN_TOP + plot_h,
        r = MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        s,
        r#"<line x1="{l:.1}" y1="{t:.1}" x2="{l:.1}" y2="{b:.1}" stroke="black" stroke-width="1"/>"#,
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h
    );
    for tick in -4..=4 {
        let x = to_x(tick as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{b:.1}" x2="{x:.1}" y2="{b2:.1}" stroke="black" stroke-width="1"/>"#,
            b = MARGIN_TOP + plot_h,
            b2 = MARGIN_TOP + plot_h + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{y:.1}" font-family="monospace" font-size="11" text-anchor="middle">{tick}</text>"#,
            y = MARGIN_TOP + plot_h + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{x:.1}" y="{y:.1}" font-family="monospace" font-size="11" text-anchor="middle">z</text>"#,
        x = MARGIN_LEFT + plot_w / 2.0,
        y = HEIGHT - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{y:.1}" font-family="monospace" font-size="11" transform="rotate(-90 12 {y:.1})" text-anchor="middle">density</text>"#,
        y = MARGIN_TOP + plot_h / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{x:.1}" y="{y:.1}" font-family="monospace" font-size="10">{} of {} z-scores shown</text>"#,
        in_range,
        z_scores.len(),
        x = MARGIN_LEFT + plot_w - 220.0,
        y = MARGIN_TOP + 4.0
    );
    s.push_str("</svg>\n");
    s
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
