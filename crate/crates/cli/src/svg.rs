//! Standalone SVG line chart for the mixed-state average sweep.

use std::fmt::Write;

use haar_coherence::mc::Figure1Row;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const Y_MAX: f64 = 0.35;

/// Analytic curve as a polyline plus one circle per Monte Carlo point with a
/// two-sided one-sigma error bar. The x-axis is `m = log2 N`, the y-axis is
/// fixed to `[0, 0.35]`.
pub fn figure1_svg(rows: &[Figure1Row]) -> String {
    let max_m = rows
        .iter()
        .map(|r| r.n.trailing_zeros())
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let (x_lo, x_hi) = (0.5, max_m + 0.5);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |m: f64| LEFT + (m - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |a: f64| TOP + (1.0 - a.clamp(0.0, Y_MAX) / Y_MAX) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // axes
    let (x0, y0) = (LEFT, TOP + plot_h);
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#,
        LEFT + plot_w
    );
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{TOP}" x2="{x0}" y2="{y0}" stroke="black"/>"#);
    for m in 1..=max_m as u32 {
        let x = sx(m as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{m}</text>"#,
            y0 + 5.0,
            y0 + 20.0
        );
    }
    for i in 0..=7 {
        let a = i as f64 * 0.05;
        let y = sy(a);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{a:.2}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">m (N = 2^m)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">average C_I</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let points: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.2},{:.2}", sx(r.n.trailing_zeros() as f64), sy(r.analytic)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        points.join(" ")
    );

    for r in rows {
        let x = sx(r.n.trailing_zeros() as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="firebrick"/>"#,
            sy(r.mc_mean - r.mc_stderr),
            sy(r.mc_mean + r.mc_stderr)
        );
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{:.2}" r="3.5" fill="firebrick"/>"#,
            sy(r.mc_mean)
        );
    }
    s.push_str("</svg>\n");
    s
}
