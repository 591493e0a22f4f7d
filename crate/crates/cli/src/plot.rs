//! Static SVG stem plots of magnitude sequences.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 300.0;
const MARGIN: f64 = 40.0;

pub fn stem_svg(title: &str, values: &[f64]) -> String {
    let peak = values.iter().cloned().fold(0.0, f64::max);
    let top = if peak > 0.0 { peak * 1.05 } else { 1.0 };
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let step = plot_w / values.len().max(1) as f64;
    let base_y = HEIGHT - MARGIN;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN}" y1="{base_y}" x2="{}" y2="{base_y}" stroke="black"/>"#,
        WIDTH - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="5" y="{}" font-family="sans-serif" font-size="10">{top:.3}</text>"#,
        MARGIN
    );
    for (i, &v) in values.iter().enumerate() {
        let x = MARGIN + (i as f64 + 0.5) * step;
        let y = base_y - v / top * plot_h;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{base_y}" x2="{x:.2}" y2="{y:.2}" stroke="steelblue"/><circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="steelblue"/>"#,
            (step / 3.0).clamp(0.5, 3.0)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
