//! A dependency-free SVG line chart of `log S(D)` against `log log D`.

use std::fmt::Write;

use super::MomentReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the measured points and a reference line of the predicted slope
/// through the first point. Blocks with `S(D) = 0` cannot be drawn on a log
/// scale; they are listed in a note instead.
pub fn render_svg(report: &MomentReport) -> String {
    let pts: Vec<(f64, f64)> = report
        .blocks
        .iter()
        .filter(|b| b.s > 0.0)
        .map(|b| ((b.big_d as f64).ln().ln(), b.s.ln()))
        .collect();
    let zero: Vec<String> = report.blocks.iter().filter(|b| !(b.s > 0.0)).map(|b| b.big_d.to_string()).collect();

    let xs: Vec<f64> = report.blocks.iter().map(|b| (b.big_d as f64).ln().ln()).collect();
    let (x0, x1) = bounds(&xs, 0.05);
    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    if let Some(&(px, py)) = pts.first() {
        ys.push(py + report.predicted_exponent * (x0 - px));
        ys.push(py + report.predicted_exponent * (x1 - px));
    }
    let (y0, y1) = if ys.is_empty() { (-1.0, 1.0) } else { bounds(&ys, 0.1) };
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(&format!("log S(D) vs log log D: {} (l = {:?})", report.labels.join(", "), report.ells))
    );
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<polyline points="{l},{t} {l},{b} {r},{b}" fill="none" stroke="black"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">log log D</text>"#,
        WIDTH / 2.0,
        HEIGHT - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {})" text-anchor="middle">log S(D)</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (i, x) in xs.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">D={}</text>"#,
            sx(*x),
            b + 14.0,
            report.blocks[i].big_d
        );
    }
    if let Some(&(px, py)) = pts.first() {
        let (ya, yb) = (py + report.predicted_exponent * (x0 - px), py + report.predicted_exponent * (x1 - px));
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6,4"/>"#,
            sx(x0),
            sy(ya),
            sx(x1),
            sy(yb)
        );
        let line: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, line.join(" "));
        for &(x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="steelblue"/>"#, sx(x), sy(y));
        }
    }
    let slope = report.slope_s.map_or("none".to_string(), |v| format!("{v:.4}"));
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">fitted slope {slope}, predicted {:.4} (dashed)</text>"#,
        l + 8.0,
        t + 14.0,
        report.predicted_exponent
    );
    if !zero.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="firebrick">S(D) = 0 at D = {}</text>"#,
            l + 8.0,
            t + 30.0,
            zero.join(", ")
        );
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(v: &[f64], pad: f64) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-9);
    (lo - pad * span, hi + pad * span)
}
