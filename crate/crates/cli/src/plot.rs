//! Static log-log plot of a singular-value sequence with its fitted line.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;

pub fn decay_svg(title: &str, s: &[f64], window: (usize, usize), slope: f64) -> String {
    let pts: Vec<(f64, f64)> = s
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, &v)| (((i + 1) as f64).log10(), v.log10()))
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    if pts.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let (x0, x1) = (0.0, pts.last().unwrap().0.max(1.0));
    let y0 = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).floor();
    let y1 = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).ceil().max(y0 + 1.0);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let _ = writeln!(
        out,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for d in 0..=(x1.ceil() as i32) {
        let x = sx(d as f64);
        if x <= W - PAD + 0.5 {
            let _ = writeln!(out, r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">1e{d}</text>"#, H - PAD + 16.0);
        }
    }
    for d in (y0 as i32)..=(y1 as i32) {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">1e{d}</text>"#,
            PAD - 6.0,
            sy(d as f64) + 4.0
        );
    }
    let mut path = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        let _ = write!(path, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, sx(*x), sy(*y));
    }
    let _ = writeln!(out, r#"<path d="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#, path.trim_end());
    let (lo, hi) = window;
    if lo >= 1 && hi <= s.len() && s[lo - 1] > 0.0 {
        let (ax, ay) = ((lo as f64).log10(), s[lo - 1].log10());
        let bx = (hi as f64).log10();
        let by = ay + slope * (bx - ax);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick" stroke-width="2" stroke-dasharray="6 4"/>"#,
            sx(ax),
            sy(ay),
            sx(bx),
            sy(by)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" fill="firebrick" text-anchor="end">fitted slope {slope:.3} on n in [{lo}, {hi}]</text>"#,
        W - PAD - 6.0,
        PAD + 18.0
    );
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
