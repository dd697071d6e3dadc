//! Eigenvalue scatter output as CSV and standalone SVG.

use std::fmt::Write;

use num::complex::Complex64;

use crate::stability::clean;

fn num(x: f64) -> String {
    format!("{:.10}", clean(x)).replace("-0.0000000000", "0.0000000000")
}

pub fn eigen_csv(eigs: &[Complex64]) -> String {
    let mut out = String::from("re,im\n");
    for z in eigs {
        let _ = writeln!(out, "{},{}", num(z.re), num(z.im));
    }
    out
}

const W: f64 = 800.0;
const H: f64 = 600.0;
const MARGIN: f64 = 60.0;

fn extent(values: impl Iterator<Item = f64>) -> f64 {
    let m = values.map(f64::abs).fold(0.0, f64::max);
    if m == 0.0 {
        1.0
    } else {
        m * 1.2
    }
}

fn px(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

/// Scatter of the eigenvalues in the complex plane with both axes drawn through the origin.
pub fn eigen_svg(eigs: &[Complex64], title: &str) -> String {
    let xr = extent(eigs.iter().map(|z| z.re));
    let yr = extent(eigs.iter().map(|z| z.im));
    let sx = |x: f64| MARGIN + (x + xr) / (2.0 * xr) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y + yr) / (2.0 * yr) * (H - 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600">"##
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="800" height="600" fill="white"/>"##);
    let _ = writeln!(s, r##"<text x="400" y="30" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"##, escape(title));
    let (x0, x1, y0, y1) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
    let _ = writeln!(s, r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#888"/>"##, px(x0), px(y0), px(x1 - x0), px(y1 - y0));
    let _ = writeln!(s, r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"##, px(x0), px(sy(0.0)), px(x1), px(sy(0.0)));
    let _ = writeln!(s, r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-dasharray="4 3"/>"##, px(sx(0.0)), px(y0), px(sx(0.0)), px(y1));
    for (v, anchor) in [(-xr, "start"), (xr, "end")] {
        let _ = writeln!(s, r##"<text x="{}" y="{}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{}</text>"##, px(sx(v)), px(y1 + 16.0), num4(v));
    }
    for v in [-yr, yr] {
        let _ = writeln!(s, r##"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"##, px(x0 - 6.0), px(sy(v) + 4.0), num4(v));
    }
    let _ = writeln!(s, r##"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">Re</text>"##, px(W / 2.0), px(H - 20.0));
    let _ = writeln!(s, r##"<text x="20" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 20 {})">Im</text>"##, px(H / 2.0), px(H / 2.0));
    for z in eigs {
        let _ = writeln!(s, r##"<circle cx="{}" cy="{}" r="5" fill="{}"/>"##, px(sx(clean(z.re))), px(sy(clean(z.im))), if z.re < 0.0 { "#1f77b4" } else { "#d62728" });
    }
    s.push_str("</svg>\n");
    s
}

fn num4(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_no_negative_zero() {
        let csv = eigen_csv(&[Complex64::new(-0.0, 1.0), Complex64::new(-0.5, -0.0)]);
        assert_eq!(csv, "re,im\n0.0000000000,1.0000000000\n-0.5000000000,0.0000000000\n");
    }

    #[test]
    fn svg_is_deterministic() {
        let e = [Complex64::new(-1.0, 2.0), Complex64::new(-1.0, -2.0)];
        let a = eigen_svg(&e, "t");
        assert_eq!(a, eigen_svg(&e, "t"));
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<circle").count(), 2);
    }
}
