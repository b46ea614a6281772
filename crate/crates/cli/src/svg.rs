//! Bifurcation diagram `ε` against `H`, emitted by hand.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;

fn span(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !(hi > lo) {
        let c = if lo.is_finite() { lo } else { 0.0 };
        let d = c.abs().max(1.0) * 1e-3;
        return (c - d, c + d);
    }
    let m = 0.05 * (hi - lo);
    (lo - m, hi + m)
}

/// `points` are `(H, ε)` pairs along the branch; the trivial branch `ε = 0`
/// is drawn as a reference line and `h0` marked on it.
pub fn bifurcation_diagram(points: &[(f64, f64)], h0: f64) -> String {
    let (x0, x1) = span(points.iter().map(|p| p.0).chain(std::iter::once(h0)));
    let (y0, y1) = span(points.iter().map(|p| p.1).chain(std::iter::once(0.0)));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let _ = writeln!(
        s,
        r#"<line class="trivial" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-dasharray="6 4"/>"#,
        sx(x0),
        sy(0.0),
        sx(x1),
        sy(0.0)
    );
    let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="red"/>"#, sx(h0), sy(0.0));
    if !points.is_empty() {
        let pts: Vec<String> = points.iter().map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline class="branch" points="{}" fill="none" stroke="blue" stroke-width="2"/>"#, pts.join(" "));
        for &(x, y) in points {
            let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="2" fill="blue"/>"#, sx(x), sy(y));
        }
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">H</text>"#, W / 2.0, H - 14.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 16 {})">epsilon</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{:.6}</text>"#,
            sx(x),
            H - PAD + 16.0,
            x
        );
    }
    for y in [y0, y1] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.3}" text-anchor="end" font-family="sans-serif" font-size="11">{:.4}</text>"#,
            PAD - 4.0,
            sy(y) + 4.0,
            y
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagram_has_branch_and_reference() {
        let s = bifurcation_diagram(&[(0.5, 0.01), (0.49, 0.1)], 0.5);
        assert!(s.starts_with("<svg"));
        assert!(s.contains("class=\"trivial\""));
        assert!(s.contains("class=\"branch\""));
        assert!(s.trim_end().ends_with("</svg>"));
        assert_eq!(s, bifurcation_diagram(&[(0.5, 0.01), (0.49, 0.1)], 0.5));
    }

    #[test]
    fn empty_branch_still_renders() {
        let s = bifurcation_diagram(&[], 0.5);
        assert!(!s.contains("polyline"));
    }
}
