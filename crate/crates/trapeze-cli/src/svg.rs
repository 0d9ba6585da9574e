//! Static SVG figures: curves with inscriptions, action shading, and line
//! plots for branch and proxy diagrams.

use num_complex::Complex64;
use std::fmt::Write;
use trapeze::inscriber::Inscription;
use trapeze::JordanCurve;

/// Color of the parts weighted by `1 - r` (the `z` side).
pub const HEAVY: &str = "#1f5fa8";
/// Color of the parts weighted by `r` (the `w` side).
pub const LIGHT: &str = "#c8372d";

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;

struct Frame {
    min: Complex64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn fit(points: &[Complex64]) -> Frame {
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in points {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-12);
        let scale = (SIZE - 2.0 * MARGIN) / span;
        Frame {
            min: lo,
            scale,
            height: (hi.im - lo.im) * scale + 2.0 * MARGIN,
        }
    }

    fn width(&self, points: &[Complex64]) -> f64 {
        let hi = points.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
        (hi - self.min.re) * self.scale + 2.0 * MARGIN
    }

    fn map(&self, p: Complex64) -> (f64, f64) {
        (
            MARGIN + (p.re - self.min.re) * self.scale,
            self.height - MARGIN - (p.im - self.min.im) * self.scale,
        )
    }

    fn path(&self, pts: &[Complex64], close: bool) -> String {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.map(*p);
            let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { 'M' } else { 'L' });
        }
        if close {
            d.push('Z');
        }
        d
    }
}

fn header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.3} {height:.3}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// A filled region with the weight side it belongs to.
pub struct Region {
    pub outline: Vec<Complex64>,
    pub heavy: bool,
}

/// The curve, optional shaded regions, and each inscription's diagonals
/// (split at the pivot and colored by weight) and trapezoid.
pub fn figure(curve: &JordanCurve, inscriptions: &[Inscription], regions: &[Region]) -> String {
    let pts = curve.sample(720);
    let frame = Frame::fit(&pts);
    let mut out = header(frame.width(&pts), frame.height);
    for region in regions {
        let color = if region.heavy { HEAVY } else { LIGHT };
        let _ = writeln!(
            out,
            "<path class=\"region\" d=\"{}\" fill=\"{color}\" fill-opacity=\"0.25\" stroke=\"none\"/>",
            frame.path(&region.outline, true)
        );
    }
    let _ = writeln!(
        out,
        "<path class=\"curve\" d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
        frame.path(&pts, true)
    );
    for ins in inscriptions {
        let mut quad = vec![ins.z(), ins.zp(), ins.w(), ins.wp()];
        let c = quad.iter().sum::<Complex64>() / 4.0;
        quad.sort_by(|a, b| (a - c).arg().total_cmp(&(b - c).arg()));
        let _ = writeln!(
            out,
            "<path class=\"trapezoid\" d=\"{}\" fill=\"none\" stroke=\"#555\" stroke-dasharray=\"4 3\"/>",
            frame.path(&quad, true)
        );
        let p = ins.pivot();
        for (end, color) in [(ins.z(), HEAVY), (ins.zp(), HEAVY), (ins.w(), LIGHT), (ins.wp(), LIGHT)] {
            let (x1, y1) = frame.map(p);
            let (x2, y2) = frame.map(end);
            let _ = writeln!(
                out,
                "<line class=\"diagonal\" x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\" \
                 stroke=\"{color}\" stroke-width=\"2\"/>"
            );
        }
        for (v, label) in [(ins.z(), "z"), (ins.zp(), "z'"), (ins.w(), "w"), (ins.wp(), "w'")] {
            let (x, y) = frame.map(v);
            let _ = writeln!(out, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"black\"/>");
            let _ = writeln!(
                out,
                "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\" font-family=\"sans-serif\">{label}</text>",
                x + 5.0,
                y - 5.0
            );
        }
    }
    if !inscriptions.is_empty() {
        let _ = writeln!(
            out,
            "<text x=\"8\" y=\"16\" font-size=\"12\" font-family=\"sans-serif\" fill=\"{HEAVY}\">weight 1-r</text>\n\
             <text x=\"8\" y=\"32\" font-size=\"12\" font-family=\"sans-serif\" fill=\"{LIGHT}\">weight r</text>"
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Line plot of one or more series sharing axes.
pub fn plot(series: &[(String, Vec<(f64, f64)>)], xlabel: &str, ylabel: &str) -> String {
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.1.iter().copied()).collect();
    let (w, h) = (SIZE, 0.75 * SIZE);
    let mut out = header(w, h);
    if all.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let (x0, x1) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.0), a.1.max(p.0)));
    let (y0, y1) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.1), a.1.max(p.1)));
    let sx = (w - 2.0 * MARGIN) / (x1 - x0).max(1e-12);
    let sy = (h - 2.0 * MARGIN) / (y1 - y0).max(1e-12);
    let map = |p: (f64, f64)| (MARGIN + (p.0 - x0) * sx, h - MARGIN - (p.1 - y0) * sy);
    let _ = writeln!(
        out,
        "<path class=\"axes\" d=\"M{m},{m} L{m},{b} L{r},{b}\" fill=\"none\" stroke=\"black\"/>",
        m = MARGIN,
        b = h - MARGIN,
        r = w - MARGIN
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" font-family=\"sans-serif\">{xlabel} [{x0:.4}, {x1:.4}]</text>",
        MARGIN,
        h - 10.0
    );
    let _ = writeln!(
        out,
        "<text x=\"4\" y=\"{:.1}\" font-size=\"12\" font-family=\"sans-serif\">{ylabel} [{y0:.4}, {y1:.4}]</text>",
        MARGIN - 16.0
    );
    const PALETTE: [&str; 6] = ["#1f5fa8", "#c8372d", "#2e8b57", "#8a4fbf", "#d98c1f", "#444444"];
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = String::new();
        for (k, p) in pts.iter().enumerate() {
            let (x, y) = map(*p);
            let _ = write!(d, "{}{x:.3},{y:.3} ", if k == 0 { 'M' } else { 'L' });
        }
        let _ = writeln!(
            out,
            "<path class=\"series\" d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"><title>{label}</title></path>"
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use trapeze::fixtures;
    use trapeze::inscriber::{find_inscriptions, DEFAULT_TOL};
    use trapeze::TrapezoidClass;

    #[test]
    fn figure_has_curve_and_weighted_diagonals() {
        let curve = fixtures::ellipse(2.0, 1.0);
        let set = find_inscriptions(&curve, TrapezoidClass::new(0.25, 1.2).unwrap(), 64, DEFAULT_TOL).unwrap();
        let s = figure(&curve, &set.inscriptions[..1], &[]);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("class=\"curve\""));
        assert_eq!(s.matches("class=\"diagonal\"").count(), 4);
        assert!(s.contains(HEAVY) && s.contains(LIGHT));
    }

    #[test]
    fn plot_draws_each_series() {
        let s = plot(
            &[("a".into(), vec![(0.0, 0.0), (1.0, 1.0)]), ("b".into(), vec![(0.0, 1.0), (1.0, 0.0)])],
            "theta",
            "action",
        );
        assert_eq!(s.matches("class=\"series\"").count(), 2);
    }
}
