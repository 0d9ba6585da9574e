//! Jordan curves: representation, evaluation, global scalars and projection.
//!
//! Curves are parametrised over `[0, 1)` and always stored counterclockwise.
//! Smooth curves are finite Fourier series; polygons are piecewise linear in
//! normalised arc length. Sample input is converted to a Fourier series by
//! least squares.

mod binormal;
mod index;
pub mod io;

pub use binormal::{Binormal, BinormalSet};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Result, TrapezeError};
use crate::quadrature;
use index::PointGrid;

pub type Point = Complex64;

const TAU: f64 = 2.0 * PI;
/// Self-distance threshold relative to the diameter.
pub const SIMPLICITY_REL_TOL: f64 = 1e-9;
/// Parameter gap below which self-distance is not tested.
pub const SIMPLICITY_MIN_GAP: f64 = 1e-3;

/// Internal representation of a curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// Coefficients `c_k` for `k = -kmax..=kmax`, stored at index `k + kmax`.
    Fourier { kmax: usize, coeffs: Vec<Complex64> },
    /// Vertices with their arc-length parameters; `knots` has one more entry
    /// than `vertices` and ends at 1.
    Polygon { vertices: Vec<Point>, knots: Vec<f64> },
}

#[derive(Debug, Clone)]
struct SampleTable {
    params: Vec<f64>,
    points: Vec<Point>,
    normals: Vec<Point>,
    grid: PointGrid,
    /// Largest distance between consecutive samples.
    spacing: f64,
}

/// Result of [`JordanCurve::project`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub s: f64,
    /// Signed distance: positive outside the enclosed region.
    pub distance: f64,
    /// Two distinct local minimisers agree within tolerance.
    pub ambiguous: bool,
}

/// A simple closed planar curve with cached scalars.
#[derive(Debug, Clone)]
pub struct JordanCurve {
    repr: Representation,
    reversed: bool,
    area: f64,
    length: f64,
    diameter: f64,
    diameter_params: (f64, f64),
    table: Arc<SampleTable>,
}

impl JordanCurve {
    /// Fourier curve from coefficients indexed `k = -K..=K` (odd length).
    pub fn fourier(coeffs: Vec<Complex64>) -> Result<JordanCurve> {
        if coeffs.len().is_multiple_of(2) || coeffs.is_empty() {
            return Err(TrapezeError::InvalidCurve(
                "fourier coefficient list must have odd length 2K+1".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(TrapezeError::InvalidCurve("non-finite coefficient".into()));
        }
        let kmax = coeffs.len() / 2;
        let mut repr = Representation::Fourier { kmax, coeffs };
        let signed = fourier_area(&repr);
        if signed.abs() < 1e-300 {
            return Err(TrapezeError::InvalidCurve("curve encloses no area".into()));
        }
        let reversed = signed < 0.0;
        if reversed {
            if let Representation::Fourier { coeffs, .. } = &mut repr {
                coeffs.reverse();
            }
        }
        Self::finish(repr, reversed)
    }

    /// Polygon from its vertices (the closing edge is implicit).
    pub fn polygon(vertices: Vec<Point>) -> Result<JordanCurve> {
        let mut vertices = vertices;
        if vertices.len() >= 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(TrapezeError::InvalidCurve("polygon needs at least 3 vertices".into()));
        }
        if vertices.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(TrapezeError::InvalidCurve("non-finite vertex".into()));
        }
        let signed = shoelace(&vertices);
        if signed.abs() < 1e-300 {
            return Err(TrapezeError::InvalidCurve("polygon encloses no area".into()));
        }
        let reversed = signed < 0.0;
        if reversed {
            vertices.reverse();
        }
        let n = vertices.len();
        let mut knots = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        knots.push(0.0);
        for i in 0..n {
            let len = (vertices[(i + 1) % n] - vertices[i]).norm();
            if len == 0.0 {
                return Err(TrapezeError::InvalidCurve("repeated polygon vertex".into()));
            }
            acc += len;
            knots.push(acc);
        }
        for k in knots.iter_mut() {
            *k /= acc;
        }
        knots[n] = 1.0;
        Self::finish(Representation::Polygon { vertices, knots }, reversed)
    }

    /// Smooth curve through closed, parameter-uniform samples, fitted by
    /// least squares with the largest trigonometric degree the sample count
    /// supports.
    pub fn from_samples(points: &[Point]) -> Result<JordanCurve> {
        let n = points.len();
        if n < 5 {
            return Err(TrapezeError::InvalidCurve("need at least 5 samples".into()));
        }
        let kmax = (n - 1) / 2;
        Self::fourier(samples_to_coefficients(points, kmax))
    }

    fn finish(repr: Representation, reversed: bool) -> Result<JordanCurve> {
        let table = Arc::new(build_table(&repr));
        let mut curve = JordanCurve {
            repr,
            reversed,
            area: 0.0,
            length: 0.0,
            diameter: 0.0,
            diameter_params: (0.0, 0.5),
            table,
        };
        let (diameter, params) = curve.compute_diameter();
        curve.diameter = diameter;
        curve.diameter_params = params;
        curve.check_simple()?;
        curve.area = curve.compute_area();
        curve.length = curve.compute_length();
        Ok(curve)
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    /// Input arrived clockwise and was reversed.
    pub fn was_reversed(&self) -> bool {
        self.reversed
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self.repr, Representation::Fourier { .. })
    }

    /// Fourier coefficients, if smooth.
    pub fn coefficients(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Representation::Fourier { coeffs, .. } => Some(coeffs),
            Representation::Polygon { .. } => None,
        }
    }

    /// Vertex parameters of a polygon; empty for smooth curves.
    pub fn breakpoints(&self) -> &[f64] {
        match &self.repr {
            Representation::Fourier { .. } => &[],
            Representation::Polygon { knots, .. } => &knots[..knots.len() - 1],
        }
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// Half the diameter.
    pub fn radius(&self) -> f64 {
        0.5 * self.diameter
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Parameters of a farthest pair.
    pub fn diameter_params(&self) -> (f64, f64) {
        self.diameter_params
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Point at parameter `s` (reduced mod 1).
    pub fn eval(&self, s: f64) -> Point {
        self.derivatives::<1>(s)[0]
    }

    pub fn tangent(&self, s: f64) -> Point {
        self.derivatives::<2>(s)[1]
    }

    /// `[gamma, gamma', ...]` up to order `N - 1` at `s`.
    pub fn derivatives<const N: usize>(&self, s: f64) -> [Point; N] {
        let s = s.rem_euclid(1.0);
        let mut out = [Complex64::new(0.0, 0.0); N];
        match &self.repr {
            Representation::Fourier { kmax, coeffs } => {
                let kmax = *kmax as i64;
                let base = Complex64::from_polar(1.0, TAU * s);
                let c0 = coeffs[kmax as usize];
                out[0] = c0;
                let mut e = Complex64::new(1.0, 0.0);
                for k in 1..=kmax {
                    e *= base;
                    if k % 64 == 0 {
                        e = Complex64::from_polar(1.0, TAU * s * k as f64);
                    }
                    let ep = e;
                    let en = e.conj();
                    let cp = coeffs[(kmax + k) as usize] * ep;
                    let cn = coeffs[(kmax - k) as usize] * en;
                    let w = Complex64::new(0.0, TAU * k as f64);
                    let mut fp = Complex64::new(1.0, 0.0);
                    let mut fn_ = Complex64::new(1.0, 0.0);
                    for item in out.iter_mut() {
                        *item += cp * fp + cn * fn_;
                        fp *= w;
                        fn_ *= -w;
                    }
                }
            }
            Representation::Polygon { vertices, knots } => {
                let n = vertices.len();
                let j = segment_index(knots, s);
                let a = vertices[j];
                let b = vertices[(j + 1) % n];
                let h = knots[j + 1] - knots[j];
                let t = (s - knots[j]) / h;
                out[0] = a + (b - a) * t;
                if N > 1 {
                    out[1] = (b - a) / h;
                }
            }
        }
        out
    }

    /// Unit outward normal at `s`.
    pub fn normal(&self, s: f64) -> Point {
        let t = self.tangent(s);
        Complex64::new(t.im, -t.re) / t.norm()
    }

    /// Signed curvature at `s` (positive where the curve turns left).
    pub fn curvature(&self, s: f64) -> f64 {
        let [_, d1, d2] = self.derivatives::<3>(s);
        cross(d1, d2) / d1.norm().powi(3)
    }

    /// Derivative of the curvature with respect to the parameter.
    pub fn curvature_derivative(&self, s: f64) -> f64 {
        let [_, d1, d2, d3] = self.derivatives::<4>(s);
        let speed2 = d1.norm_sqr();
        let num = cross(d1, d3) * speed2 - 3.0 * cross(d1, d2) * dot(d1, d2);
        num / speed2.powf(2.5)
    }

    /// `n` points at parameters `i / n`.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        (0..n).map(|i| self.eval(i as f64 / n as f64)).collect()
    }

    /// Integrate a function of the parameter over `[a, b]` (any order),
    /// splitting at polygon vertices so that each piece is smooth.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, scale: f64, mut f: F) -> f64 {
        if a == b {
            return 0.0;
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let cuts = self.cuts(lo, hi);
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            acc += match self.repr {
                Representation::Fourier { .. } => quadrature::adaptive(w[0], w[1], scale, &mut f),
                Representation::Polygon { .. } => quadrature::composite(w[0], w[1], 1, &mut f),
            };
        }
        sign * acc
    }

    fn cuts(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut cuts = vec![lo];
        let bps = self.breakpoints();
        if !bps.is_empty() {
            let start = lo.floor() as i64;
            let end = hi.ceil() as i64;
            for period in start..=end {
                for &k in bps {
                    let x = period as f64 + k;
                    if x > lo && x < hi {
                        cuts.push(x);
                    }
                }
            }
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        cuts.push(hi);
        cuts
    }

    /// `integral of x dy` along the curve from parameter `a` to `b`.
    pub fn x_dy(&self, a: f64, b: f64) -> f64 {
        let scale = self.diameter * self.diameter;
        self.integrate(a, b, scale, |s| {
            let [p, d] = self.derivatives::<2>(s);
            p.re * d.im
        })
    }

    /// Signed area swept by the segment from `center` to the curve as the
    /// parameter runs from `a` to `b`: `(1/2) integral of (gamma - c) x dgamma`.
    pub fn swept_area(&self, a: f64, b: f64, center: Point) -> f64 {
        let scale = self.diameter * self.diameter;
        self.integrate(a, b, scale, |s| {
            let [p, d] = self.derivatives::<2>(s);
            0.5 * cross(p - center, d)
        })
    }

    fn compute_area(&self) -> f64 {
        match &self.repr {
            Representation::Polygon { vertices, .. } => shoelace(vertices),
            Representation::Fourier { .. } => self.swept_area(0.0, 1.0, Complex64::new(0.0, 0.0)),
        }
    }

    fn compute_length(&self) -> f64 {
        match &self.repr {
            Representation::Polygon { vertices, .. } => {
                let n = vertices.len();
                (0..n).map(|i| (vertices[(i + 1) % n] - vertices[i]).norm()).sum()
            }
            Representation::Fourier { .. } => {
                self.integrate(0.0, 1.0, self.diameter, |s| self.tangent(s).norm())
            }
        }
    }

    fn compute_diameter(&self) -> (f64, (f64, f64)) {
        match &self.repr {
            Representation::Polygon { vertices, knots } => {
                let n = vertices.len();
                let mut best = (0.0, (0.0, 0.0));
                for i in 0..n {
                    for j in i + 1..n {
                        let d = (vertices[i] - vertices[j]).norm();
                        if d > best.0 {
                            best = (d, (knots[i], knots[j]));
                        }
                    }
                }
                best
            }
            Representation::Fourier { .. } => {
                let n = 512;
                let pts: Vec<Point> = (0..n).map(|i| self.eval(i as f64 / n as f64)).collect();
                let mut cands: Vec<(f64, usize, usize)> = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        cands.push(((pts[i] - pts[j]).norm(), i, j));
                    }
                }
                cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
                let mut best = (0.0, (0.0, 0.0));
                for &(_, i, j) in cands.iter().take(8) {
                    let (d, st) = self.ascend_distance(i as f64 / n as f64, j as f64 / n as f64);
                    if d > best.0 {
                        best = (d, st);
                    }
                }
                best
            }
        }
    }

    /// Newton ascent of `|gamma(s) - gamma(t)|` from a starting pair.
    fn ascend_distance(&self, mut s: f64, mut t: f64) -> (f64, (f64, f64)) {
        let mut best = ((self.eval(s) - self.eval(t)).norm(), (s, t));
        for _ in 0..50 {
            let [a, a1, a2] = self.derivatives::<3>(s);
            let [b, b1, b2] = self.derivatives::<3>(t);
            let d = a - b;
            let g = [dot(d, a1), -dot(d, b1)];
            let h = [
                [a1.norm_sqr() + dot(d, a2), -dot(a1, b1)],
                [-dot(a1, b1), b1.norm_sqr() - dot(d, b2)],
            ];
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            let (ds, dt) = if det.abs() > 1e-300 {
                (
                    -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
                    -(h[0][0] * g[1] - h[1][0] * g[0]) / det,
                )
            } else {
                (0.0, 0.0)
            };
            let step = (ds * ds + dt * dt).sqrt();
            let cap = 0.01;
            let scale = if step > cap { cap / step } else { 1.0 };
            let (ns, nt) = (s + ds * scale, t + dt * scale);
            let val = (self.eval(ns) - self.eval(nt)).norm();
            if val >= best.0 {
                best = (val, (ns.rem_euclid(1.0), nt.rem_euclid(1.0)));
                s = ns;
                t = nt;
            } else {
                break;
            }
            if step < 1e-15 {
                break;
            }
        }
        best
    }

    /// Verify the simplicity invariant on the sample polyline.
    fn check_simple(&self) -> Result<()> {
        let table = &self.table;
        let m = table.points.len();
        let tol = SIMPLICITY_REL_TOL * self.diameter;
        let gap = ((SIMPLICITY_MIN_GAP * m as f64).ceil() as usize).max(2);
        let segs: Vec<(Point, Point)> = (0..m)
            .map(|i| (table.points[i], table.points[(i + 1) % m]))
            .collect();
        let mids: Vec<Point> = segs.iter().map(|(a, b)| 0.5 * (a + b)).collect();
        let grid = PointGrid::new(&mids);
        let reach = table.spacing + tol;
        let mut near = Vec::new();
        for i in 0..m {
            grid.within(&mids, mids[i], reach, &mut near);
            for &j in &near {
                if j <= i {
                    continue;
                }
                let diff = j - i;
                if diff.min(m - diff) < gap {
                    continue;
                }
                let d = segment_distance(segs[i].0, segs[i].1, segs[j].0, segs[j].1);
                if d <= tol {
                    return Err(TrapezeError::NonSimpleCurve {
                        s: table.params[i],
                        t: table.params[j],
                        distance: d,
                    });
                }
            }
        }
        Ok(())
    }

    /// Nearest point on the curve.
    ///
    /// Ties within `1e-9` of the diameter are reported as ambiguous and
    /// resolved toward the smaller parameter.
    pub fn project(&self, p: Point) -> Projection {
        match &self.repr {
            Representation::Polygon { vertices, knots } => project_polygon(vertices, knots, p, self.diameter),
            Representation::Fourier { .. } => self.project_smooth(p),
        }
    }

    fn project_smooth(&self, p: Point) -> Projection {
        let table = &self.table;
        let m = table.points.len();
        let (i0, d0) = table.grid.nearest(&table.points, p);
        let mut near = Vec::new();
        table.grid.within(&table.points, p, d0 + 2.0 * table.spacing, &mut near);
        let dist = |i: usize| (table.points[i % m] - p).norm();
        let mut cands: Vec<(f64, usize)> = near
            .iter()
            .copied()
            .filter(|&i| {
                let d = dist(i);
                d <= dist(i + m - 1) && d <= dist(i + 1)
            })
            .map(|i| (dist(i), i))
            .collect();
        if cands.is_empty() {
            cands.push((d0, i0));
        }
        cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cands.truncate(16);
        let h = 1.0 / m as f64;
        let mut refined: Vec<(f64, f64)> = cands
            .iter()
            .map(|&(_, i)| self.refine_projection(p, table.params[i], h))
            .collect();
        refined.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
        let tol = SIMPLICITY_REL_TOL * self.diameter;
        let best_d = refined[0].0;
        let mut ties: Vec<(f64, f64)> = refined
            .iter()
            .copied()
            .filter(|(d, _)| *d <= best_d + tol)
            .collect();
        ties.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        ties.dedup_by(|a, b| periodic_gap(a.1, b.1) < 1e-6);
        let ambiguous = ties.len() > 1 && periodic_gap(ties[0].1, ties[ties.len() - 1].1) >= 1e-6;
        let (d, s) = if ambiguous { ties[0] } else { refined[0] };
        let q = self.eval(s);
        let sign = if dot(p - q, self.normal(s)) >= 0.0 { 1.0 } else { -1.0 };
        Projection {
            s,
            distance: sign * d,
            ambiguous,
        }
    }

    /// Safeguarded Newton for `(gamma(s) - p) . gamma'(s) = 0` on
    /// `[s0 - h, s0 + h]`; returns `(distance, s)`.
    fn refine_projection(&self, p: Point, s0: f64, h: f64) -> (f64, f64) {
        let f = |s: f64| {
            let [g, d1, d2] = self.derivatives::<3>(s);
            (dot(g - p, d1), d1.norm_sqr() + dot(g - p, d2))
        };
        let (mut lo, mut hi) = (s0 - h, s0 + h);
        let (flo, _) = f(lo);
        let (fhi, _) = f(hi);
        let mut s = s0;
        if flo < 0.0 && fhi > 0.0 {
            for _ in 0..60 {
                let (fs, dfs) = f(s);
                if fs == 0.0 {
                    break;
                }
                if fs < 0.0 {
                    lo = s;
                } else {
                    hi = s;
                }
                let newton = s - fs / dfs;
                let next = if dfs > 0.0 && newton > lo && newton < hi {
                    newton
                } else {
                    0.5 * (lo + hi)
                };
                if (next - s).abs() < 1e-16 {
                    s = next;
                    break;
                }
                s = next;
            }
        } else {
            // No bracketed stationary point: minimise the distance directly.
            let golden = 0.5 * (5f64.sqrt() - 1.0);
            let d = |s: f64| (self.eval(s) - p).norm();
            let (mut a, mut b) = (lo, hi);
            let mut c = b - golden * (b - a);
            let mut e = a + golden * (b - a);
            for _ in 0..80 {
                if d(c) < d(e) {
                    b = e;
                } else {
                    a = c;
                }
                c = b - golden * (b - a);
                e = a + golden * (b - a);
            }
            s = 0.5 * (a + b);
        }
        ((self.eval(s) - p).norm(), s.rem_euclid(1.0))
    }

    /// Fast signed distance from the sample table, used for seeding.
    pub(crate) fn coarse_distance(&self, p: Point) -> (f64, f64) {
        match &self.repr {
            Representation::Polygon { .. } => {
                let pr = self.project(p);
                (pr.s, pr.distance)
            }
            Representation::Fourier { .. } => {
                let t = &self.table;
                let (i, d) = t.grid.nearest(&t.points, p);
                let sign = if dot(p - t.points[i], t.normals[i]) >= 0.0 { 1.0 } else { -1.0 };
                (t.params[i], sign * d)
            }
        }
    }

    /// Linear interpolation in the sample table for smooth curves (exact for
    /// polygons). Much cheaper than [`JordanCurve::eval`] at high degree;
    /// the error is quadratic in the table spacing.
    pub fn eval_coarse(&self, s: f64) -> Point {
        match &self.repr {
            Representation::Polygon { .. } => self.eval(s),
            Representation::Fourier { .. } => {
                let pts = &self.table.points;
                let m = pts.len();
                let x = s.rem_euclid(1.0) * m as f64;
                let i = (x.floor() as usize).min(m - 1);
                let f = x - i as f64;
                pts[i] * (1.0 - f) + pts[(i + 1) % m] * f
            }
        }
    }

    /// Nearest sample-table parameter to `p`.
    pub(crate) fn coarse_param(&self, p: Point) -> f64 {
        let t = &self.table;
        let (i, _) = t.grid.nearest(&t.points, p);
        t.params[i]
    }

    /// Radius of the smallest enclosing circle (of the vertices, or of the
    /// dense sample table for smooth curves).
    pub fn enclosing_radius(&self) -> f64 {
        let pts: Vec<Point> = match &self.repr {
            Representation::Polygon { vertices, .. } => vertices.clone(),
            Representation::Fourier { .. } => self.table.points.clone(),
        };
        min_enclosing_circle(pts).1
    }

    /// Image under `z -> a z + b` with `a != 0`. Orientation is preserved for
    /// every such map, so the result needs no reversal.
    pub fn similarity(&self, a: Complex64, b: Complex64) -> Result<JordanCurve> {
        match &self.repr {
            Representation::Fourier { kmax, coeffs } => {
                let mut c: Vec<Complex64> = coeffs.iter().map(|x| x * a).collect();
                c[*kmax] += b;
                JordanCurve::fourier(c)
            }
            Representation::Polygon { vertices, .. } => {
                JordanCurve::polygon(vertices.iter().map(|v| v * a + b).collect())
            }
        }
    }

    /// Uniformly rescale about the area centroid so the enclosed area becomes
    /// `target`.
    pub fn rescale_to_area(&self, target: f64) -> Result<JordanCurve> {
        let lambda = (target / self.area).sqrt();
        let c = self.centroid();
        self.similarity(Complex64::new(lambda, 0.0), c * (1.0 - lambda))
    }

    /// Centroid of the enclosed region.
    pub fn centroid(&self) -> Point {
        let scale = self.diameter.powi(3);
        let mx = self.integrate(0.0, 1.0, scale, |s| {
            let [p, d] = self.derivatives::<2>(s);
            0.5 * p.re * p.re * d.im
        });
        let my = self.integrate(0.0, 1.0, scale, |s| {
            let [p, d] = self.derivatives::<2>(s);
            -0.5 * p.im * p.im * d.re
        });
        Complex64::new(mx, my) / self.area
    }

    /// Sup distance to another curve over a common parametrisation.
    pub fn parametric_deviation(&self, other: &JordanCurve, samples: usize) -> f64 {
        (0..samples)
            .map(|i| {
                let s = i as f64 / samples as f64;
                (self.eval(s) - other.eval(s)).norm()
            })
            .fold(0.0, f64::max)
    }
}

pub fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

pub fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Distance between parameters on the unit circle.
pub fn periodic_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn segment_index(knots: &[f64], s: f64) -> usize {
    let n = knots.len() - 1;
    match knots.binary_search_by(|k| k.partial_cmp(&s).unwrap()) {
        Ok(i) => i.min(n - 1),
        Err(i) => (i - 1).min(n - 1),
    }
}

fn shoelace(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| cross(v[i], v[(i + 1) % n])).sum::<f64>()
}

fn fourier_area(repr: &Representation) -> f64 {
    match repr {
        Representation::Fourier { kmax, coeffs } => {
            let kmax = *kmax as i64;
            (-kmax..=kmax)
                .map(|k| PI * k as f64 * coeffs[(k + kmax) as usize].norm_sqr())
                .sum()
        }
        Representation::Polygon { vertices, .. } => shoelace(vertices),
    }
}

/// Least-squares trigonometric fit of degree `kmax` to parameter-uniform
/// closed samples.
pub fn samples_to_coefficients(points: &[Point], kmax: usize) -> Vec<Complex64> {
    let n = points.len();
    assert!(2 * kmax < n);
    let mut buf: Vec<Complex64> = points.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * kmax + 1];
    for k in -(kmax as i64)..=kmax as i64 {
        coeffs[(k + kmax as i64) as usize] = buf[k.rem_euclid(n as i64) as usize] / n as f64;
    }
    coeffs
}

fn build_table(repr: &Representation) -> SampleTable {
    let (params, points, normals) = match repr {
        Representation::Fourier { kmax, coeffs } => {
            let m = (16 * kmax).next_power_of_two().clamp(1024, 1 << 16);
            let mut pos = vec![Complex64::new(0.0, 0.0); m];
            let mut vel = vec![Complex64::new(0.0, 0.0); m];
            for (idx, c) in coeffs.iter().enumerate() {
                let k = idx as i64 - *kmax as i64;
                let slot = k.rem_euclid(m as i64) as usize;
                pos[slot] = *c;
                vel[slot] = c * Complex64::new(0.0, TAU * k as f64);
            }
            let plan = FftPlanner::new().plan_fft_inverse(m);
            plan.process(&mut pos);
            plan.process(&mut vel);
            let params = (0..m).map(|i| i as f64 / m as f64).collect();
            let normals = vel
                .iter()
                .map(|t| Complex64::new(t.im, -t.re) / t.norm())
                .collect();
            (params, pos, normals)
        }
        Representation::Polygon { vertices, knots } => {
            let n = vertices.len();
            let per_edge = (4096 / n).max(4);
            let mut params = Vec::new();
            let mut points = Vec::new();
            let mut normals = Vec::new();
            for j in 0..n {
                let a = vertices[j];
                let b = vertices[(j + 1) % n];
                let t = (b - a) / (b - a).norm();
                for k in 0..per_edge {
                    let u = k as f64 / per_edge as f64;
                    params.push(knots[j] + u * (knots[j + 1] - knots[j]));
                    points.push(a + (b - a) * u);
                    normals.push(Complex64::new(t.im, -t.re));
                }
            }
            (params, points, normals)
        }
    };
    let m = points.len();
    let spacing = (0..m)
        .map(|i| (points[(i + 1) % m] - points[i]).norm())
        .fold(0.0, f64::max);
    let grid = PointGrid::new(&points);
    SampleTable {
        params,
        points,
        normals,
        grid,
        spacing,
    }
}

fn project_polygon(vertices: &[Point], knots: &[f64], p: Point, diameter: f64) -> Projection {
    let n = vertices.len();
    let tol = SIMPLICITY_REL_TOL * diameter;
    let mut hits: Vec<(f64, f64)> = Vec::with_capacity(n);
    for j in 0..n {
        let a = vertices[j];
        let b = vertices[(j + 1) % n];
        let ab = b - a;
        let t = (dot(p - a, ab) / ab.norm_sqr()).clamp(0.0, 1.0);
        let q = a + ab * t;
        let s = (knots[j] + t * (knots[j + 1] - knots[j])).rem_euclid(1.0);
        hits.push(((p - q).norm(), s));
    }
    let best = hits.iter().map(|h| h.0).fold(f64::INFINITY, f64::min);
    let mut ties: Vec<f64> = hits.iter().filter(|h| h.0 <= best + tol).map(|h| h.1).collect();
    ties.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ties.dedup_by(|a, b| periodic_gap(*a, *b) < 1e-6);
    let ambiguous = ties.len() > 1;
    let s = ties[0];
    let inside = winding_polygon(vertices, p) != 0;
    Projection {
        s,
        distance: if inside { -best } else { best },
        ambiguous,
    }
}

/// Winding number of a closed polygon around `p`.
pub fn winding_polygon(vertices: &[Point], p: Point) -> i32 {
    let n = vertices.len();
    let mut wn = 0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let side = cross(b - a, p - a);
        if a.im <= p.im {
            if b.im > p.im && side > 0.0 {
                wn += 1;
            }
        } else if b.im <= p.im && side < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let o1 = cross(b - a, c - a);
    let o2 = cross(b - a, d - a);
    let o3 = cross(d - c, a - c);
    let o4 = cross(d - c, b - c);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return 0.0;
    }
    let pt_seg = |p: Point, a: Point, b: Point| {
        let ab = b - a;
        let t = (dot(p - a, ab) / ab.norm_sqr().max(1e-300)).clamp(0.0, 1.0);
        (p - (a + ab * t)).norm()
    };
    pt_seg(a, c, d)
        .min(pt_seg(b, c, d))
        .min(pt_seg(c, a, b))
        .min(pt_seg(d, a, b))
}

/// Smallest enclosing circle (centre, radius) by randomised incremental
/// construction with a fixed shuffle seed.
pub fn min_enclosing_circle(mut pts: Vec<Point>) -> (Point, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    pts.shuffle(&mut rng);
    let eps = 1e-12;
    let inside = |c: Point, r: f64, p: Point| (p - c).norm() <= r * (1.0 + eps) + eps;
    let mut c = pts[0];
    let mut r = 0.0;
    for i in 1..pts.len() {
        if inside(c, r, pts[i]) {
            continue;
        }
        c = pts[i];
        r = 0.0;
        for j in 0..i {
            if inside(c, r, pts[j]) {
                continue;
            }
            c = 0.5 * (pts[i] + pts[j]);
            r = 0.5 * (pts[i] - pts[j]).norm();
            for k in 0..j {
                if inside(c, r, pts[k]) {
                    continue;
                }
                if let Some(cc) = circumcenter(pts[i], pts[j], pts[k]) {
                    c = cc;
                    r = (pts[i] - cc).norm();
                }
            }
        }
    }
    (c, r)
}

fn circumcenter(a: Point, b: Point, c: Point) -> Option<Point> {
    let b = b - a;
    let c = c - a;
    let d = 2.0 * cross(b, c);
    if d.abs() < 1e-300 {
        return None;
    }
    let ux = (c.im * b.norm_sqr() - b.im * c.norm_sqr()) / d;
    let uy = (b.re * c.norm_sqr() - c.re * b.norm_sqr()) / d;
    Some(a + Complex64::new(ux, uy))
}
