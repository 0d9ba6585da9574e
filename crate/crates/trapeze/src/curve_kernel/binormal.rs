//! Binormal chords: critical points of the squared chord length.

use serde::Serialize;

use super::{dot, periodic_gap, JordanCurve, Point};
use crate::error::{Result, TrapezeError};

/// A chord normal to the curve at both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Binormal {
    pub s1: f64,
    pub s2: f64,
    pub endpoints: [[f64; 2]; 2],
    pub length: f64,
}

/// All binormals found, longest first. `family` is set when the critical
/// points form a continuum (only representatives are listed then).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinormalSet {
    pub binormals: Vec<Binormal>,
    pub family: bool,
}

const SCAN: usize = 256;

impl JordanCurve {
    /// Critical points of `(s1, s2) -> |gamma(s1) - gamma(s2)|^2` off the
    /// diagonal.
    pub fn binormals(&self) -> Result<BinormalSet> {
        if !self.is_smooth() {
            return Err(TrapezeError::RequiresSmooth);
        }
        let n = SCAN;
        let grid: Vec<[Point; 2]> = (0..n)
            .map(|i| {
                let [p, d] = self.derivatives::<2>(i as f64 / n as f64);
                [p, d]
            })
            .collect();
        let grad = |i: usize, j: usize| {
            let [a, da] = grid[i % n];
            let [b, db] = grid[j % n];
            (dot(a - b, da), -dot(a - b, db))
        };
        let min_len = 1e-3 * self.diameter();
        let mut found: Vec<(f64, f64, f64, bool)> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let corners = [grad(i, j), grad(i + 1, j), grad(i, j + 1), grad(i + 1, j + 1)];
                let changes = |f: &dyn Fn(&(f64, f64)) -> f64| {
                    let lo = corners.iter().map(f).fold(f64::INFINITY, f64::min);
                    let hi = corners.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
                    lo <= 0.0 && hi >= 0.0
                };
                if !(changes(&|g| g.0) && changes(&|g| g.1)) {
                    continue;
                }
                let s0 = (i as f64 + 0.5) / n as f64;
                let t0 = (j as f64 + 0.5) / n as f64;
                if let Some((s, t, fam)) = self.refine_binormal(s0, t0) {
                    let len = (self.eval(s) - self.eval(t)).norm();
                    if len > min_len {
                        found.push((s, t, len, fam));
                    }
                }
            }
        }
        let family = found.iter().any(|f| f.3);
        let mut out: Vec<Binormal> = Vec::new();
        found.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.partial_cmp(&b.0).unwrap()));
        for (s, t, len, fam) in found {
            let (s, t) = if s <= t { (s, t) } else { (t, s) };
            let dup = out.iter().any(|b| {
                (periodic_gap(b.s1, s) < 1e-6 && periodic_gap(b.s2, t) < 1e-6)
                    || (fam && (b.length - len).abs() < 1e-6 * self.diameter())
            });
            if dup {
                continue;
            }
            let (p, q) = (self.eval(s), self.eval(t));
            out.push(Binormal {
                s1: s,
                s2: t,
                endpoints: [[p.re, p.im], [q.re, q.im]],
                length: len,
            });
        }
        Ok(BinormalSet {
            binormals: out,
            family,
        })
    }

    /// Newton on the gradient; returns the critical point and whether the
    /// Hessian is rank deficient there.
    fn refine_binormal(&self, mut s: f64, mut t: f64) -> Option<(f64, f64, bool)> {
        for _ in 0..60 {
            let [a, a1, a2] = self.derivatives::<3>(s);
            let [b, b1, b2] = self.derivatives::<3>(t);
            let d = a - b;
            let g = [dot(d, a1), -dot(d, b1)];
            let h11 = a1.norm_sqr() + dot(d, a2);
            let h12 = -dot(a1, b1);
            let h22 = b1.norm_sqr() - dot(d, b2);
            let (ds, dt) = solve_sym2(h11, h12, h22, -g[0], -g[1]);
            let step = ds.hypot(dt);
            let cap = 0.02;
            let k = if step > cap { cap / step } else { 1.0 };
            s += ds * k;
            t += dt * k;
            if step < 1e-14 {
                break;
            }
        }
        let [a, a1, a2] = self.derivatives::<3>(s);
        let [b, b1, b2] = self.derivatives::<3>(t);
        let d = a - b;
        let scale = d.norm() * (a1.norm() + b1.norm());
        let g = dot(d, a1).abs().max(dot(d, b1).abs());
        if !(g <= 1e-10 * scale.max(1e-300)) {
            return None;
        }
        let h11 = a1.norm_sqr() + dot(d, a2);
        let h12 = -dot(a1, b1);
        let h22 = b1.norm_sqr() - dot(d, b2);
        let (lmin, lmax) = sym2_eigen_abs(h11, h12, h22);
        let family = lmin < 1e-6 * lmax;
        Some((s.rem_euclid(1.0), t.rem_euclid(1.0), family))
    }
}

/// Least-norm solution of a symmetric 2x2 system, truncating tiny
/// eigenvalues.
fn solve_sym2(a: f64, b: f64, c: f64, r1: f64, r2: f64) -> (f64, f64) {
    let tr = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let l1 = tr + disc;
    let l2 = tr - disc;
    let (v1, v2) = if b.abs() > 1e-300 || (a - c).abs() > 1e-300 {
        let va = (b, l1 - a);
        let vb = (l1 - c, b);
        let v = if va.0.hypot(va.1) >= vb.0.hypot(vb.1) { va } else { vb };
        let nv = v.0.hypot(v.1);
        let u = (v.0 / nv, v.1 / nv);
        (u, (-u.1, u.0))
    } else {
        ((1.0, 0.0), (0.0, 1.0))
    };
    let lmax = l1.abs().max(l2.abs());
    let mut x = (0.0, 0.0);
    for (l, v) in [(l1, v1), (l2, v2)] {
        if l.abs() > 1e-10 * lmax {
            let coef = (v.0 * r1 + v.1 * r2) / l;
            x.0 += coef * v.0;
            x.1 += coef * v.1;
        }
    }
    x
}

fn sym2_eigen_abs(a: f64, b: f64, c: f64) -> (f64, f64) {
    let tr = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (l1, l2) = ((tr + disc).abs(), (tr - disc).abs());
    (l1.min(l2), l1.max(l2))
}
