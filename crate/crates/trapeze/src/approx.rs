//! Smooth approximation of rough curves and the graphical constants that
//! control it.
//!
//! Mollification is applied in the curve parameter on `[0, 1)`: Fourier mode
//! `k` of the curve is multiplied by the kernel transform at `k eps`.
//! Polygon coefficients are exact (the second derivative is a sum of point
//! masses at the vertices), so no resampling error enters.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::curve_kernel::{JordanCurve, Point, Representation};
use crate::error::{Result, TrapezeError};
use crate::inscriber::{find_inscriptions, Inscription, DEFAULT_TOL, DIAGONAL_EXCLUSION};
use crate::quadrature::composite;
use crate::trapezoid_map::{check_ratio, TrapezoidClass};

/// Mode cap for mollified curves.
pub const MAX_MODES: usize = 8192;
/// Direction samples over a half turn.
pub const DIRECTIONS: usize = 720;
/// Relative slack on the slope test; truncated Fourier curves ripple at
/// about `1e-13` of the diameter, which matters when a slope equals `k`.
const SLOPE_SLACK: f64 = 1e-6;

/// A smooth nonnegative profile on `[-1, 1]` with unit integral.
#[derive(Debug, Clone, Copy)]
pub struct MollifierKernel {
    pub name: &'static str,
    profile: fn(f64) -> f64,
    scale: f64,
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

impl MollifierKernel {
    /// The standard bump `c exp(-1 / (1 - u^2))`.
    pub fn bump() -> MollifierKernel {
        MollifierKernel::new("bump", bump).expect("bump kernel is admissible")
    }

    /// Normalise `profile`, which must vanish outside `(-1, 1)` and be
    /// nonnegative.
    pub fn new(name: &'static str, profile: fn(f64) -> f64) -> Result<MollifierKernel> {
        let samples = 4096;
        for i in 0..=samples {
            let u = -1.25 + 2.5 * i as f64 / samples as f64;
            let v = profile(u);
            if !(v >= 0.0) || (u.abs() >= 1.0 && v != 0.0) {
                return Err(TrapezeError::Domain(format!(
                    "kernel {name} must be nonnegative and supported in [-1, 1]"
                )));
            }
        }
        let mass = composite(-1.0, 1.0, 256, profile);
        if !(mass > 0.0) {
            return Err(TrapezeError::Domain(format!("kernel {name} has no mass")));
        }
        Ok(MollifierKernel {
            name,
            profile,
            scale: 1.0 / mass,
        })
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.scale * (self.profile)(u)
    }

    /// `|integral - 1|` on a finer rule than the one used to normalise.
    pub fn normalization_error(&self) -> f64 {
        (composite(-1.0, 1.0, 1024, |u| self.eval(u)) - 1.0).abs()
    }

    /// `integral phi(u) exp(-2 pi i xi u) du` (real up to the odd part of the
    /// profile).
    pub fn transform(&self, xi: f64) -> Complex64 {
        let panels = 64 + (8.0 * xi.abs()).ceil() as usize;
        let re = composite(-1.0, 1.0, panels, |u| self.eval(u) * (2.0 * PI * xi * u).cos());
        let im = composite(-1.0, 1.0, panels, |u| -self.eval(u) * (2.0 * PI * xi * u).sin());
        Complex64::new(re, im)
    }
}

/// Fourier coefficient `c_k` of a curve (exact for polygons).
fn coefficient(curve: &JordanCurve, k: i64) -> Complex64 {
    match curve.representation() {
        Representation::Fourier { kmax, coeffs } => {
            if k.unsigned_abs() as usize > *kmax {
                Complex64::new(0.0, 0.0)
            } else {
                coeffs[(k + *kmax as i64) as usize]
            }
        }
        Representation::Polygon { vertices, knots } => {
            let n = vertices.len();
            let vel = |i: usize| (vertices[(i + 1) % n] - vertices[i]) / (knots[i + 1] - knots[i]);
            if k == 0 {
                return (0..n)
                    .map(|i| 0.5 * (vertices[i] + vertices[(i + 1) % n]) * (knots[i + 1] - knots[i]))
                    .sum();
            }
            let w = -2.0 * PI * k as f64;
            let sum: Complex64 = (0..n)
                .map(|j| (vel(j) - vel((j + n - 1) % n)) * Complex64::from_polar(1.0, w * knots[j]))
                .sum();
            -sum / (4.0 * PI * PI * (k * k) as f64)
        }
    }
}

/// What a mollification did.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MollifyReport {
    pub eps: f64,
    pub modes: usize,
    /// Sup distance between the input and output at equal parameters.
    pub max_deviation: f64,
    /// Sampled modulus of continuity of the input over radius `eps`.
    pub continuity_bound: f64,
}

/// Convolve the parametrisation with the kernel scaled to `[-eps, eps]`.
pub fn mollify(curve: &JordanCurve, eps: f64, kernel: &MollifierKernel) -> Result<JordanCurve> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(TrapezeError::Domain(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let limit = match curve.representation() {
        Representation::Fourier { kmax, .. } => (*kmax).min(MAX_MODES),
        Representation::Polygon { .. } => MAX_MODES,
    };
    let floor = 1e-15 * curve.diameter();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut quiet = 0;
    let mut kmax = 0;
    for k in 1..=limit {
        let m = kernel.transform(k as f64 * eps);
        let mp = m;
        let mn = m.conj();
        let a = coefficient(curve, k as i64) * mp;
        let b = coefficient(curve, -(k as i64)) * mn;
        pos.push(a);
        neg.push(b);
        if a.norm() < floor && b.norm() < floor {
            quiet += 1;
            if quiet >= 16 {
                break;
            }
        } else {
            quiet = 0;
            kmax = k;
        }
    }
    let kmax = kmax.max(1);
    let mut coeffs = Vec::with_capacity(2 * kmax + 1);
    coeffs.extend(neg[..kmax].iter().rev());
    coeffs.push(coefficient(curve, 0));
    coeffs.extend(&pos[..kmax]);
    JordanCurve::fourier(coeffs).map_err(|e| match e {
        TrapezeError::NonSimpleCurve { .. } | TrapezeError::InvalidCurve(_) => TrapezeError::NotSimple { eps },
        other => other,
    })
}

/// [`mollify`] with deviation bookkeeping.
pub fn mollify_report(curve: &JordanCurve, eps: f64, kernel: &MollifierKernel) -> Result<(JordanCurve, MollifyReport)> {
    let out = mollify(curve, eps, kernel)?;
    let modes = out.coefficients().map_or(0, |c| c.len() / 2);
    let n = 4096;
    let max_deviation = curve.parametric_deviation(&out, n);
    let continuity_bound = (0..n)
        .into_par_iter()
        .map(|i| {
            let s = i as f64 / n as f64;
            let p = curve.eval(s);
            (-16..=16)
                .map(|j| (curve.eval(s + eps * j as f64 / 16.0) - p).norm())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok((
        out,
        MollifyReport {
            eps,
            modes,
            max_deviation,
            continuity_bound,
        },
    ))
}

/// Local monotonicity and `K`-Lipschitz-graphical constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphicalConstants {
    pub k: f64,
    pub mu_k: f64,
    pub mu: f64,
    /// Base parameter realising `mu_k`, and the best direction there.
    pub argmin_param: f64,
    pub argmin_direction: f64,
    /// Angular grid step before refinement.
    pub angular_resolution: f64,
    pub base_points: usize,
}

/// Dense base points; polygon vertices are always included.
fn base_points(curve: &JordanCurve, n: usize) -> (Vec<f64>, Vec<Point>) {
    let mut params: Vec<f64> = match curve.representation() {
        Representation::Fourier { .. } => (0..n).map(|i| i as f64 / n as f64).collect(),
        Representation::Polygon { knots, .. } => {
            let mut p = Vec::with_capacity(n + knots.len());
            for w in knots.windows(2) {
                let m = (((w[1] - w[0]) * n as f64).ceil() as usize).max(1);
                for j in 0..m {
                    p.push(w[0] + (w[1] - w[0]) * j as f64 / m as f64);
                }
            }
            p
        }
    };
    params.dedup();
    let points = params.iter().map(|&s| curve.eval(s)).collect();
    (params, points)
}

/// Margins of every base point along one direction: the projected distance
/// to the nearer end of the maximal window around it on which the projection
/// is strictly monotone (and, with `k`, the graph is `k`-Lipschitz).
fn margins(points: &[Point], angle: f64, k: Option<f64>, tiny: f64) -> Vec<f64> {
    let n = points.len();
    let v = Complex64::from_polar(1.0, angle);
    let g: Vec<f64> = points.iter().map(|p| p.re * v.re + p.im * v.im).collect();
    let h: Vec<f64> = points.iter().map(|p| -p.re * v.im + p.im * v.re).collect();
    let sign: Vec<i8> = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            let dg = g[j] - g[i];
            let dh = h[j] - h[i];
            if dg.abs() <= tiny {
                return 0;
            }
            if let Some(k) = k {
                if dh.abs() > k * dg.abs() * (1.0 + SLOPE_SLACK) + tiny {
                    return 0;
                }
            }
            if dg > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    let mut out = vec![0.0; n];
    // Start at a run boundary so runs do not wrap.
    let Some(start) = (0..n).find(|&i| sign[i] != sign[(i + n - 1) % n]) else {
        return out;
    };
    let mut i = 0;
    while i < n {
        let a = (start + i) % n;
        let sg = sign[a];
        let mut len = 1;
        while len < n && sign[(a + len) % n] == sg {
            len += 1;
        }
        if sg != 0 {
            let ga = g[a];
            let gb = g[(a + len) % n];
            for t in 1..len {
                let j = (a + t) % n;
                out[j] = (g[j] - ga).abs().min((gb - g[j]).abs());
            }
        }
        i += len;
    }
    out
}

/// Margin of one base point along one direction, walking outward.
fn margin_at(points: &[Point], j: usize, angle: f64, k: Option<f64>, tiny: f64) -> f64 {
    let n = points.len();
    let v = Complex64::from_polar(1.0, angle);
    let g = |i: usize| {
        let p = points[i % n];
        p.re * v.re + p.im * v.im
    };
    let h = |i: usize| {
        let p = points[i % n];
        -p.re * v.im + p.im * v.re
    };
    let seg = |i: usize| -> i8 {
        let dg = g(i + 1) - g(i);
        let dh = h(i + 1) - h(i);
        if dg.abs() <= tiny {
            return 0;
        }
        if let Some(k) = k {
            if dh.abs() > k * dg.abs() * (1.0 + SLOPE_SLACK) + tiny {
                return 0;
            }
        }
        if dg > 0.0 {
            1
        } else {
            -1
        }
    };
    let before = seg(j + n - 1);
    if before == 0 || seg(j) != before {
        return 0.0;
    }
    let mut hi = j + 1;
    while hi < j + n && seg(hi) == before {
        hi += 1;
    }
    let mut lo = j + n - 1;
    while lo > j + 1 && seg(lo - 1) == before {
        lo -= 1;
    }
    (g(j) - g(lo)).abs().min((g(hi) - g(j)).abs())
}

fn best_margins(points: &[Point], k: Option<f64>, tiny: f64) -> Vec<(f64, f64)> {
    let n = points.len();
    (0..DIRECTIONS)
        .into_par_iter()
        .map(|d| {
            let angle = PI * d as f64 / DIRECTIONS as f64;
            margins(points, angle, k, tiny).into_iter().map(move |m| (m, angle)).collect::<Vec<_>>()
        })
        .reduce(
            || vec![(0.0, 0.0); n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                        *x = y;
                    }
                }
                a
            },
        )
}

/// Golden-section refinement of the direction at the worst base points.
fn refine(points: &[Point], best: &mut [(f64, f64)], k: Option<f64>, tiny: f64) {
    let mut order: Vec<usize> = (0..best.len()).collect();
    order.sort_by(|&a, &b| best[a].0.total_cmp(&best[b].0));
    let step = PI / DIRECTIONS as f64;
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let refined: Vec<(usize, (f64, f64))> = order[..order.len().min(64)]
        .par_iter()
        .map(|&j| {
            let f = |a: f64| margin_at(points, j, a, k, tiny);
            let (mut a, mut b) = (best[j].1 - step, best[j].1 + step);
            let mut top = best[j];
            for _ in 0..40 {
                let c = b - golden * (b - a);
                let d = a + golden * (b - a);
                let (fc, fd) = (f(c), f(d));
                if fc > top.0 {
                    top = (fc, c);
                }
                if fd > top.0 {
                    top = (fd, d);
                }
                if fc >= fd {
                    b = d;
                } else {
                    a = c;
                }
            }
            (j, top)
        })
        .collect();
    for (j, top) in refined {
        best[j] = top;
    }
}

/// Estimate the local monotonicity constant and the local
/// `k`-Lipschitz-graphical constant on a direction grid with refinement.
pub fn lipschitz_constants(curve: &JordanCurve, k: f64) -> Result<GraphicalConstants> {
    if !(k > 0.0) {
        return Err(TrapezeError::Domain(format!("Lipschitz constant must be positive, got {k}")));
    }
    let (params, points) = base_points(curve, 8192);
    let tiny = 1e-13 * curve.diameter();
    let mut lip = best_margins(&points, Some(k), tiny);
    refine(&points, &mut lip, Some(k), tiny);
    let mut mono = best_margins(&points, None, tiny);
    refine(&points, &mut mono, None, tiny);
    let (j, &(mu_k, dir)) = lip
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .expect("non-empty sample");
    if mu_k <= 1e-9 * curve.diameter() {
        return Err(TrapezeError::NotGraphical { k, s: params[j] });
    }
    let mu = mono.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
    Ok(GraphicalConstants {
        k,
        mu_k,
        mu,
        argmin_param: params[j],
        argmin_direction: dir,
        angular_resolution: PI / DIRECTIONS as f64,
        base_points: points.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PreservationRung {
    pub eps: f64,
    pub mu_k: f64,
    pub mu: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreservationReport {
    pub k: f64,
    pub base: GraphicalConstants,
    /// Rungs ordered by decreasing `eps`.
    pub rungs: Vec<PreservationRung>,
    /// The finest rung's constants are within 5% of the input's or above.
    pub mu_k_preserved: bool,
    pub mu_preserved: bool,
    /// Distances of `mu_k` to the input's value do not grow as `eps`
    /// shrinks (up to the direction resolution).
    pub converging: bool,
    /// Pointwise deviation strictly decreases along the ladder.
    pub deviation_decreasing: bool,
}

/// Track the graphical constants of mollifications along an `eps` ladder.
pub fn mollify_preserves(curve: &JordanCurve, k: f64, eps_seq: &[f64]) -> Result<PreservationReport> {
    let base = lipschitz_constants(curve, k)?;
    let kernel = MollifierKernel::bump();
    let mut eps: Vec<f64> = eps_seq.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    let mut rungs = Vec::with_capacity(eps.len());
    for &e in &eps {
        let (smooth, rep) = mollify_report(curve, e, &kernel)?;
        let c = lipschitz_constants(&smooth, k)?;
        rungs.push(PreservationRung {
            eps: e,
            mu_k: c.mu_k,
            mu: c.mu,
            max_deviation: rep.max_deviation,
        });
    }
    let last = rungs.last().copied();
    let slack = base.mu_k * base.angular_resolution;
    Ok(PreservationReport {
        k,
        base,
        mu_k_preserved: last.is_some_and(|l| l.mu_k >= 0.95 * base.mu_k),
        mu_preserved: last.is_some_and(|l| l.mu >= 0.95 * base.mu),
        converging: rungs
            .windows(2)
            .all(|w| (w[1].mu_k - base.mu_k).abs() <= (w[0].mu_k - base.mu_k).abs() + slack),
        deviation_decreasing: rungs.windows(2).all(|w| w[1].max_deviation < w[0].max_deviation),
        rungs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessRung {
    /// `None` for a curve used as is.
    pub eps: Option<f64>,
    pub witness: Option<Inscription>,
    pub inscriptions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaWitness {
    pub theta: f64,
    pub admissible: bool,
    pub rungs: Vec<WitnessRung>,
    /// Smallest witness diagonal along the ladder.
    pub min_diagonal: f64,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremAReport {
    pub r: f64,
    /// Smallest Lipschitz constant from `{1/4, 1/2, 1, 2, ..., 64}` at which
    /// the curve qualifies.
    pub k: f64,
    /// `Area / (2 (1 - r) Rad^2)`.
    pub angle_bound: f64,
    pub samples: Vec<ThetaWitness>,
    pub pass: bool,
}

/// Largest angle covered by the existence bound.
pub fn angle_bound(curve: &JordanCurve, r: f64) -> f64 {
    curve.area() / (2.0 * (1.0 - r) * curve.radius().powi(2))
}

/// For each angle below the bound, mollify along the ladder, rescale to the
/// original area and look for a non-degenerate inscription. A sample passes
/// when every rung has a witness and the witnesses' diagonals stay above
/// half the first rung's and above the near-diagonal exclusion.
pub fn theorem_a_experiment(
    curve: &JordanCurve,
    r: f64,
    thetas: &[f64],
    ladder: &[f64],
    grid_n: usize,
) -> Result<TheoremAReport> {
    check_ratio(r)?;
    let mut k_used = None;
    for k in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
        if lipschitz_constants(curve, k).is_ok() {
            k_used = Some(k);
            break;
        }
    }
    let k = k_used.ok_or(TrapezeError::NotGraphical {
        k: 64.0,
        s: 0.0,
    })?;
    let area = curve.area();
    let kernel = MollifierKernel::bump();
    let curves: Vec<(Option<f64>, JordanCurve)> = if curve.is_smooth() {
        vec![(None, curve.clone())]
    } else {
        let mut eps = ladder.to_vec();
        eps.sort_by(|a, b| b.total_cmp(a));
        let mut v = Vec::with_capacity(eps.len());
        for e in eps {
            let smooth = mollify(curve, e, &kernel)?.rescale_to_area(area)?;
            v.push((Some(e), smooth));
        }
        v
    };
    let bound = angle_bound(curve, r);
    let mut samples = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let admissible = theta > 0.0 && theta < bound.min(PI);
        let mut rungs = Vec::new();
        let mut error = None;
        if admissible {
            let class = TrapezoidClass::new(r, theta)?;
            for (eps, c) in &curves {
                match find_inscriptions(c, class, grid_n, DEFAULT_TOL) {
                    Ok(set) => {
                        let witness = set
                            .inscriptions
                            .iter()
                            .copied()
                            .max_by(|a, b| a.diag_length.total_cmp(&b.diag_length));
                        if witness.is_none() {
                            error = Some(TrapezeError::NoInscriptionFound { theta: Some(theta) }.to_string());
                        }
                        rungs.push(WitnessRung {
                            eps: *eps,
                            witness,
                            inscriptions: set.inscriptions.len(),
                        });
                    }
                    Err(e) => error = Some(e.to_string()),
                }
            }
        }
        let diags: Vec<f64> = rungs.iter().filter_map(|w| w.witness.map(|i| i.diag_length)).collect();
        let min_diagonal = diags.iter().copied().fold(f64::INFINITY, f64::min);
        let pass = admissible
            && error.is_none()
            && diags.len() == curves.len()
            && min_diagonal > DIAGONAL_EXCLUSION * curve.diameter()
            && min_diagonal >= 0.5 * diags[0];
        samples.push(ThetaWitness {
            theta,
            admissible,
            rungs,
            min_diagonal,
            pass,
            error,
        });
    }
    let pass = samples.iter().filter(|s| s.admissible).all(|s| s.pass) && samples.iter().any(|s| s.admissible);
    Ok(TheoremAReport {
        r,
        k,
        angle_bound: bound,
        samples,
        pass,
    })
}

#[cfg(test)]
mod tests;
