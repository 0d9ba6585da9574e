//! Action spectra, inscription branches in `theta`, the degree-2 spectral
//! proxy and the checks on its bounds and limits.

use nalgebra::{DMatrix, DVector, Matrix4x2};
use serde::Serialize;
use std::f64::consts::PI;

use crate::action_lab::{action, ActionValue};
use crate::curve_kernel::{JordanCurve, Point};
use crate::error::{Result, TrapezeError};
use crate::inscriber::{
    assemble, find_inscriptions, newton, Inscription, DEFAULT_TOL, DIAGONAL_EXCLUSION, FAMILY_RATIO,
};
use crate::trapezoid_map::{check_ratio, TrapezoidClass};

/// Inscriptions at one class with their actions, ascending by action.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionSpectrum {
    pub class: TrapezoidClass,
    pub entries: Vec<SpectrumEntry>,
    /// No inscription was found.
    pub empty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub inscription: Inscription,
    pub action: ActionValue,
}

impl ActionSpectrum {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.action.value).collect()
    }
}

pub fn spectrum(curve: &JordanCurve, class: TrapezoidClass, grid_n: usize) -> Result<ActionSpectrum> {
    let set = find_inscriptions(curve, class, grid_n, DEFAULT_TOL)?;
    let mut entries = Vec::with_capacity(set.inscriptions.len());
    for ins in set.inscriptions {
        entries.push(SpectrumEntry {
            inscription: ins,
            action: action(curve, &ins)?,
        });
    }
    entries.sort_by(|a, b| a.action.value.total_cmp(&b.action.value));
    Ok(ActionSpectrum {
        class,
        empty: entries.is_empty(),
        entries,
    })
}

/// Step control for [`continue_branch`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepControl {
    pub initial: f64,
    pub max: f64,
    pub min: f64,
    /// Largest accepted parameter jump between predictor and corrector.
    pub max_correction: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            initial: 0.01,
            max: 0.05,
            min: 1e-9,
            max_correction: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchSample {
    pub theta: f64,
    pub inscription: Inscription,
    pub action: ActionValue,
}

/// How a branch ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BranchLimit {
    /// The diagonal collapsed. `param` and `limit_action` are extrapolated
    /// to `theta = pi`; `point` is the vertex centroid of the last sample.
    Shrinkout { point: [f64; 2], param: f64, limit_action: f64 },
    /// The four vertices became collinear without collapsing.
    Quadrisecant { points: [[f64; 2]; 4], action: f64 },
    /// The corrector failed with the step at its minimum.
    Fold { theta: f64 },
    RangeEnd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub r: f64,
    pub samples: Vec<BranchSample>,
    pub limit: BranchLimit,
    /// Largest per-step excess over the action variation bound (zero or
    /// negative when the bound held).
    pub variation_excess: f64,
}

impl Branch {
    pub fn last(&self) -> &BranchSample {
        self.samples.last().expect("branch has a seed sample")
    }
}

/// Largest action slope in `theta` allowed by the variation bound.
pub fn variation_bound(curve: &JordanCurve, r: f64) -> f64 {
    2.0 * r * (1.0 - r) * curve.radius().powi(2)
}

fn unwrap_params(p: [f64; 4], reference: [f64; 4]) -> [f64; 4] {
    let mut out = p;
    for k in 0..4 {
        out[k] = p[k] - (p[k] - reference[k]).round();
    }
    out
}

fn collinearity(v: &[Point; 4]) -> f64 {
    let c = v.iter().sum::<Point>() / 4.0;
    let m = Matrix4x2::from_fn(|i, j| if j == 0 { v[i].re - c.re } else { v[i].im - c.im });
    m.singular_values().min()
}

fn min_pair_gap(v: &[Point; 4]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..4 {
        for j in i + 1..4 {
            gap = gap.min((v[i] - v[j]).norm());
        }
    }
    gap
}

/// Least-squares polynomial of degree `deg` in `x`, evaluated at 0.
fn extrapolate_to_zero(xs: &[f64], ys: &[f64], deg: usize) -> f64 {
    let deg = deg.min(xs.len().saturating_sub(1));
    let a = DMatrix::from_fn(xs.len(), deg + 1, |i, j| xs[i].powi(j as i32));
    let b = DVector::from_column_slice(ys);
    match a.svd(true, true).solve(&b, 1e-14) {
        Ok(c) => c[0],
        Err(_) => *ys.last().unwrap_or(&0.0),
    }
}

fn shrinkout_limit(samples: &[BranchSample]) -> BranchLimit {
    let last = samples.last().expect("non-empty branch");
    let tail = &samples[samples.len().saturating_sub(5)..];
    let xs: Vec<f64> = tail.iter().map(|s| PI - s.theta).collect();
    let acts: Vec<f64> = tail.iter().map(|s| s.action.value).collect();
    let anchor = last.inscription.s1;
    let params: Vec<f64> = tail
        .iter()
        .map(|s| {
            let p = unwrap_params(s.inscription.params(), [anchor; 4]);
            p.iter().sum::<f64>() / 4.0
        })
        .collect();
    let centroid = last.inscription.vertices.iter().sum::<Point>() / 4.0;
    BranchLimit::Shrinkout {
        point: [centroid.re, centroid.im],
        param: extrapolate_to_zero(&xs, &params, 2).rem_euclid(1.0),
        limit_action: extrapolate_to_zero(&xs, &acts, 2),
    }
}

/// Follow the inscription `seed` (solved at `theta_start`) to `theta_end`
/// by secant prediction and Newton correction. `theta_end` may equal `pi`.
pub fn continue_branch(
    curve: &JordanCurve,
    r: f64,
    theta_start: f64,
    theta_end: f64,
    seed: &Inscription,
    ctrl: StepControl,
) -> Result<Branch> {
    check_ratio(r)?;
    let class0 = TrapezoidClass::limit(r, theta_start)?;
    TrapezoidClass::limit(r, theta_end)?;
    let diam = curve.diameter();
    let tol = DEFAULT_TOL * diam;
    let delta = DIAGONAL_EXCLUSION * diam;
    let start = newton(curve, class0, seed.params(), tol);
    if !start.converged {
        return Err(TrapezeError::SeedInvalid {
            residual: start.residual_norm,
        });
    }
    let seed_ins = assemble(curve, class0, start.params, seed.family).ok_or(TrapezeError::SeedInvalid {
        residual: start.residual_norm,
    })?;
    let bound = variation_bound(curve, r);
    let dir = if theta_end >= theta_start { 1.0 } else { -1.0 };
    let mut samples = vec![BranchSample {
        theta: theta_start,
        inscription: seed_ins,
        action: action(curve, &seed_ins)?,
    }];
    let mut xs: Vec<[f64; 4]> = vec![unwrap_params(start.params, seed.params())];
    let mut step = ctrl.initial.min(ctrl.max);
    let mut excess = f64::NEG_INFINITY;
    let mut theta = theta_start;
    let limit = loop {
        if (theta_end - theta) * dir <= 0.0 {
            break BranchLimit::RangeEnd;
        }
        let h = step.min((theta_end - theta).abs());
        let next = if h >= (theta_end - theta).abs() { theta_end } else { theta + dir * h };
        let cur = *xs.last().unwrap();
        let pred = if xs.len() >= 2 {
            let prev = xs[xs.len() - 2];
            let dprev = samples[samples.len() - 1].theta - samples[samples.len() - 2].theta;
            let ratio = (next - theta) / dprev;
            [0, 1, 2, 3].map(|k| cur[k] + ratio * (cur[k] - prev[k]))
        } else {
            cur
        };
        let class = TrapezoidClass::limit(r, next)?;
        let out = newton(curve, class, pred, tol);
        let jump = (0..4).map(|k| (out.params[k] - pred[k]).abs()).fold(0.0, f64::max);
        let z = curve.eval(out.params[0]);
        let w = curve.eval(out.params[1]);
        let diag = (z - w).norm();
        if !out.converged || jump > ctrl.max_correction {
            if step <= ctrl.min {
                break BranchLimit::Fold { theta };
            }
            step = (0.5 * step).max(ctrl.min);
            continue;
        }
        if diag <= delta {
            break shrinkout_limit(&samples);
        }
        let Some(ins) = assemble(curve, class, out.params, out.sigma_ratio < FAMILY_RATIO) else {
            break shrinkout_limit(&samples);
        };
        let act = action(curve, &ins)?;
        let last_act = samples.last().unwrap().action.value;
        excess = excess.max((act.value - last_act).abs() - bound * (next - theta).abs() - 1e-6 * curve.area());
        samples.push(BranchSample {
            theta: next,
            inscription: ins,
            action: act,
        });
        xs.push(out.params);
        theta = next;
        let v = ins.vertices;
        if collinearity(&v) < 1e-7 * diam && min_pair_gap(&v) > delta {
            break BranchLimit::Quadrisecant {
                points: v.map(|p| [p.re, p.im]),
                action: act.value,
            };
        }
        if out.iterations <= 4 {
            step = (1.5 * step).min(ctrl.max);
        }
    };
    Ok(Branch {
        r,
        samples,
        limit,
        variation_excess: excess.max(0.0),
    })
}

/// Largest angle at which the proxy is seeded from the longest binormal.
pub const PROXY_SEED_THETA: f64 = 0.1;

/// Degree-2 spectral proxy on a `theta` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralProxy {
    pub r: f64,
    pub theta_grid: Vec<f64>,
    pub l2_values: Vec<f64>,
    /// Where each value came from: `"branch"` or `"spectrum"` after a fold.
    pub provenance: Vec<String>,
    /// Samples taken from the spectrum rather than the branch.
    pub heuristic: Vec<bool>,
    /// Strictly increasing up to the corrector tolerance.
    pub monotone: bool,
    /// Largest grid-step slope.
    pub max_slope: f64,
    pub slope_bound: f64,
}

/// Proxy for the degree-2 spectral invariant: the action along the branch
/// born at the longest binormal, continued across `theta_grid`.
pub fn l2_proxy(curve: &JordanCurve, r: f64, theta_grid: &[f64]) -> Result<SpectralProxy> {
    check_ratio(r)?;
    let mut grid = theta_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let theta0 = *grid
        .first()
        .ok_or_else(|| TrapezeError::Domain("theta grid is empty".into()))?;
    // The binormal seed is only reliable near theta = 0; later grids are
    // reached by continuation from there.
    let theta_seed = theta0.min(PROXY_SEED_THETA);
    let class0 = TrapezoidClass::new(r, theta_seed)?;
    let binormals = curve.binormals()?;
    let top = binormals
        .binormals
        .first()
        .ok_or(TrapezeError::ProxyUnavailable { theta: theta0 })?;
    let tol = DEFAULT_TOL * curve.diameter();
    let mut seeds: Vec<Inscription> = Vec::new();
    for (a, b) in [(top.s1, top.s2), (top.s2, top.s1)] {
        let out = newton(curve, class0, [a, b, a, b], tol);
        if out.converged {
            if let Some(ins) = assemble(curve, class0, out.params, out.sigma_ratio < FAMILY_RATIO) {
                if (ins.diag_length - top.length).abs() < 0.1 * top.length {
                    seeds.push(ins);
                }
            }
        }
    }
    let mut best: Option<(Inscription, f64)> = None;
    for ins in seeds {
        let v = action(curve, &ins)?.value;
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((ins, v));
        }
    }
    let (mut current, mut v0) = best.ok_or(TrapezeError::ProxyUnavailable { theta: theta0 })?;
    if theta0 > theta_seed {
        let b = continue_branch(curve, r, theta_seed, theta0, &current, StepControl::default())
            .ok()
            .filter(|b| b.limit == BranchLimit::RangeEnd && (b.last().theta - theta0).abs() < 1e-12)
            .ok_or(TrapezeError::ProxyUnavailable { theta: theta0 })?;
        current = b.last().inscription;
        v0 = b.last().action.value;
    }
    let mut values = vec![v0];
    let mut provenance = vec!["branch".to_string()];
    let mut heuristic = vec![false];
    for k in 1..grid.len() {
        let (t0, t1) = (grid[k - 1], grid[k]);
        let branch = continue_branch(curve, r, t0, t1, &current, StepControl::default());
        let ok = branch
            .as_ref()
            .ok()
            .filter(|b| b.limit == BranchLimit::RangeEnd && (b.last().theta - t1).abs() < 1e-12);
        if let Some(b) = ok {
            let s = b.last();
            current = s.inscription;
            values.push(s.action.value);
            provenance.push("branch".into());
            heuristic.push(false);
            continue;
        }
        let spec = spectrum(curve, TrapezoidClass::new(r, t1)?, 256)?;
        let last = *values.last().unwrap();
        let entry = spec
            .entries
            .iter()
            .min_by(|a, b| (a.action.value - last).abs().total_cmp(&(b.action.value - last).abs()))
            .ok_or(TrapezeError::ProxyUnavailable { theta: t1 })?;
        current = entry.inscription;
        values.push(entry.action.value);
        provenance.push("spectrum".into());
        heuristic.push(true);
    }
    let slack = 1e-9 * curve.area();
    let monotone = values.windows(2).all(|w| w[1] > w[0] - slack);
    let max_slope = grid
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0]))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectralProxy {
        r,
        theta_grid: grid,
        l2_values: values,
        provenance,
        heuristic,
        monotone,
        max_slope,
        slope_bound: variation_bound(curve, r),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleReport {
    pub checked: usize,
    /// `(i, j, k, excess)` with `theta_k = theta_i + theta_j`.
    pub violations: Vec<(usize, usize, usize, f64)>,
}

/// `l2(a + b) <= l2(a) + l2(b)` over all grid pairs whose sum is on the grid.
pub fn check_triangle(proxy: &SpectralProxy, area: f64) -> TriangleReport {
    let g = &proxy.theta_grid;
    let v = &proxy.l2_values;
    let mut checked = 0;
    let mut violations = Vec::new();
    for i in 0..g.len() {
        for j in i..g.len() {
            let sum = g[i] + g[j];
            if sum > PI + 1e-12 {
                continue;
            }
            let Some(k) = g.iter().position(|&t| (t - sum).abs() <= 1e-9 * sum.max(1.0)) else {
                continue;
            };
            checked += 1;
            let excess = v[k] - v[i] - v[j] - 1e-6 * area;
            if excess > 0.0 {
                violations.push((i, j, k, excess));
            }
        }
    }
    TriangleReport { checked, violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurnAngle {
    pub value: f64,
    /// `r = 1/2`, where the value is the continuous extension.
    pub flagged: bool,
}

/// Largest turning angle `arctan(cot(theta/2) / (1 - 2r))` of the long edge
/// for small inscriptions.
pub fn max_turn_angle(r: f64, theta: f64) -> Result<TurnAngle> {
    check_ratio(r)?;
    if !(theta > 0.0 && theta < PI) {
        return Err(TrapezeError::Domain(format!("theta must lie in (0, pi), got {theta}")));
    }
    if r == 0.5 {
        return Ok(TurnAngle {
            value: PI / 2.0,
            flagged: true,
        });
    }
    Ok(TurnAngle {
        value: ((0.5 * theta).tan().recip() / (1.0 - 2.0 * r)).atan(),
        flagged: false,
    })
}

/// Angle above which `(1 - 2r) tan(theta/2) > k`, so that every small
/// inscription in a `k`-Lipschitz graph is elegant or almost-elegant.
pub fn elegance_threshold(r: f64, k: f64) -> Result<f64> {
    check_ratio(r)?;
    if !(k > 0.0) {
        return Err(TrapezeError::Domain(format!("Lipschitz constant must be positive, got {k}")));
    }
    Ok(PI - 2.0 * ((1.0 - 2.0 * r) / k).atan())
}

/// Admissible shrinkout limits `{0, r A, (1-r) A}` modulo the area `A`.
pub fn shrinkout_limits(area: f64, r: f64) -> [f64; 3] {
    [0.0, r * area, (1.0 - r) * area]
}

/// Index of the admissible limit closest to `value` modulo `area`, and the
/// distance relative to the area.
pub fn nearest_limit(value: f64, area: f64, r: f64) -> (usize, f64) {
    shrinkout_limits(area, r)
        .iter()
        .map(|&l| {
            let d = (value - l).rem_euclid(area);
            d.min(area - d) / area
        })
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three limits")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityReport {
    pub first: f64,
    pub second: f64,
    pub area: f64,
    pub residual: f64,
    pub pass: bool,
}

/// Sum of the actions of two branches ending at the same quadrisecant,
/// compared with the area.
pub fn quadrisecant_duality(first: &Branch, second: &Branch, curve: &JordanCurve) -> Result<DualityReport> {
    let (BranchLimit::Quadrisecant { points: p, action: a }, BranchLimit::Quadrisecant { points: q, action: b }) =
        (first.limit, second.limit)
    else {
        return Err(TrapezeError::MismatchedQuadrisecants("both branches must end at a quadrisecant".into()));
    };
    let tol = 1e-6 * curve.diameter();
    let matched = p.iter().all(|x| q.iter().any(|y| (x[0] - y[0]).hypot(x[1] - y[1]) < tol))
        && q.iter().all(|y| p.iter().any(|x| (x[0] - y[0]).hypot(x[1] - y[1]) < tol));
    if !matched {
        return Err(TrapezeError::MismatchedQuadrisecants(format!("{p:?} vs {q:?}")));
    }
    let area = curve.area();
    let residual = (a + b - area).abs();
    Ok(DualityReport {
        first: a,
        second: b,
        area,
        residual,
        pass: residual < 0.01 * area,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VertexReport {
    pub param: f64,
    pub curvature: f64,
    pub curvature_derivative: f64,
    /// `|d kappa / ds| / |kappa|`.
    pub relative: f64,
    /// Closest root of the curvature derivative and its parameter distance;
    /// absent when the curvature is constant.
    pub nearest_root: Option<f64>,
    pub root_gap: Option<f64>,
    /// The relative curvature derivative is below `1e-3`.
    pub pass: bool,
    /// The limit lies within `1e-3` in parameter of a root (vacuous for
    /// constant curvature).
    pub near_root: bool,
}

/// Roots of the curvature derivative, from a sign scan refined by bisection.
pub fn curvature_critical_points(curve: &JordanCurve, samples: usize) -> Vec<f64> {
    let f = |s: f64| curve.curvature_derivative(s);
    let scale = (0..samples)
        .map(|i| f(i as f64 / samples as f64).abs())
        .fold(0.0, f64::max);
    if scale < 1e-9 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    for i in 0..samples {
        let (mut a, mut b) = (i as f64 / samples as f64, (i + 1) as f64 / samples as f64);
        let (mut fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fa * fm <= 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        roots.push((0.5 * (a + b)).rem_euclid(1.0));
    }
    roots
}

/// At a shrinkout limit the curvature should be stationary.
pub fn vertex_check(curve: &JordanCurve, branch: &Branch) -> Result<VertexReport> {
    if !curve.is_smooth() {
        return Err(TrapezeError::RequiresSmooth);
    }
    let BranchLimit::Shrinkout { param, .. } = branch.limit else {
        return Err(TrapezeError::Domain("branch did not end in a shrinkout".into()));
    };
    let kappa = curve.curvature(param);
    let dk = curve.curvature_derivative(param);
    let relative = dk.abs() / kappa.abs().max(1e-300);
    let roots = curvature_critical_points(curve, 2048);
    let nearest = roots
        .iter()
        .map(|&t| (t, crate::curve_kernel::periodic_gap(t, param)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    Ok(VertexReport {
        param,
        curvature: kappa,
        curvature_derivative: dk,
        relative,
        nearest_root: nearest.map(|n| n.0),
        root_gap: nearest.map(|n| n.1),
        pass: relative <= 1e-3,
        near_root: nearest.is_none_or(|n| n.1 <= 1e-3),
    })
}
