//! Inscriptions of a trapezoid class in a curve.
//!
//! An inscription is a pair of curve parameters `(s1, s2)` whose points
//! `z = gamma(s1)`, `w = gamma(s2)` are mapped by [`g_map`] to two more
//! points `z'`, `w'` of the curve. The solver seeds a grid scan of the
//! signed-distance residual and polishes each candidate with damped Newton on
//! the square system `gamma(s1') = z'`, `gamma(s2') = w'`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::action_lab;
use crate::curve_kernel::{periodic_gap, JordanCurve, Point};
use crate::error::{Result, TrapezeError};
use crate::trapezoid_map::{g_map, PointPair, TrapezoidClass};

/// Near-diagonal exclusion relative to the diameter.
pub const DIAGONAL_EXCLUSION: f64 = 1e-3;
/// Default acceptance tolerance on the residual, relative to the diameter.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Parameter-space deduplication tolerance.
pub const DEDUP_TOL: f64 = 1e-6;
/// Singular-value ratio below which a solution is part of a family.
pub const FAMILY_RATIO: f64 = 1e-6;
const MAX_NEWTON: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Kind {
    Elegant,
    AlmostElegant,
    Other,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Kind::Elegant => "elegant",
            Kind::AlmostElegant => "almost_elegant",
            Kind::Other => "other",
        };
        f.write_str(s)
    }
}

/// A solved inscription.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inscription {
    pub s1: f64,
    pub s2: f64,
    /// Parameter of `z'`.
    pub s1p: f64,
    /// Parameter of `w'`.
    pub s2p: f64,
    /// `[z, z', w, w']`.
    pub vertices: [Point; 4],
    pub diag_length: f64,
    pub residual: f64,
    pub class: TrapezoidClass,
    pub kind: Kind,
    /// Member of a continuum of solutions (a representative).
    pub family: bool,
    /// `r = 1/2`: no longer parallel edge, classification by order only.
    pub rectangle_ambiguity: bool,
}

impl Inscription {
    pub fn z(&self) -> Point {
        self.vertices[0]
    }
    pub fn zp(&self) -> Point {
        self.vertices[1]
    }
    pub fn w(&self) -> Point {
        self.vertices[2]
    }
    pub fn wp(&self) -> Point {
        self.vertices[3]
    }
    pub fn pivot(&self) -> Point {
        self.z() * (1.0 - self.class.r) + self.w() * self.class.r
    }
    pub fn params(&self) -> [f64; 4] {
        [self.s1, self.s2, self.s1p, self.s2p]
    }
}

/// Solver bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub candidates: usize,
    pub newton_divergence: usize,
    pub diagonal_hits: usize,
    pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InscriptionSet {
    pub class: TrapezoidClass,
    pub inscriptions: Vec<Inscription>,
    /// Some solutions form continua; only representatives are listed.
    pub family: bool,
    pub diagnostics: Diagnostics,
}

impl InscriptionSet {
    pub fn is_empty(&self) -> bool {
        self.inscriptions.is_empty()
    }
}

/// Width and theta-width at a class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidthReport {
    pub width: f64,
    pub theta_width: f64,
    /// Angle realising the theta-width.
    pub theta_argmin: f64,
    /// Width fell below the near-diagonal exclusion.
    pub degenerate: bool,
}

/// Signed distances of `z'` and `w'` to the curve.
pub fn residual(curve: &JordanCurve, class: TrapezoidClass, s1: f64, s2: f64) -> (f64, f64) {
    let img = g_map(class, PointPair::new(curve.eval(s1), curve.eval(s2)));
    (curve.project(img.z).distance, curve.project(img.w).distance)
}

/// Outcome of a Newton polish.
#[derive(Debug, Clone, Copy)]
pub struct NewtonOutcome {
    pub params: [f64; 4],
    pub residual_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    /// `sigma_min / sigma_max` of the Jacobian at the final iterate.
    pub sigma_ratio: f64,
}

fn system(curve: &JordanCurve, class: TrapezoidClass, s: &[f64; 4]) -> (Vector4<f64>, Matrix4<f64>) {
    let [a, b, c, d] = class.coefficients();
    let [g1, t1] = curve.derivatives::<2>(s[0]);
    let [g2, t2] = curve.derivatives::<2>(s[1]);
    let [g3, t3] = curve.derivatives::<2>(s[2]);
    let [g4, t4] = curve.derivatives::<2>(s[3]);
    let img = g_map(class, PointPair::new(g1, g2));
    let f1 = g3 - img.z;
    let f2 = g4 - img.w;
    let f = Vector4::new(f1.re, f1.im, f2.re, f2.im);
    let cols: [(Complex64, Complex64); 4] = [(-a * t1, -c * t1), (-b * t2, -d * t2), (t3, 0.0.into()), (0.0.into(), t4)];
    let j = Matrix4::from_fn(|i, k| {
        let (u, v) = cols[k];
        match i {
            0 => u.re,
            1 => u.im,
            2 => v.re,
            _ => v.im,
        }
    });
    (f, j)
}

fn singular_ratio(j: &Matrix4<f64>) -> f64 {
    let sv = j.singular_values();
    let max = sv.max();
    if max == 0.0 {
        0.0
    } else {
        sv.min() / max
    }
}

/// Damped Newton with Armijo backtracking on `|F|`. Rank-deficient
/// Jacobians (families) use the least-norm step.
pub fn newton(curve: &JordanCurve, class: TrapezoidClass, start: [f64; 4], tol: f64) -> NewtonOutcome {
    let mut s = start;
    let (mut f, mut j) = system(curve, class, &s);
    let mut norm = f.norm();
    let stop = 1e-3 * tol;
    let mut iterations = 0;
    while iterations < MAX_NEWTON && norm > stop {
        iterations += 1;
        let svd = j.svd(true, true);
        let eps = 1e-12 * svd.singular_values.max();
        let step = match svd.solve(&(-f), eps) {
            Ok(x) => x,
            Err(_) => break,
        };
        if !step.iter().all(|x| x.is_finite()) {
            break;
        }
        let cap = 0.1 / step.amax().max(1e-300);
        let mut alpha = cap.min(1.0);
        let mut accepted = false;
        for _ in 0..30 {
            let trial = [s[0] + alpha * step[0], s[1] + alpha * step[1], s[2] + alpha * step[2], s[3] + alpha * step[3]];
            let (ft, jt) = system(curve, class, &trial);
            let nt = ft.norm();
            if nt <= (1.0 - 1e-4 * alpha) * norm {
                s = trial;
                f = ft;
                j = jt;
                norm = nt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted || alpha * step.amax() < 1e-16 {
            break;
        }
    }
    NewtonOutcome {
        params: s,
        residual_norm: norm,
        converged: norm <= tol,
        iterations,
        sigma_ratio: singular_ratio(&j),
    }
}

/// Build an [`Inscription`] from converged parameters, or `None` when the
/// solution is on or near the diagonal.
pub fn assemble(curve: &JordanCurve, class: TrapezoidClass, params: [f64; 4], family: bool) -> Option<Inscription> {
    assemble_raw(curve, class, params, family).map(|ins| with_kind(curve, ins))
}

fn with_kind(curve: &JordanCurve, mut ins: Inscription) -> Inscription {
    let (kind, amb) = classify(curve, &ins);
    ins.kind = kind;
    ins.rectangle_ambiguity = amb;
    ins
}

fn assemble_raw(curve: &JordanCurve, class: TrapezoidClass, params: [f64; 4], family: bool) -> Option<Inscription> {
    let [s1, s2, s3, s4] = params.map(|x| x.rem_euclid(1.0));
    let z = curve.eval(s1);
    let w = curve.eval(s2);
    let diag = (z - w).norm();
    if diag <= DIAGONAL_EXCLUSION * curve.diameter() {
        return None;
    }
    let img = g_map(class, PointPair::new(z, w));
    let d1 = curve.project(img.z).distance;
    let d2 = curve.project(img.w).distance;
    Some(Inscription {
        s1,
        s2,
        s1p: s3,
        s2p: s4,
        vertices: [z, img.z, w, img.w],
        diag_length: diag,
        residual: d1.abs().max(d2.abs()),
        class,
        kind: Kind::Other,
        family,
        rectangle_ambiguity: false,
    })
}

/// All inscriptions of `class` found from a `grid_n x grid_n` seed scan.
pub fn find_inscriptions(curve: &JordanCurve, class: TrapezoidClass, grid_n: usize, tol: f64) -> Result<InscriptionSet> {
    if grid_n < 32 {
        return Err(TrapezeError::Domain(format!("grid_n must be at least 32, got {grid_n}")));
    }
    let n = grid_n;
    let abs_tol = tol * curve.diameter();
    let delta = DIAGONAL_EXCLUSION * curve.diameter();
    let nodes: Vec<Point> = (0..n).map(|i| curve.eval(i as f64 / n as f64)).collect();
    let field: Vec<(f64, f64)> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let img = g_map(class, PointPair::new(nodes[i], nodes[j]));
            (curve.coarse_distance(img.z).1, curve.coarse_distance(img.w).1)
        })
        .collect();
    let at = |i: usize, j: usize| field[(i % n) * n + (j % n)];
    let mut cells = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
            let far = corners
                .iter()
                .any(|&(a, b)| (nodes[a % n] - nodes[b % n]).norm() > delta);
            if !far {
                continue;
            }
            let vals = corners.map(|(a, b)| at(a, b));
            let spans = |sel: fn(&(f64, f64)) -> f64| {
                let lo = vals.iter().map(sel).fold(f64::INFINITY, f64::min);
                let hi = vals.iter().map(sel).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if spans(|v| v.0) && spans(|v| v.1) {
                cells.push((i, j));
            }
        }
    }
    let mut diagnostics = Diagnostics {
        candidates: cells.len(),
        ..Default::default()
    };
    let outcomes: Vec<Option<NewtonOutcome>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let s1 = (i as f64 + 0.5) / n as f64;
            let s2 = (j as f64 + 0.5) / n as f64;
            let img = g_map(class, PointPair::new(curve.eval(s1), curve.eval(s2)));
            let s3 = unwrap_near(curve.coarse_param(img.z), s1);
            let s4 = unwrap_near(curve.coarse_param(img.w), s2);
            let out = newton(curve, class, [s1, s2, s3, s4], abs_tol);
            out.converged.then_some(out)
        })
        .collect();
    let mut raw: Vec<Inscription> = Vec::new();
    for out in outcomes {
        match out {
            None => diagnostics.newton_divergence += 1,
            Some(o) => match assemble_raw(curve, class, o.params, o.sigma_ratio < FAMILY_RATIO) {
                None => diagnostics.diagonal_hits += 1,
                Some(ins) if ins.residual <= abs_tol => raw.push(ins),
                Some(_) => diagnostics.newton_divergence += 1,
            },
        }
    }
    let before = raw.len();
    let inscriptions: Vec<Inscription> = merge(raw, grid_n)
        .into_par_iter()
        .map(|ins| with_kind(curve, ins))
        .collect();
    diagnostics.duplicates = before - inscriptions.len();
    let family = inscriptions.iter().any(|i| i.family);
    Ok(InscriptionSet {
        class,
        inscriptions,
        family,
        diagnostics,
    })
}

fn unwrap_near(s: f64, reference: f64) -> f64 {
    s - (s - reference).round()
}

fn torus_gap(a: &Inscription, b: &Inscription) -> f64 {
    periodic_gap(a.s1, b.s1).max(periodic_gap(a.s2, b.s2))
}

/// Deduplicate in parameter space and collapse families to representatives.
fn merge(mut raw: Vec<Inscription>, grid_n: usize) -> Vec<Inscription> {
    raw.sort_by(|a, b| a.s1.partial_cmp(&b.s1).unwrap().then(a.s2.partial_cmp(&b.s2).unwrap()));
    let mut unique: Vec<Inscription> = Vec::new();
    for ins in raw {
        if !unique.iter().any(|u| torus_gap(u, &ins) < DEDUP_TOL) {
            unique.push(ins);
        }
    }
    let (fam, mut isolated): (Vec<Inscription>, Vec<Inscription>) = unique.into_iter().partition(|i| i.family);
    let link = 4.0 / grid_n as f64;
    let mut label: Vec<usize> = (0..fam.len()).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..fam.len() {
        for j in i + 1..fam.len() {
            if torus_gap(&fam[i], &fam[j]) < link {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    for i in 0..fam.len() {
        if root(&mut label, i) == i {
            isolated.push(fam[i]);
        }
    }
    isolated.sort_by(|a, b| a.s1.partial_cmp(&b.s1).unwrap().then(a.s2.partial_cmp(&b.s2).unwrap()));
    isolated
}

/// Shortest diagonal among the inscriptions of `class`.
pub fn fixed_angle_width(curve: &JordanCurve, class: TrapezoidClass, grid_n: usize) -> Result<f64> {
    find_inscriptions(curve, class, grid_n, DEFAULT_TOL)?
        .inscriptions
        .iter()
        .map(|i| i.diag_length)
        .reduce(f64::min)
        .ok_or(TrapezeError::NoInscriptionFound { theta: Some(class.theta) })
}

/// Infimal diagonal length at `class`, and the infimum over angles in
/// `(0, theta]`.
pub fn width(curve: &JordanCurve, class: TrapezoidClass, grid_n: usize) -> Result<WidthReport> {
    let w_at = |theta: f64| fixed_angle_width(curve, TrapezoidClass::new(class.r, theta)?, grid_n);
    let width = w_at(class.theta)?;
    let samples = 12;
    let mut best = (width, class.theta);
    let mut grid = Vec::with_capacity(samples);
    for k in 1..=samples {
        let phi = class.theta * k as f64 / samples as f64;
        let v = if k == samples { width } else { w_at(phi)? };
        grid.push((phi, v));
        if v < best.0 {
            best = (v, phi);
        }
    }
    let k = grid.iter().position(|g| g.1 == best.0).unwrap_or(samples - 1);
    if k + 1 < samples {
        let h = class.theta / samples as f64;
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = ((best.1 - h).max(0.25 * h), (best.1 + h).min(class.theta));
        for _ in 0..20 {
            let c = b - golden * (b - a);
            let d = a + golden * (b - a);
            let (fc, fd) = (w_at(c)?, w_at(d)?);
            if fc < best.0 {
                best = (fc, c);
            }
            if fd < best.0 {
                best = (fd, d);
            }
            if fc < fd {
                b = d;
            } else {
                a = c;
            }
        }
    }
    Ok(WidthReport {
        width,
        theta_width: best.0,
        theta_argmin: best.1,
        degenerate: width <= DIAGONAL_EXCLUSION * curve.diameter(),
    })
}

/// Position of `z, z', w, w'` in the cyclic order of their parameters.
fn cyclic_positions(ins: &Inscription) -> [usize; 4] {
    let params = [ins.s1, ins.s1p, ins.s2, ins.s2p];
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| params[a].partial_cmp(&params[b]).unwrap());
    let mut pos = [0; 4];
    for (p, &label) in order.iter().enumerate() {
        pos[label] = p;
    }
    pos
}

/// The curve visits the vertices in the circle's cyclic order (or its
/// reverse): `z` and `w` are never neighbours.
pub fn circle_order(ins: &Inscription) -> bool {
    let pos = cyclic_positions(ins);
    (pos[0] + 4 - pos[2]) % 4 == 2
}

/// Classify an inscription. Elegant and almost-elegant inscriptions are the
/// ones whose respective arc cappings close up with zero winding around the
/// diagonal. Returns the kind and the rectangle-ambiguity flag.
pub fn classify(curve: &JordanCurve, ins: &Inscription) -> (Kind, bool) {
    if !circle_order(ins) {
        return (Kind::Other, ins.class.r == 0.5);
    }
    let elegant = action_lab::arc_capping(curve, ins, action_lab::CappingStyle::Elegant);
    let elegant_ok = elegant.map(|p| p.winding == 0).unwrap_or(false);
    if ins.class.r == 0.5 {
        return (if elegant_ok { Kind::Elegant } else { Kind::Other }, true);
    }
    if elegant_ok {
        return (Kind::Elegant, false);
    }
    let almost = action_lab::arc_capping(curve, ins, action_lab::CappingStyle::AlmostElegant);
    if almost.map(|p| p.winding == 0).unwrap_or(false) {
        (Kind::AlmostElegant, false)
    } else {
        (Kind::Other, false)
    }
}
