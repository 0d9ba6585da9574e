//! Brute-force inscription oracle shared by the integration and acceptance
//! tests. It scans a dense parameter grid and tests the images `z'`, `w'`
//! against an implicit equation of the fixture, so it shares nothing with the
//! solver beyond curve evaluation and the trapezoid map itself.

#![allow(dead_code)]

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;
use trapeze::curve_kernel::periodic_gap;
use trapeze::fixtures;
use trapeze::trapezoid_map::g_map;
use trapeze::{JordanCurve, PointPair, TrapezoidClass};

pub type Implicit = fn(Complex64) -> f64;

pub struct Fixture {
    pub name: &'static str,
    pub curve: JordanCurve,
    pub implicit: Implicit,
    /// Rotational symmetry order: the curve is invariant under the
    /// parameter shift `1 / order`.
    pub order: usize,
}

fn circle_eq(p: Complex64) -> f64 {
    p.norm_sqr() - 1.0
}
fn ellipse_eq(p: Complex64) -> f64 {
    p.re * p.re / 4.0 + p.im * p.im - 1.0
}
fn quartic_eq(p: Complex64) -> f64 {
    p.re.powi(4) / 16.0 + p.im * p.im - 1.0
}
fn peanut_eq(p: Complex64) -> f64 {
    p.norm() - (1.0 + fixtures::PEANUT_DEPTH * (2.0 * p.arg()).cos())
}
fn square_eq(p: Complex64) -> f64 {
    (p.re - 0.5).abs().max((p.im - 0.5).abs()) - 0.5
}

pub fn corpus() -> Vec<Fixture> {
    vec![
        Fixture { name: "circle", curve: fixtures::circle(1.0), implicit: circle_eq, order: 0 },
        Fixture { name: "ellipse", curve: fixtures::ellipse(2.0, 1.0), implicit: ellipse_eq, order: 2 },
        Fixture { name: "quartic", curve: fixtures::quartic_oval(), implicit: quartic_eq, order: 2 },
        Fixture { name: "square", curve: fixtures::unit_square(), implicit: square_eq, order: 4 },
        Fixture {
            name: "peanut",
            curve: fixtures::peanut(fixtures::PEANUT_DEPTH),
            implicit: peanut_eq,
            order: 2,
        },
    ]
}

fn field(curve: &JordanCurve, f: Implicit, class: TrapezoidClass, s1: f64, s2: f64) -> [f64; 2] {
    let img = g_map(class, PointPair::new(curve.eval(s1), curve.eval(s2)));
    [f(img.z), f(img.w)]
}

fn refine(curve: &JordanCurve, f: Implicit, class: TrapezoidClass, start: [f64; 2], cell: f64) -> Option<[f64; 2]> {
    let mut s = start;
    let h = 1e-8;
    for _ in 0..60 {
        let v = field(curve, f, class, s[0], s[1]);
        if v[0].abs().max(v[1].abs()) < 1e-13 {
            let close = periodic_gap(s[0], start[0]).max(periodic_gap(s[1], start[1])) < 4.0 * cell;
            return close.then_some([s[0].rem_euclid(1.0), s[1].rem_euclid(1.0)]);
        }
        let a = field(curve, f, class, s[0] + h, s[1]);
        let b = field(curve, f, class, s[0], s[1] + h);
        let j = Matrix2::new((a[0] - v[0]) / h, (b[0] - v[0]) / h, (a[1] - v[1]) / h, (b[1] - v[1]) / h);
        // Minimum-norm step: along a continuum the Jacobian has rank one.
        let svd = j.svd(true, true);
        let cut = 1e-9 * svd.singular_values[0];
        let Ok(pinv) = svd.pseudo_inverse(cut) else {
            return None;
        };
        let step = pinv * Vector2::new(v[0], v[1]);
        let mut d = [step[0], step[1]];
        let len = d[0].abs().max(d[1].abs());
        if len > cell {
            d = [d[0] * cell / len, d[1] * cell / len];
        }
        s = [s[0] - d[0], s[1] - d[1]];
    }
    None
}

/// Solutions `(s1, s2)` of the inscription problem, deduplicated at `1e-7`.
pub fn solve(fixture: &Fixture, class: TrapezoidClass, n: usize) -> Vec<[f64; 2]> {
    let curve = &fixture.curve;
    let f = fixture.implicit;
    let cell = 1.0 / n as f64;
    let pts: Vec<Complex64> = (0..n).map(|i| curve.eval(i as f64 * cell)).collect();
    let delta = 1e-3 * curve.diameter();
    let values: Vec<[f64; 2]> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let img = g_map(class, PointPair::new(pts[k / n], pts[k % n]));
            [f(img.z), f(img.w)]
        })
        .collect();
    let at = |i: usize, j: usize| values[(i % n) * n + j % n];
    let mut found: Vec<[f64; 2]> = (0..n * n)
        .into_par_iter()
        .filter_map(|k| {
            let (i, j) = (k / n, k % n);
            if (pts[i] - pts[j]).norm() < delta {
                return None;
            }
            let c = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
            let brackets = |m: usize| {
                c.iter().any(|v| v[m] <= 0.0) && c.iter().any(|v| v[m] >= 0.0)
            };
            if !(brackets(0) && brackets(1)) {
                return None;
            }
            let start = [(i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell];
            refine(curve, f, class, start, cell)
        })
        .filter(|s| (curve.eval(s[0]) - curve.eval(s[1])).norm() > delta)
        .collect();
    found.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut unique: Vec<[f64; 2]> = Vec::new();
    for s in found {
        if !unique.iter().any(|u| gap(*u, s) < 1e-7) {
            unique.push(s);
        }
    }
    unique
}

pub fn gap(a: [f64; 2], b: [f64; 2]) -> f64 {
    periodic_gap(a[0], b[0]).max(periodic_gap(a[1], b[1]))
}

/// Number of orbits of `sols` under the parameter shift `1 / order`.
pub fn orbit_count(sols: &[[f64; 2]], order: usize, tol: f64) -> usize {
    let mut reps: Vec<[f64; 2]> = Vec::new();
    for &s in sols {
        let seen = reps.iter().any(|r| {
            (0..order).any(|k| {
                let t = k as f64 / order as f64;
                gap([r[0] + t, r[1] + t], s) < tol
            })
        });
        if !seen {
            reps.push(s);
        }
    }
    reps.len()
}

/// Connected components of `sols` when points closer than `link` are joined.
pub fn components(sols: &[[f64; 2]], link: f64) -> Vec<Vec<[f64; 2]>> {
    let mut label: Vec<usize> = (0..sols.len()).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..sols.len() {
        for j in i + 1..sols.len() {
            if gap(sols[i], sols[j]) < link {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<[f64; 2]>> = Vec::new();
    let mut index = vec![usize::MAX; sols.len()];
    for i in 0..sols.len() {
        let r = root(&mut label, i);
        if index[r] == usize::MAX {
            index[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[index[r]].push(sols[i]);
    }
    groups
}

fn component_orbits(groups: &[Vec<[f64; 2]>], order: usize, link: f64) -> usize {
    if order == 0 {
        return groups.len();
    }
    let mut reps: Vec<usize> = Vec::new();
    for (g, group) in groups.iter().enumerate() {
        let seen = reps.iter().any(|&r| {
            (0..order).any(|k| {
                let t = k as f64 / order as f64;
                groups[r].iter().any(|a| group.iter().any(|b| gap([a[0] + t, a[1] + t], *b) < link))
            })
        });
        if !seen {
            reps.push(g);
        }
    }
    reps.len()
}

/// Solver output reduced to what the comparison needs.
pub struct SolverPoint {
    pub params: [f64; 2],
    pub family: bool,
    /// Largest implicit-equation value at the images `z'`, `w'`.
    pub implicit_residual: f64,
}

impl SolverPoint {
    pub fn new(fixture: &Fixture, class: TrapezoidClass, params: [f64; 2], family: bool) -> Self {
        let v = field(&fixture.curve, fixture.implicit, class, params[0], params[1]);
        SolverPoint {
            params,
            family,
            implicit_residual: v[0].abs().max(v[1].abs()),
        }
    }
}

/// Compare oracle and solver solution sets. Isolated solutions must agree to
/// `param_tol` one for one; every continuum must be represented by a point the
/// solver flags as a family member. Points near a continuum (family endpoints
/// may be listed on their own) only need to lie within `link` of it and solve
/// the implicit equations. Solution counts modulo the curve's symmetry must
/// agree.
pub fn compare(
    oracle: &[[f64; 2]],
    solver: &[SolverPoint],
    order: usize,
    link: f64,
    param_tol: f64,
) -> std::result::Result<(), String> {
    let groups = components(oracle, link);
    let single: Vec<bool> = groups
        .iter()
        .map(|g| g.iter().all(|a| gap(*a, g[0]) < param_tol))
        .collect();
    let mut hits: Vec<Vec<&SolverPoint>> = vec![Vec::new(); groups.len()];
    for s in solver {
        let (g, d) = groups
            .iter()
            .enumerate()
            .map(|(k, g)| (k, g.iter().map(|a| gap(*a, s.params)).fold(f64::INFINITY, f64::min)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or("oracle set is empty")?;
        let limit = if s.family || !single[g] { link } else { param_tol };
        if d > limit {
            return Err(format!("solver point {:?} is {d:.2e} from the oracle set", s.params));
        }
        if s.implicit_residual > 1e-10 {
            return Err(format!("solver point {:?} misses the curve by {:.2e}", s.params, s.implicit_residual));
        }
        hits[g].push(s);
    }
    for (k, g) in groups.iter().enumerate() {
        match (single[k], hits[k].len()) {
            (true, 1) if !hits[k][0].family => {}
            (true, n) => return Err(format!("isolated oracle solution {:?} matched {n} times", g[0])),
            (false, _) if hits[k].iter().any(|s| s.family) => {}
            (false, _) => return Err(format!("continuum through {:?} not reported as a family", g[0])),
        }
    }
    let split = |want: bool| -> Vec<Vec<[f64; 2]>> {
        groups
            .iter()
            .zip(&single)
            .filter(|(_, &s)| s == want)
            .map(|(g, _)| g.clone())
            .collect()
    };
    let solver_isolated: Vec<[f64; 2]> = hits
        .iter()
        .zip(&single)
        .filter(|(_, &s)| s)
        .map(|(h, _)| h[0].params)
        .collect();
    let oracle_isolated: Vec<[f64; 2]> = split(true).iter().map(|g| g[0]).collect();
    if order > 0 {
        let (a, b) = (orbit_count(&oracle_isolated, order, param_tol), orbit_count(&solver_isolated, order, param_tol));
        if a != b {
            return Err(format!("{a} oracle orbits of isolated solutions vs {b} from the solver"));
        }
    }
    let fam_o = component_orbits(&split(false), order, link);
    let fam_s = component_orbits(
        &groups
            .iter()
            .zip(&single)
            .zip(&hits)
            .filter(|((_, &s), h)| !s && h.iter().any(|p| p.family))
            .map(|((g, _), _)| g.clone())
            .collect::<Vec<_>>(),
        order,
        link,
    );
    if fam_o != fam_s {
        return Err(format!("{fam_o} oracle continua vs {fam_s} represented by the solver"));
    }
    Ok(())
}
