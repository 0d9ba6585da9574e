//! Symplectic action of inscriptions through explicit cappings.
//!
//! A capping is a path of point pairs on the curve from `(z, w)` to
//! `(z', w')` that never meets the diagonal. Closed with the flow trajectory
//! traversed backward it must wind zero times around the diagonal; the action
//! is then the Hamiltonian term minus the integral of
//! `(1-r) x1 dy1 + r x2 dy2` around that loop.

use serde::Serialize;
use std::f64::consts::PI;

use crate::curve_kernel::{JordanCurve, Point};
use crate::error::{Result, TrapezeError};
use crate::inscriber::{circle_order, Inscription, Kind};

/// Samples per unit of parameter travel when tracking the winding.
const WINDING_DENSITY: f64 = 4096.0;
/// Separation below which a loop is said to touch the diagonal, relative to
/// the diameter.
const TOUCH_TOL: f64 = 1e-12;

/// One stage of a pair path: each component moves monotonically between two
/// unwrapped parameters (a component may stay put).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Leg {
    pub first: (f64, f64),
    pub second: (f64, f64),
}

impl Leg {
    fn travel(&self) -> f64 {
        (self.first.1 - self.first.0).abs().max((self.second.1 - self.second.0).abs())
    }
}

/// A path `t -> (p1(t), p2(t))` on the curve, as consecutive legs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairPath {
    pub legs: Vec<Leg>,
    /// Winding of `p1 - p2` around 0 along the path followed by the
    /// backward flow trajectory.
    pub winding: i64,
    pub min_separation: f64,
    /// Extra full loops were appended to cancel the winding.
    pub corrected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CappingStyle {
    /// `p1` stays between `z` and `z'`, `p2` between `w` and `w'`.
    Elegant,
    /// Both components take the complementary arcs, staggered.
    AlmostElegant,
}

/// Action with its decomposition. `cones` holds the two sector areas and
/// `arcs` the signed areas of the regions bounded by the capping arcs and the
/// flow arcs, when the closed-form route was used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionValue {
    pub value: f64,
    pub hamiltonian_term: f64,
    pub capping_term: f64,
    pub cones: Option<[f64; 2]>,
    pub arcs: Option<[f64; 2]>,
    pub winding: i64,
}

/// Winding number around the origin of `p1 - p2` along a closed sampled loop.
pub fn winding_number(loop_pts: &[(Point, Point)], diameter: f64) -> Result<i64> {
    let mut total = 0.0;
    let n = loop_pts.len();
    let mut min_sep = f64::INFINITY;
    for i in 0..n {
        let (a1, a2) = loop_pts[i];
        let (b1, b2) = loop_pts[(i + 1) % n];
        let da = a1 - a2;
        let db = b1 - b2;
        min_sep = min_sep.min(da.norm());
        total += (db / da).arg();
    }
    if min_sep < TOUCH_TOL * diameter {
        return Err(TrapezeError::DiagonalTouch { separation: min_sep });
    }
    let turns = total / (2.0 * PI);
    let k = turns.round();
    if (turns - k).abs() > 1e-6 {
        return Err(TrapezeError::DiagonalTouch { separation: min_sep });
    }
    Ok(k as i64)
}

/// Winding of the loop (path, then backward trajectory) and the minimum
/// separation along the path, sampling each leg at `density` points per unit
/// of parameter travel.
fn path_winding(curve: &JordanCurve, ins: &Inscription, legs: &[Leg], density: f64) -> (f64, f64) {
    let mut total = 0.0;
    let mut min_sep = f64::INFINITY;
    let mut prev: Option<Point> = None;
    for leg in legs {
        let steps = ((leg.travel() * density).ceil() as usize).max(1);
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            // The turning sum telescopes, so only the leg ends must be exact;
            // interior samples just keep the increments small.
            let eval = |s: f64| if k == 0 || k == steps { curve.eval(s) } else { curve.eval_coarse(s) };
            let p1 = eval(leg.first.0 + t * (leg.first.1 - leg.first.0));
            let p2 = eval(leg.second.0 + t * (leg.second.1 - leg.second.0));
            let d = p1 - p2;
            min_sep = min_sep.min(d.norm());
            if let Some(q) = prev {
                total += (d / q).arg();
            }
            prev = Some(d);
        }
    }
    // Backward trajectory: z - w turns counterclockwise by theta.
    total += ins.class.theta;
    (total / (2.0 * PI), min_sep)
}

fn finish_path(curve: &JordanCurve, ins: &Inscription, legs: Vec<Leg>, corrected: bool) -> Result<PairPath> {
    let mut density = WINDING_DENSITY;
    let (mut turns, mut sep) = path_winding(curve, ins, &legs, density);
    loop {
        density *= 2.0;
        let (t2, s2) = path_winding(curve, ins, &legs, density);
        let stable = (t2 - turns).abs() < 1e-6 && (t2 - t2.round()).abs() < 1e-6;
        turns = t2;
        sep = sep.min(s2);
        if stable || density > 1e6 {
            break;
        }
    }
    if sep < TOUCH_TOL * curve.diameter() || (turns - turns.round()).abs() > 1e-6 {
        return Err(TrapezeError::ConstructionFailure { min_separation: sep });
    }
    Ok(PairPath {
        legs,
        winding: turns.round() as i64,
        min_separation: sep,
        corrected,
    })
}

/// Unwrapped target reached from `from` by moving in `dir` (+1 or -1).
fn toward(from: f64, to: f64, dir: f64) -> f64 {
    let d = (to - from).rem_euclid(1.0);
    if dir > 0.0 {
        from + d
    } else if d == 0.0 {
        from
    } else {
        from + d - 1.0
    }
}

/// Direction of increasing parameter in which `z'` follows `z` in the
/// cyclic order `z, z', w, w'` (requires [`circle_order`]).
fn forward_direction(ins: &Inscription) -> f64 {
    let d_zp = (ins.s1p - ins.s1).rem_euclid(1.0);
    let d_wp = (ins.s2p - ins.s1).rem_euclid(1.0);
    if d_zp < d_wp {
        1.0
    } else {
        -1.0
    }
}

/// The elegant or almost-elegant arc capping, with its winding (which is
/// not required to vanish here).
pub fn arc_capping(curve: &JordanCurve, ins: &Inscription, style: CappingStyle) -> Result<PairPath> {
    if !circle_order(ins) {
        return Err(TrapezeError::ConstructionFailure { min_separation: 0.0 });
    }
    let d = forward_direction(ins);
    let legs = match style {
        CappingStyle::Elegant => vec![Leg {
            first: (ins.s1, toward(ins.s1, ins.s1p, d)),
            second: (ins.s2, toward(ins.s2, ins.s2p, d)),
        }],
        CappingStyle::AlmostElegant => {
            let back = -d;
            let z = ins.s1;
            let w = ins.s2;
            let wp = toward(z, ins.s2p, back);
            let zp_from_w = toward(w, ins.s1p, back);
            let z_from_w = toward(zp_from_w, ins.s1, back);
            let zp_end = toward(toward(wp, ins.s2, back), ins.s1p, back);
            let wp_end = toward(z_from_w, ins.s2p, back);
            vec![
                Leg { first: (z, wp), second: (w, w) },
                Leg { first: (wp, wp), second: (w, z_from_w) },
                Leg { first: (wp, zp_end), second: (z_from_w, z_from_w) },
                Leg { first: (zp_end, zp_end), second: (z_from_w, wp_end) },
            ]
        }
    };
    finish_path(curve, ins, legs, false)
}

/// Preferred capping for elegant and almost-elegant inscriptions.
pub fn capping_path(curve: &JordanCurve, ins: &Inscription) -> Result<PairPath> {
    let style = match ins.kind {
        Kind::Elegant => CappingStyle::Elegant,
        Kind::AlmostElegant => CappingStyle::AlmostElegant,
        Kind::Other => {
            return Err(TrapezeError::WrongKind {
                expected: "elegant or almost_elegant".into(),
                found: ins.kind.to_string(),
            })
        }
    };
    let path = arc_capping(curve, ins, style)?;
    if path.winding != 0 {
        return Err(TrapezeError::ConstructionFailure {
            min_separation: path.min_separation,
        });
    }
    Ok(path)
}

/// Zero-winding capping for any inscription: move `p1` from `z` to `z'`
/// avoiding `w`, then `p2` from `w` to `w'` avoiding `z'`, then append full
/// loops of both components to cancel the winding.
pub fn capping_path_general(curve: &JordanCurve, ins: &Inscription) -> Result<PairPath> {
    let avoid = |from: f64, to: f64, obstacle: f64| {
        let fwd = toward(from, to, 1.0);
        let hit = toward(from, obstacle, 1.0);
        if hit > from && hit < fwd {
            toward(from, to, -1.0)
        } else {
            fwd
        }
    };
    let zp = avoid(ins.s1, ins.s1p, ins.s2);
    let wp = avoid(ins.s2, ins.s2p, ins.s1p);
    let legs = vec![
        Leg { first: (ins.s1, zp), second: (ins.s2, ins.s2) },
        Leg { first: (zp, zp), second: (ins.s2, wp) },
    ];
    let raw = finish_path(curve, ins, legs.clone(), false)?;
    if raw.winding == 0 {
        return Ok(raw);
    }
    with_loops(curve, ins, legs, -raw.winding)
}

fn with_loops(curve: &JordanCurve, ins: &Inscription, mut legs: Vec<Leg>, k: i64) -> Result<PairPath> {
    let last = *legs.last().expect("non-empty path");
    let (a, b) = (last.first.1, last.second.1);
    let dir = k.signum() as f64;
    for i in 0..k.unsigned_abs() {
        let i = i as f64;
        legs.push(Leg {
            first: (a + dir * i, a + dir * (i + 1.0)),
            second: (b + dir * i, b + dir * (i + 1.0)),
        });
    }
    finish_path(curve, ins, legs, k != 0)
}

/// A capping with `k` extra simultaneous loops of both components appended;
/// its winding differs from the base capping's by `k`.
pub fn shifted_capping(curve: &JordanCurve, ins: &Inscription, base: &PairPath, k: i64) -> Result<PairPath> {
    with_loops(curve, ins, base.legs.clone(), k)
}

/// `integral of x dy` along the backward flow arc from `end` to `start`,
/// a counterclockwise rotation by `theta` about `pivot`.
fn flow_arc_x_dy(pivot: Point, end: Point, theta: f64) -> f64 {
    let rho = (end - pivot).norm();
    if rho == 0.0 {
        return 0.0;
    }
    let phi0 = (end - pivot).arg();
    let phi1 = phi0 + theta;
    let prim = |phi: f64| pivot.re * rho * phi.sin() + rho * rho * (0.5 * phi + 0.25 * (2.0 * phi).sin());
    prim(phi1) - prim(phi0)
}

/// Action computed from a given capping path.
pub fn action_with_path(curve: &JordanCurve, ins: &Inscription, path: &PairPath) -> ActionValue {
    let r = ins.class.r;
    let theta = ins.class.theta;
    let h = 0.5 * theta * r * (1.0 - r) * ins.diag_length * ins.diag_length;
    let mut first = 0.0;
    let mut second = 0.0;
    for leg in &path.legs {
        first += curve.x_dy(leg.first.0, leg.first.1);
        second += curve.x_dy(leg.second.0, leg.second.1);
    }
    let pivot = ins.pivot();
    first += flow_arc_x_dy(pivot, ins.zp(), theta);
    second += flow_arc_x_dy(pivot, ins.wp(), theta);
    let capping = (1.0 - r) * first + r * second;
    ActionValue {
        value: h - capping,
        hamiltonian_term: h,
        capping_term: capping,
        cones: None,
        arcs: None,
        winding: path.winding,
    }
}

/// Action through the preferred capping (winding-corrected for `Other`).
pub fn action(curve: &JordanCurve, ins: &Inscription) -> Result<ActionValue> {
    let path = match ins.kind {
        Kind::Other => capping_path_general(curve, ins)?,
        _ => capping_path(curve, ins)?,
    };
    Ok(action_with_path(curve, ins, &path))
}

/// Weighted cone-and-region form of the action,
/// `(1-r)(A1 - A3) + r(A2 - A4)`, with the arc regions measured as areas
/// swept about the pivot.
fn cone_form(curve: &JordanCurve, ins: &Inscription, path: &PairPath) -> ActionValue {
    let r = ins.class.r;
    let theta = ins.class.theta;
    let l2 = ins.diag_length * ins.diag_length;
    let a1 = 0.5 * theta * r * r * l2;
    let a2 = 0.5 * theta * (1.0 - r) * (1.0 - r) * l2;
    let pivot = ins.pivot();
    let mut a3 = a1;
    let mut a4 = a2;
    for leg in &path.legs {
        a3 += curve.swept_area(leg.first.0, leg.first.1, pivot);
        a4 += curve.swept_area(leg.second.0, leg.second.1, pivot);
    }
    let value = (1.0 - r) * (a1 - a3) + r * (a2 - a4);
    let h = 0.5 * theta * r * (1.0 - r) * l2;
    ActionValue {
        value,
        hamiltonian_term: h,
        capping_term: h - value,
        cones: Some([a1, a2]),
        arcs: Some([a3, a4]),
        winding: path.winding,
    }
}

fn require(ins: &Inscription, kind: Kind) -> Result<()> {
    if ins.kind != kind {
        return Err(TrapezeError::WrongKind {
            expected: kind.to_string(),
            found: ins.kind.to_string(),
        });
    }
    Ok(())
}

/// Closed-form action of an elegant inscription.
pub fn elegant_action(curve: &JordanCurve, ins: &Inscription) -> Result<ActionValue> {
    require(ins, Kind::Elegant)?;
    let path = capping_path(curve, ins)?;
    Ok(cone_form(curve, ins, &path))
}

/// Closed-form action of an almost-elegant inscription.
pub fn almost_elegant_action(curve: &JordanCurve, ins: &Inscription) -> Result<ActionValue> {
    require(ins, Kind::AlmostElegant)?;
    let path = capping_path(curve, ins)?;
    Ok(cone_form(curve, ins, &path))
}
