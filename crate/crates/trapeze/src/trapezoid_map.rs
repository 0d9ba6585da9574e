//! Similarity-class geometry of isosceles trapezoids.
//!
//! A class is fixed by an aspect ratio `r` and an angle `theta`. The map
//! [`g_map`] rotates a pair of points `(z, w)` clockwise by `theta` about the
//! point `p = (1-r) z + r w`; its fixed points off the diagonal, restricted to
//! a curve, are the inscribed trapezoids of that class.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Result, TrapezeError};

/// Aspect ratio and angle of an isosceles trapezoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapezoidClass {
    pub r: f64,
    pub theta: f64,
}

impl TrapezoidClass {
    /// Validated constructor: `0 < r <= 1/2` and `0 < theta < pi`.
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        check_ratio(r)?;
        if !(theta > 0.0 && theta < PI) {
            return Err(TrapezeError::Domain(format!(
                "theta must lie in (0, pi), got {theta}"
            )));
        }
        Ok(TrapezoidClass { r, theta })
    }

    /// Constructor for limit studies; accepts `theta` in `[0, pi]`.
    pub fn limit(r: f64, theta: f64) -> Result<Self> {
        check_ratio(r)?;
        if !(0.0..=PI).contains(&theta) {
            return Err(TrapezeError::Domain(format!(
                "theta must lie in [0, pi], got {theta}"
            )));
        }
        Ok(TrapezoidClass { r, theta })
    }

    /// Coefficients `(a, b, c, d)` with `z' = a z + b w` and `w' = c z + d w`.
    pub fn coefficients(&self) -> [Complex64; 4] {
        let e = Complex64::from_polar(1.0, -self.theta) - 1.0;
        let r = self.r;
        [1.0 + e * r, -e * r, -e * (1.0 - r), 1.0 + e * (1.0 - r)]
    }

    /// Hamiltonian weight `theta r (1-r) / 2`.
    pub fn hamiltonian_weight(&self) -> f64 {
        0.5 * self.theta * self.r * (1.0 - self.r)
    }
}

/// Reject aspect ratios outside `(0, 1/2]`.
pub fn check_ratio(r: f64) -> Result<()> {
    if r > 0.0 && r <= 0.5 {
        Ok(())
    } else {
        Err(TrapezeError::Domain("r must lie in (0, 1/2]".to_string()))
    }
}

/// A pair of points in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointPair {
    pub z: Complex64,
    pub w: Complex64,
}

impl PointPair {
    pub fn new(z: Complex64, w: Complex64) -> Self {
        PointPair { z, w }
    }

    /// The centre of rotation `(1-r) z + r w`.
    pub fn pivot(&self, r: f64) -> Complex64 {
        self.z * (1.0 - r) + self.w * r
    }

    pub fn separation(&self) -> f64 {
        (self.z - self.w).norm()
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.z.re, self.z.im, self.w.re, self.w.im]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        PointPair::new(Complex64::new(a[0], a[1]), Complex64::new(a[2], a[3]))
    }
}

/// Value of the Hamiltonian, in area units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianValue {
    pub value: f64,
}

/// The linear coordinate change `(z, w) -> ((1-r) z + r w, sqrt(r(1-r)) (z - w))`.
pub fn f_forward(r: f64, pair: PointPair) -> PointPair {
    let k = (r * (1.0 - r)).sqrt();
    PointPair::new(pair.pivot(r), (pair.z - pair.w) * k)
}

/// Inverse of [`f_forward`].
pub fn f_inverse(r: f64, pair: PointPair) -> PointPair {
    let k = (r * (1.0 - r)).sqrt();
    let diff = pair.w / k;
    PointPair::new(pair.z + diff * r, pair.z - diff * (1.0 - r))
}

/// Rotate both points clockwise by `theta` about their pivot. Accepts the
/// closed range `theta in [0, pi]` and any `r in (0, 1/2]` without checks.
pub fn rotate_pair(r: f64, theta: f64, pair: PointPair) -> PointPair {
    let p = pair.pivot(r);
    let rot = Complex64::from_polar(1.0, -theta);
    PointPair::new(p + (pair.z - p) * rot, p + (pair.w - p) * rot)
}

/// The map `G_{r,theta}`.
pub fn g_map(class: TrapezoidClass, pair: PointPair) -> PointPair {
    rotate_pair(class.r, class.theta, pair)
}

/// `G_{r,theta}` evaluated through the coordinate change, as a cross-check of
/// the direct rotation.
pub fn g_map_via_coordinates(class: TrapezoidClass, pair: PointPair) -> PointPair {
    let mut f = f_forward(class.r, pair);
    f.w *= Complex64::from_polar(1.0, -class.theta);
    f_inverse(class.r, f)
}

/// `theta r (1-r) |z - w|^2 / 2`.
pub fn hamiltonian(class: TrapezoidClass, pair: PointPair) -> HamiltonianValue {
    let d = pair.z - pair.w;
    HamiltonianValue {
        value: class.hamiltonian_weight() * d.norm_sqr(),
    }
}

/// Time-`t` flow of the Hamiltonian: clockwise rotation by `t theta` about the
/// pivot, which the flow preserves.
pub fn flow(class: TrapezoidClass, t: f64, pair: PointPair) -> PointPair {
    if t == 0.0 {
        return pair;
    }
    rotate_pair(class.r, t * class.theta, pair)
}

/// The 4x4 real matrix of `G_{r,theta}` acting on `(x1, y1, x2, y2)`.
pub fn jacobian(r: f64, theta: f64) -> Matrix4<f64> {
    let class = TrapezoidClass { r, theta };
    let [a, b, c, d] = class.coefficients();
    let block = |m: Complex64| [[m.re, -m.im], [m.im, m.re]];
    let blocks = [[block(a), block(b)], [block(c), block(d)]];
    Matrix4::from_fn(|i, j| blocks[i / 2][j / 2][i % 2][j % 2])
}

/// Matrix of the form `(1-r) dx1^dy1 + r dx2^dy2`.
pub fn symplectic_form(r: f64) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m[(0, 1)] = 1.0 - r;
    m[(1, 0)] = -(1.0 - r);
    m[(2, 3)] = r;
    m[(3, 2)] = -r;
    m
}

/// Max-entry norm of `J^T Omega J - Omega`.
pub fn symplectic_defect(r: f64, theta: f64) -> f64 {
    let j = jacobian(r, theta);
    let omega = symplectic_form(r);
    (j.transpose() * omega * j - omega).amax()
}

/// Geometry of the two diagonals `zw` and `z'w'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalReport {
    /// Intersection point of the two diagonal lines.
    pub crossing: Complex64,
    /// `|crossing - z| / |w - z|`.
    pub ratio_first: f64,
    /// `|crossing - z'| / |w' - z'|`.
    pub ratio_second: f64,
    /// Clockwise angle from `w - z` to `w' - z'`, in `[0, 2 pi)`.
    pub angle: f64,
    pub length_first: f64,
    pub length_second: f64,
}

/// Intersect the diagonals of a pair and its image. Returns `None` when the
/// lines are parallel.
pub fn diagonal_report(pair: PointPair, image: PointPair) -> Option<DiagonalReport> {
    let d1 = pair.w - pair.z;
    let d2 = image.w - image.z;
    let cross = d1.re * d2.im - d1.im * d2.re;
    if cross.abs() <= 1e-300 {
        return None;
    }
    let q = image.z - pair.z;
    let t = (q.re * d2.im - q.im * d2.re) / cross;
    let u = (q.re * d1.im - q.im * d1.re) / cross;
    let crossing = pair.z + d1 * t;
    let angle = (d1 / d2).arg().rem_euclid(2.0 * PI);
    Some(DiagonalReport {
        crossing,
        ratio_first: t,
        ratio_second: u,
        angle,
        length_first: d1.norm(),
        length_second: d2.norm(),
    })
}
