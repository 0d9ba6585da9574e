//! Reference curves used by the tests, the acceptance suite and the CLI.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::curve_kernel::JordanCurve;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Circle of radius `radius` centred at the origin, starting at `(radius, 0)`.
pub fn circle(radius: f64) -> JordanCurve {
    JordanCurve::fourier(vec![c(0.0, 0.0), c(0.0, 0.0), c(radius, 0.0)]).expect("circle")
}

/// Axis-aligned ellipse `(a cos 2 pi s, b sin 2 pi s)`.
pub fn ellipse(a: f64, b: f64) -> JordanCurve {
    JordanCurve::fourier(vec![c(0.5 * (a - b), 0.0), c(0.0, 0.0), c(0.5 * (a + b), 0.0)]).expect("ellipse")
}

/// The convex oval `x^4/16 + y^2 = 1`, parametrised by polar angle and fitted
/// from 512 samples.
pub fn quartic_oval() -> JordanCurve {
    let n = 512;
    let pts: Vec<Complex64> = (0..n)
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / n as f64;
            Complex64::from_polar(quartic_oval_radius(phi), phi)
        })
        .collect();
    JordanCurve::from_samples(&pts).expect("quartic oval")
}

/// Polar radius of `x^4/16 + y^2 = 1` at angle `phi`.
pub fn quartic_oval_radius(phi: f64) -> f64 {
    let a = phi.cos().powi(4) / 16.0;
    let b = phi.sin().powi(2);
    (2.0 / (b + (b * b + 4.0 * a).sqrt())).sqrt()
}

/// The square `[0, 1]^2`.
pub fn unit_square() -> JordanCurve {
    JordanCurve::polygon(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]).expect("square")
}

/// Star-shaped curve with polar radius `1 + depth cos(2 phi)`; for
/// `depth > 1/5` it is non-convex with dents at the top and bottom.
pub fn peanut(depth: f64) -> JordanCurve {
    JordanCurve::fourier(vec![
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.5 * depth, 0.0),
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(0.0, 0.0),
        c(0.5 * depth, 0.0),
    ])
    .expect("peanut")
}

/// Depth of the default dented fixture.
pub const PEANUT_DEPTH: f64 = 0.5;
