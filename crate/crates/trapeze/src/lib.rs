//! Inscribed isosceles trapezoids in planar Jordan curves.
//!
//! The crate solves for inscriptions of a trapezoid class `(r, theta)`,
//! computes their symplectic actions through explicit cappings, follows
//! inscription families in `theta`, and runs the approximation experiments
//! for non-smooth curves.

pub mod action_lab;
pub mod approx;
pub mod curve_kernel;
pub mod error;
pub mod fixtures;
pub mod inscriber;
pub mod quadrature;
pub mod spectral;
pub mod trapezoid_map;

pub use curve_kernel::{JordanCurve, Point};
pub use error::{Result, TrapezeError};
pub use trapezoid_map::{PointPair, TrapezoidClass};
