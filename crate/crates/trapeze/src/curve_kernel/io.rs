//! JSON curve files.
//!
//! ```json
//! {"kind":"fourier","coefficients":[[re,im], ...]}   // k = -K..K
//! {"kind":"polygon","vertices":[[x,y], ...]}
//! {"kind":"samples","points":[[x,y], ...]}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{JordanCurve, Representation};
use crate::error::{Result, TrapezeError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveFile {
    Fourier { coefficients: Vec<[f64; 2]> },
    Polygon { vertices: Vec<[f64; 2]> },
    Samples { points: Vec<[f64; 2]> },
}

/// Scalars reported alongside every loaded curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveMetadata {
    pub area: f64,
    pub radius: f64,
    pub length: f64,
    pub enclosing_radius: f64,
    pub reversed: bool,
}

fn to_points(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

impl CurveFile {
    pub fn build(&self) -> Result<JordanCurve> {
        match self {
            CurveFile::Fourier { coefficients } => JordanCurve::fourier(to_points(coefficients)),
            CurveFile::Polygon { vertices } => JordanCurve::polygon(to_points(vertices)),
            CurveFile::Samples { points } => JordanCurve::from_samples(&to_points(points)),
        }
    }

    /// File form of a curve as stored (counterclockwise).
    pub fn from_curve(curve: &JordanCurve) -> CurveFile {
        let pairs = |v: &[Complex64]| v.iter().map(|c| [c.re, c.im]).collect();
        match curve.representation() {
            Representation::Fourier { coeffs, .. } => CurveFile::Fourier {
                coefficients: pairs(coeffs),
            },
            Representation::Polygon { vertices, .. } => CurveFile::Polygon {
                vertices: pairs(vertices),
            },
        }
    }
}

pub fn parse_curve(text: &str) -> Result<JordanCurve> {
    let file: CurveFile = serde_json::from_str(text).map_err(|e| TrapezeError::Parse(e.to_string()))?;
    file.build()
}

pub fn load_curve(path: &Path) -> Result<JordanCurve> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| TrapezeError::Io(format!("{}: {e}", path.display())))?;
    parse_curve(&text)
}

pub fn metadata(curve: &JordanCurve) -> CurveMetadata {
    CurveMetadata {
        area: curve.area(),
        radius: curve.radius(),
        length: curve.length(),
        enclosing_radius: curve.enclosing_radius(),
        reversed: curve.was_reversed(),
    }
}
