use thiserror::Error;

/// Errors raised by the library. Each variant maps to a stable machine code
/// through [`TrapezeError::code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrapezeError {
    #[error("{0}")]
    Domain(String),
    #[error("curve is not simple: self-distance {distance:.3e} at parameters ({s:.6}, {t:.6})")]
    NonSimpleCurve { s: f64, t: f64, distance: f64 },
    #[error("invalid curve input: {0}")]
    InvalidCurve(String),
    #[error("operation requires a smooth curve representation")]
    RequiresSmooth,
    #[error("no inscription found{}", .theta.map(|t| format!(" at theta = {t}")).unwrap_or_default())]
    NoInscriptionFound { theta: Option<f64> },
    #[error("inscription kind is {found}, expected {expected}")]
    WrongKind { expected: String, found: String },
    #[error("capping path construction failed (min separation {min_separation:.3e})")]
    ConstructionFailure { min_separation: f64 },
    #[error("loop touches the diagonal (separation {separation:.3e})")]
    DiagonalTouch { separation: f64 },
    #[error("seed does not solve the inscription equations (residual {residual:.3e})")]
    SeedInvalid { residual: f64 },
    #[error("continuation step collapsed at theta = {theta}")]
    StepCollapse { theta: f64 },
    #[error("no branch connects to the longest binormal at theta = {theta}")]
    ProxyUnavailable { theta: f64 },
    #[error("quadrisecant branches do not match: {0}")]
    MismatchedQuadrisecants(String),
    #[error("curve is not locally {k}-Lipschitz-graphical near parameter {s:.6}")]
    NotGraphical { k: f64, s: f64 },
    #[error("mollified curve is not simple at eps = {eps}")]
    NotSimple { eps: f64 },
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl TrapezeError {
    pub fn code(&self) -> &'static str {
        match self {
            TrapezeError::Domain(_) => "domain",
            TrapezeError::NonSimpleCurve { .. } => "non_simple_curve",
            TrapezeError::InvalidCurve(_) => "invalid_curve",
            TrapezeError::RequiresSmooth => "requires_smooth",
            TrapezeError::NoInscriptionFound { .. } => "no_inscription_found",
            TrapezeError::WrongKind { .. } => "wrong_kind",
            TrapezeError::ConstructionFailure { .. } => "construction_failure",
            TrapezeError::DiagonalTouch { .. } => "diagonal_touch",
            TrapezeError::SeedInvalid { .. } => "seed_invalid",
            TrapezeError::StepCollapse { .. } => "step_collapse",
            TrapezeError::ProxyUnavailable { .. } => "proxy_unavailable",
            TrapezeError::MismatchedQuadrisecants(_) => "mismatched_quadrisecants",
            TrapezeError::NotGraphical { .. } => "not_graphical",
            TrapezeError::NotSimple { .. } => "not_simple",
            TrapezeError::Io(_) => "io",
            TrapezeError::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, TrapezeError>;
