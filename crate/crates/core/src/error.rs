use thiserror::Error;

/// Errors raised by the reduction, Hill-region and critical-value routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid body system: {0}")]
    InvalidSystem(String),
    #[error("failed to parse system description at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown preset `{0}` (expected gravity-demo, helium or eep)")]
    UnknownPreset(String),
    #[error("configuration is at the triple collision")]
    TripleCollision,
    #[error("configuration is collinear")]
    Collinear,
    #[error("shape ({w1}, {w2}) is outside the open unit disk")]
    OutsideShapeSpace { w1: f64, w2: f64 },
    #[error("singular kinetic geometry: {0}")]
    SingularGeometry(&'static str),
    #[error("internal consistency: {0}")]
    Consistency(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{family} family not supported for this system: {reason}")]
    UnsupportedFamily { family: &'static str, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
