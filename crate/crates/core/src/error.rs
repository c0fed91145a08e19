use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line integral of 1/f diverges: segment comes within {clearance:e} of the landmark set")]
    DivergentIntegral { clearance: f64 },

    #[error("adaptive distance undefined: point coincides with the landmark")]
    UndefinedDistance,

    #[error("target unreachable: source component has {source_component} nodes, target component has {target_component}")]
    Disconnected {
        source_component: usize,
        target_component: usize,
    },

    #[error("point is not a node of the metric graph: {0:?}")]
    NotAnchored(Vec<f64>),

    #[error("point lies inside the exclusion offset (distance {distance} <= beta {beta})")]
    InsideExclusion { distance: f64, beta: f64 },

    #[error("parameter {name} = {value} outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("cannot compose interleavings: {0}")]
    Composition(String),

    #[error("composed interleaving interval is empty: ({lo}, {hi})")]
    DegenerateCertificate { lo: String, hi: String },

    #[error("closed form mismatch for {0}")]
    ClosedFormMismatch(&'static str),

    #[error("ball intersection undecided for simplex {simplex:?}: objective in [{lower:e}, {upper:e}], tolerance {tol:e}")]
    Indeterminate {
        simplex: Vec<usize>,
        lower: f64,
        upper: f64,
        tol: f64,
    },

    #[error("precondition failed: {message} (computed threshold {threshold})")]
    Precondition { message: String, threshold: f64 },

    #[error("assumption failed: {0}")]
    Assumption(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
