use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed braid text: {0}")]
    Syntax(String),
    #[error("generator index {k} outside 1..={max}")]
    Index { k: i64, max: usize },
    #[error("closure has {components} components, not a knot")]
    NotAKnot { components: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("degenerate shape parameter {0}")]
    DegenerateShape(String),
    #[error("degenerate input: {what}")]
    DegenerateInput { what: String, level: Option<usize>, slot: Option<usize> },
    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),
    #[error("longitude trace {trace} is not +-2")]
    NotParabolicOnBoundary { trace: String },
    #[error("no non-trivial parabolic representation after {attempts} attempts")]
    NoSolutionFound { attempts: usize },
    #[error("obstruction class {rep} of the representation differs from (-1)^n = {braid}; append one letter (a kink) to change the parity")]
    ObstructionMismatch { rep: i8, braid: i8 },
    #[error("region coloring does not close up (residual {residual:e})")]
    InconsistentColoring { residual: f64 },
    #[error("no generic decoration after {retries} retries")]
    GenericityExhausted { retries: usize },
    #[error("no meridian path recorded for arc {arc}")]
    PathNotRecorded { arc: usize },
    #[error("degenerate tetrahedron {tet:?} at crossing {crossing}")]
    DegenerateTetrahedron { crossing: usize, tet: [usize; 4] },
    #[error("i/o: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// Stable machine-readable name, used in CLI error reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Syntax(_) => "SyntaxError",
            Error::Index { .. } => "IndexError",
            Error::NotAKnot { .. } => "NotAKnot",
            Error::SingularMatrix => "SingularMatrix",
            Error::DegenerateShape(_) => "DegenerateShape",
            Error::DegenerateInput { .. } => "DegenerateInput",
            Error::InvalidRepresentation(_) => "InvalidRepresentation",
            Error::NotParabolicOnBoundary { .. } => "NotParabolicOnBoundary",
            Error::NoSolutionFound { .. } => "NoSolutionFound",
            Error::ObstructionMismatch { .. } => "ObstructionMismatch",
            Error::InconsistentColoring { .. } => "InconsistentColoring",
            Error::GenericityExhausted { .. } => "GenericityExhausted",
            Error::PathNotRecorded { .. } => "PathNotRecorded",
            Error::DegenerateTetrahedron { .. } => "DegenerateTetrahedron",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
        }
    }

    pub(crate) fn degenerate(what: impl Into<String>) -> Self {
        Error::DegenerateInput { what: what.into(), level: None, slot: None }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
