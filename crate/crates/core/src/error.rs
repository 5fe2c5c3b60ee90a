use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A single violated configuration invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {}", join(.0))]
    InvalidConfig(Vec<Violation>),

    #[error("{0}")]
    InvalidArgument(String),

    /// A model was asked to work outside the regime it is valid in.
    #[error("regime violation in {model}: {detail}")]
    Regime { model: &'static str, detail: String },

    #[error("spheres overlap: separation {separation:e} m <= 2R = {min:e} m")]
    Overlap { separation: f64, min: f64 },

    #[error("no sign change of {what} in [{lo:e}, {hi:e}]")]
    Bracket { what: &'static str, lo: f64, hi: f64 },

    #[error("mode grids differ ({left} vs {right} modes)")]
    GridMismatch { left: usize, right: usize },

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("no feasible grid point")]
    NoFeasiblePoint,

    #[error("malformed configuration document: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    /// Errors caused by the user's input rather than by the computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::InvalidArgument(_)
                | Error::UnknownParameter(_)
                | Error::Json(_)
                | Error::Io(_)
        )
    }
}
