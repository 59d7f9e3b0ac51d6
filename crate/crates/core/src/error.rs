use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single failed parameter or scenario check.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("steady state did not converge after {iterations} iterations (last relative update {residual:e})")]
    Divergence { iterations: usize, residual: f64 },

    #[error("drift matrix is not Hurwitz: spectral abscissa {abscissa:e}")]
    Unstable { abscissa: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("covariance matrix is not physical: smallest symplectic eigenvalue {min_symplectic:e} < 1/2")]
    Unphysical { min_symplectic: f64 },

    #[error("stage {index}: {source}")]
    Stage {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },

    #[error("validation failed: {}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    /// True for failures of the numerical pipeline (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Divergence { .. }
            | Error::Unstable { .. }
            | Error::Numerical(_)
            | Error::Unphysical { .. } => true,
            Error::Stage { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
