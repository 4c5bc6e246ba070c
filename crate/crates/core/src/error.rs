use thiserror::Error;

use crate::table::Window;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("inhomogeneous relation on line {line}: terms of degree {first} and {second}")]
    Inhomogeneous { line: usize, first: i32, second: i32 },
    #[error("unsupported field `{0}`: expected F<p> with p prime, or Q")]
    UnsupportedField(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("malformed complex: {0}")]
    MalformedComplex(String),
    #[error("window {window} is insufficient: {reason}")]
    WindowInsufficient { window: Window, reason: String },
    #[error("Koszul tower did not stabilize in {count} bidegree(s) by power {m_max}")]
    TowerNotStabilized { m_max: u32, count: usize },
    #[error("bar weight bound {w_max} does not certify degree {degree}")]
    WeightBoundInsufficient { w_max: u32, degree: i32 },
    #[error("module is not finite dimensional within the window: {0}")]
    NotFiniteDimensional(String),
    #[error("formality gate failed in degree {degree}: dim E = {algebra_dim}, Ext total = {ext_dim}")]
    FormalityGateFailed {
        degree: i32,
        algebra_dim: usize,
        ext_dim: usize,
    },
    #[error("computation exceeds the size limit: {0}")]
    SizeLimit(String),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::UnknownGenerator(_)
            | Error::Inhomogeneous { .. }
            | Error::UnsupportedField(_)
            | Error::InvalidPresentation(_)
            | Error::Usage(_) => 2,
            Error::WindowInsufficient { .. }
            | Error::TowerNotStabilized { .. }
            | Error::WeightBoundInsufficient { .. } => 3,
            _ => 1,
        }
    }
}
