use std::fmt;

/// Errors surfaced by the exact-geometry pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A matrix operation required a square matrix.
    NonSquare { rows: usize, cols: usize },
    /// A matrix did not have the rank the operation requires.
    RankDeficient,
    /// A square matrix was singular where an inverse was needed.
    Singular,
    /// Unknown catalog lattice name.
    UnknownLattice(String),
    /// A half-space intersection did not bound a polytope.
    Unbounded,
    /// A configured feasibility cap was exceeded.
    CapExceeded { what: &'static str, cap: usize },
    /// A declared catalog value disagreed with the computed one.
    IntegrityMismatch { what: &'static str, declared: String, computed: String },
    /// Structural invariant violated (bad reflection set, bad Eisenstein map, ...).
    InvalidStructure(String),
    /// Malformed input data (JSON schema, rational literals, dimensions).
    InvalidInput(String),
    /// A required external datum was missing (laminated table gaps, ...).
    MissingData(String),
    /// I/O error carrying the OS message.
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonSquare { rows, cols } => {
                write!(f, "matrix is {rows}x{cols}, operation requires a square matrix")
            }
            Error::RankDeficient => write!(f, "matrix does not have full column rank"),
            Error::Singular => write!(f, "matrix is singular"),
            Error::UnknownLattice(name) => write!(f, "unknown catalog lattice `{name}`"),
            Error::Unbounded => {
                write!(f, "half-space intersection is unbounded (insufficient half-space set)")
            }
            Error::CapExceeded { what, cap } => write!(f, "{what} exceeded cap {cap}"),
            Error::IntegrityMismatch { what, declared, computed } => {
                write!(f, "integrity check failed for {what}: declared {declared}, computed {computed}")
            }
            Error::InvalidStructure(msg) => write!(f, "invalid structure: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::MissingData(msg) => write!(f, "missing data: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
