use std::fmt;
use std::path::PathBuf;

/// Crate-wide error type.
///
/// The CLI maps these onto distinct process exit codes, so the variants
/// partition failures by cause rather than by module.
#[derive(Debug)]
pub enum Error {
    /// A caller-supplied value is malformed (non-finite input, empty vector,
    /// mismatched lengths, index out of range).
    InvalidInput(String),
    /// A value lies outside the mathematical domain of the operation
    /// (diverging MGF argument, exponent outside (0,1), non-positive time).
    Domain(String),
    /// A stated precondition of a check does not hold; the message names the
    /// first violating coordinate.
    Precondition(String),
    /// Greedy packing accepted fewer than two centers within the attempt
    /// budget; the minimum distance is too large for the cube.
    PackingInfeasible { accepted: usize, attempts: u64 },
    /// A first-passage path exceeded the safety cap on step count, which
    /// signals pathological parameters rather than slow convergence.
    RunawayPath { steps: u64, limit: u64 },
    /// Command line or configuration file could not be interpreted.
    Parse(String),
    /// Refusing to overwrite an existing artifact without `--force`.
    AlreadyExists(PathBuf),
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::PackingInfeasible { accepted, attempts } => write!(
                f,
                "packing infeasible: only {accepted} center(s) accepted after {attempts} attempts; \
                 min_distance is too large for this cube"
            ),
            Error::RunawayPath { steps, limit } => write!(
                f,
                "runaway path: no absorption after {steps} steps (cap {limit}); \
                 dt or fluid parameters are pathological"
            ),
            Error::Parse(msg) => write!(f, "{msg}"),
            Error::AlreadyExists(path) => write!(
                f,
                "refusing to overwrite existing file {} (pass --force to allow)",
                path.display()
            ),
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
