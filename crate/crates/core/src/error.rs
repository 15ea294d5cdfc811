use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::lpsolver::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "point {point} has {count} intersecting friends, above the cap of {cap} \
         (subset enumeration grows as 2^friends)"
    )]
    FriendsCapExceeded { point: usize, count: usize, cap: usize },

    #[error("oracle limit exceeded: n = {n} > {limit}")]
    OracleLimit { n: usize, limit: usize },

    #[error("malformed bifiltration file at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
