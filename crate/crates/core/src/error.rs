use thiserror::Error;

use crate::lattice::{Coord, GridDims};

pub type Result<T> = std::result::Result<T, GigError>;

/// Everything that can go wrong in the library, grouped by the caller's fix.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GigError {
    #[error("grid dimensions must be positive, got {rows}x{cols}")]
    InvalidDims { rows: usize, cols: usize },

    #[error("coordinate {coord} is outside the {dims} grid")]
    OutOfBounds { coord: Coord, dims: GridDims },

    #[error("vertex set is empty")]
    EmptySet,

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),

    #[error("the two vertices must be distinct, got {0} twice")]
    SameVertex(Coord),

    #[error("{quantity} formula requires {requirement}, got a {dims} grid")]
    Domain {
        quantity: &'static str,
        requirement: &'static str,
        dims: GridDims,
    },

    #[error("{what} needs {requested}, exceeding the cap of {cap}{hint}")]
    CapExceeded {
        what: &'static str,
        requested: String,
        cap: u64,
        hint: &'static str,
    },

    #[error("tolerance must be strictly positive")]
    NonPositiveTolerance,

    #[error("trial count must be at least 1")]
    NoTrials,
}

impl GigError {
    /// Domain errors are formula-range violations rather than malformed input.
    pub fn is_domain(&self) -> bool {
        matches!(self, GigError::Domain { .. })
    }

    pub fn is_cap(&self) -> bool {
        matches!(self, GigError::CapExceeded { .. })
    }
}
