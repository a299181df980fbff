use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lattice size {0} is below the minimum of 3")]
    LatticeTooSmall(usize),

    #[error("lattice dimension {0} is not one of 1, 2, 3")]
    UnsupportedDimension(usize),

    #[error("index {coords:?} does not belong to a lattice of size {size} and dimension {dim}")]
    InvalidIndex {
        coords: Vec<usize>,
        size: usize,
        dim: usize,
    },

    #[error("lattices differ: (L={0}, D={1}) vs (L={2}, D={3})")]
    LatticeMismatch(usize, usize, usize, usize),

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("smoothing parameter eta={0} is outside (0, 1/2]")]
    InvalidEta(f64),

    #[error("charge field does not match the syndrome of the error configuration")]
    SyndromeMismatch,

    #[error("error configuration has a nonzero syndrome ({0} anyons)")]
    NonzeroSyndrome(usize),

    #[error("distance {0} is below 1")]
    DistanceBelowOne(f64),

    #[error("the gradient of a charge at the origin is undefined at the origin")]
    SelfGradient,

    #[error("bound requires dimension >= 2, got {0}")]
    DimensionTooLow(usize),

    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),

    #[error("no anyons present")]
    NoAnyons,
    #[error("contact radius must be finite and non-negative, got {0}")]
    InvalidContactRadius(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
