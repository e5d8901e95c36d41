use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("orbital index {index} out of range for basis of dimension {dim}")]
    OrbitalOutOfRange { index: usize, dim: usize },
    #[error("orbital {0} appears more than once")]
    DuplicateOrbital(usize),
    #[error("particle number mismatch: expected {expected}, found {found}")]
    ParticleNumberMismatch { expected: usize, found: usize },
    #[error("states live in different orbital bases")]
    BasisMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown spatial mode `{0}`")]
    UnknownMode(String),
    #[error("bipartition size {m} out of range for {n} particles")]
    BipartitionOutOfRange { n: usize, m: usize },
    #[error("oracle size cap exceeded: N={n}, d={d} (limit N<=5, d<=10)")]
    OracleTooLarge { n: usize, d: usize },
    #[error("state has support outside the required sector: {0}")]
    WrongSector(String),
    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
