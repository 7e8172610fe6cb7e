use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("rank n = {0} is not supported (need 2 <= n <= 60)")]
    InvalidRank(usize),
    #[error("generator index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("element is not in the kernel of phi (phi = {0})")]
    NotInKernel(i64),
    #[error("word is not over S_min")]
    NotSmin,
    #[error("ball would exceed the vertex cap of {cap}")]
    ResourceLimit { cap: usize },
    #[error("{0} edge(s) could not be classified")]
    UnresolvedEdges(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, FpError>;
