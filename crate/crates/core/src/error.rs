use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dihedral index k={k} outside [1, {max}]")]
    InvalidK { k: usize, max: usize },

    #[error("inverse of zero")]
    ZeroInverse,

    #[error("operands built for different dihedral indices (k={0} and k={1})")]
    MixedContext(usize, usize),

    #[error("{what} requires even k, got k={k}")]
    ParityMismatch { what: &'static str, k: usize },

    #[error("denominator does not factor over roots of unity: {0}")]
    NotCyclotomic(String),

    #[error("cannot invert {0}")]
    NotInvertible(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown check id '{0}'")]
    UnknownCheck(String),

    #[error("unknown mutation '{0}'")]
    UnknownMutation(String),

    #[error("{0}")]
    Config(String),
}
