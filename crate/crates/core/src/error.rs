use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("ground-space degeneracy changed along the path: {0}")]
    Topology(String),
    #[error("cannot compile op #{index} ({op}): {reason}")]
    Compile {
        index: usize,
        op: String,
        reason: String,
    },
    #[error("replay failed: {0}")]
    Replay(String),
    #[error("singular configuration: {0}")]
    Singular(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
