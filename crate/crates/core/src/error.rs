use thiserror::Error;

use crate::formal::FormalError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Formal(#[from] FormalError),
    #[error("generator {generator} has no action rule on module {module}")]
    UnknownGenerator { generator: String, module: String },
    #[error("result reaches depth {depth}, beyond window depth {window}")]
    WindowOverflow { depth: u32, window: u32 },
    #[error("series order {needed} exceeds configured truncation depth {limit}")]
    DepthExceeded { needed: u32, limit: u32 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
