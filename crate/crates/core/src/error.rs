use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("exhaustive enumeration refused: {n} vertices exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks `k >= 1` and `q >= 2k - 1`.
///
/// Below `2k - 1` a k-plex may have diameter larger than two, which breaks the
/// two-hop seeding used by the enumerator.
pub fn check_parameters(k: usize, q: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameters("k must be at least 1".into()));
    }
    if q < 2 * k - 1 {
        return Err(Error::InvalidParameters(format!(
            "q = {q} is below 2k - 1 = {} (k = {k})",
            2 * k - 1
        )));
    }
    Ok(())
}
