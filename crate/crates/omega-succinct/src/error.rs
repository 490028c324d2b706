use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Input` covers malformed data handed in by a caller (unknown letters,
/// unparsable files, bad parameters); `Contract` covers violated operation
/// preconditions (e.g. passing a nondeterministic automaton where a DFA is
/// required). The CLI maps `Input` to exit code 2 and everything else to 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
