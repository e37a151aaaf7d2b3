use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("grid of side {side} ({points} points) exceeds the cap of {cap} points")]
    GridTooLarge { side: usize, points: usize, cap: usize },
    #[error("numerical guard tripped: {0}")]
    Numerical(String),
    #[error("snapshot format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
