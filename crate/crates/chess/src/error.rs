use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChessError {
    #[error("invalid square {0:?}")]
    InvalidSquare(String),
    #[error("invalid FEN: {0}")]
    InvalidFen(String),
    #[error("invalid position: {0}")]
    InvalidPosition(String),
    #[error("unparseable SAN {0:?}")]
    UnparseableSan(String),
    #[error("illegal move {0:?}")]
    IllegalMove(String),
    #[error("ambiguous move {0:?}")]
    AmbiguousMove(String),
}
