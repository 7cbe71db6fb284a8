//! Chess rules kernel: positions, legal move generation, SAN, FEN, PGN and
//! attack relations between pieces.

mod attacks;
mod board;
mod error;
mod movegen;
mod moves;
mod pgn;
mod san;
mod types;

pub use attacks::{AttackMode, AttackRelation};
pub use board::{BoardState, CastlingRights, INITIAL_FEN};
pub use error::ChessError;
pub use moves::{Annotation, MoveFlags, MoveRecord};
pub use pgn::{parse_pgn, parse_pgn_all, GameRecord, GameResult, PgnError, PlyNotes};
pub use types::{Color, Piece, PieceKind, Square};
