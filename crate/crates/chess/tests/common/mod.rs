#![allow(dead_code)]

use chesstag_chess::{BoardState, MoveRecord};
use rand::seq::IndexedRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Positions reached by uniformly random playouts from the initial position.
pub fn random_positions(count: usize, seed: u64) -> Vec<BoardState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let plies = rng.random_range(0..120);
        let mut board = BoardState::initial();
        for _ in 0..plies {
            let moves = board.legal_moves();
            let Some(mv) = moves.choose(&mut rng) else { break };
            board = board.apply(mv).unwrap();
        }
        out.push(board);
    }
    out
}

/// A random legal game of at most `plies` moves.
pub fn random_game(plies: usize, seed: u64) -> (BoardState, Vec<MoveRecord>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = BoardState::initial();
    let mut board = start.clone();
    let mut moves = Vec::new();
    for _ in 0..plies {
        let legal = board.legal_moves();
        let Some(mv) = legal.choose(&mut rng) else { break };
        board = board.apply(mv).unwrap();
        moves.push(mv.clone());
    }
    (start, moves)
}
