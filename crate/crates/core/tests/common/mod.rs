#![allow(dead_code)]

use std::path::PathBuf;

use chesstag_chess::{BoardState, MoveRecord};
use chesstag_core::engine::TranscriptBuilder;
use rand::seq::IndexedRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn read_data(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

/// Positions from seeded random playouts. Terminal positions are skipped.
pub fn random_positions(count: usize, max_plies: usize, seed: u64) -> Vec<BoardState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let plies = rng.random_range(0..max_plies);
        let mut board = BoardState::initial();
        for _ in 0..plies {
            let moves = board.legal_moves();
            let Some(mv) = moves.choose(&mut rng) else { break };
            board = board.apply(mv).unwrap();
        }
        if !board.legal_moves().is_empty() {
            out.push(board);
        }
    }
    out
}

/// A position, the move played in it, and what the scripted engine will
/// claim.
pub struct Scenario {
    pub board: BoardState,
    pub played: MoveRecord,
    pub best: MoveRecord,
    pub cp_before: i64,
    pub cp_after: i64,
}

pub fn scenarios(count: usize, seed: u64) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    random_positions(count, 60, seed)
        .into_iter()
        .map(|board| {
            let moves = board.legal_moves();
            let played = moves.choose(&mut rng).unwrap().clone();
            let best = moves.choose(&mut rng).unwrap().clone();
            Scenario {
                board,
                played,
                best,
                cp_before: rng.random_range(-400..400),
                cp_after: rng.random_range(-400..400),
            }
        })
        .collect()
}

/// Transcript for one `derive_tags` call with default engine settings.
pub fn derive_script(s: &Scenario) -> String {
    let go = "go nodes 10000";
    let mut b = TranscriptBuilder::new().handshake("Scripted", 1, false).new_game().search(
        &s.board.to_fen(),
        go,
        &[format!("info depth 9 multipv 1 score cp {} pv {}", s.cp_before, s.best.uci())],
        &s.best.uci(),
    );
    let after = s.board.apply(&s.played).unwrap();
    if let Some(reply) = after.legal_moves().first() {
        b = b.search(
            &after.to_fen(),
            go,
            &[format!("info depth 9 multipv 1 score cp {} pv {}", s.cp_after, reply.uci())],
            &reply.uci(),
        );
    }
    b.build().render()
}
