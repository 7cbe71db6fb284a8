//! Triplet loading, forum filtering, annotation, splits and extractor
//! evaluation.

mod annotate;
mod forum;
mod metrics;
mod split;

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use chesstag_chess::{BoardState, GameRecord, MoveRecord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tags::Commentary;

pub use annotate::{annotate_corpus, annotate_record, AnnotatedRecord};
pub use forum::{filter_forum_post, scrub_pii, DropReason, FilterConfig, FilterDecision, ForumMetadata, ForumPost, Pattern, EVENT_TOKENS};
pub use metrics::{evaluate_extractor, macro_f1, ExtractorOutput, Metrics, MetricsError};
pub use split::{assign_split, split_dataset, Split, SplitSpec, Splits};

/// One line of a triplet file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripletLine {
    /// SAN history before the commented move.
    pub moves: Vec<String>,
    #[serde(rename = "move")]
    pub mv: String,
    pub commentary: String,
    pub source: String,
    /// Start position when the game did not begin from the initial one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fen: Option<String>,
}

/// A validated (game prefix, move, commentary) example.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripletRecord {
    pub game: GameRecord,
    pub mv: MoveRecord,
    pub commentary: Commentary,
    pub source: String,
}

impl TripletRecord {
    /// Position the move is played from.
    pub fn anchor(&self) -> BoardState {
        self.game.final_position().expect("validated on load")
    }

    pub fn from_line(line: &TripletLine) -> Result<TripletRecord, TripletError> {
        let initial = match &line.fen {
            Some(fen) => BoardState::from_fen(fen).map_err(|e| TripletError::Invalid(e.to_string()))?,
            None => BoardState::initial(),
        };
        let game = GameRecord::from_san_moves(initial, &line.moves).map_err(|e| match e {
            chesstag_chess::PgnError::IllegalMove { ply, san, source } => TripletError::IllegalMove {
                ply,
                san,
                reason: source.to_string(),
            },
            other => TripletError::Invalid(other.to_string()),
        })?;
        let anchor = game.final_position().expect("just replayed");
        let (mv, _) = anchor.play_san(&line.mv).map_err(|e| TripletError::IllegalMove {
            ply: line.moves.len() + 1,
            san: line.mv.clone(),
            reason: e.to_string(),
        })?;
        let commentary = Commentary::new(line.commentary.clone()).at(line.source.clone(), line.moves.len());
        Ok(TripletRecord {
            game,
            mv,
            commentary,
            source: line.source.clone(),
        })
    }

    pub fn to_line(&self) -> TripletLine {
        let initial = &self.game.initial;
        TripletLine {
            moves: self.game.plies.iter().map(|m| m.san.clone()).collect(),
            mv: self.mv.san.clone(),
            commentary: self.commentary.text.clone(),
            source: self.source.clone(),
            fen: (*initial != BoardState::initial()).then(|| initial.to_fen()),
        }
    }
}

/// Every commented ply of a game as a triplet. Comments on one ply are
/// joined with a space.
pub fn triplets_from_game(game: &GameRecord, source: &str) -> Vec<TripletRecord> {
    game.notes
        .iter()
        .enumerate()
        .filter(|(_, n)| !n.comments.is_empty())
        .map(|(i, notes)| TripletRecord {
            game: game.prefix(i),
            mv: game.plies[i].clone(),
            commentary: Commentary::new(notes.comments.join(" ")).at(source, i),
            source: source.to_string(),
        })
        .collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TripletError {
    #[error("JSON syntax: {0}")]
    JsonSyntax(String),
    #[error("illegal move {san:?} at ply {ply}: {reason}")]
    IllegalMove { ply: usize, san: String, reason: String },
    #[error("invalid record: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {error}")]
    Line { line: usize, error: TripletError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Triplets that loaded and the lines that did not.
#[derive(Debug, Default)]
pub struct LoadReport {
    pub records: Vec<TripletRecord>,
    /// 1-based line number and the problem.
    pub rejected: Vec<(usize, TripletError)>,
}

/// Streams triplets from JSONL. Blank lines are skipped; each item carries
/// its 1-based line number.
pub struct TripletReader<R> {
    lines: io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> TripletReader<R> {
    pub fn new(reader: R) -> TripletReader<R> {
        TripletReader {
            lines: reader.lines(),
            line_no: 0,
        }
    }
}

impl<R: BufRead> Iterator for TripletReader<R> {
    type Item = io::Result<(usize, Result<TripletRecord, TripletError>)>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e)),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let parsed = serde_json::from_str::<TripletLine>(&line)
                .map_err(|e| TripletError::JsonSyntax(e.to_string()))
                .and_then(|l| TripletRecord::from_line(&l));
            return Some(Ok((self.line_no, parsed)));
        }
    }
}

/// Reads a whole triplet file. Strict mode stops at the first bad line;
/// lenient mode logs and collects it.
pub fn load_triplets(path: &Path, strict: bool) -> Result<LoadReport, CorpusError> {
    read_triplets(BufReader::new(File::open(path)?), strict)
}

pub fn read_triplets<R: BufRead>(reader: R, strict: bool) -> Result<LoadReport, CorpusError> {
    let mut report = LoadReport::default();
    for item in TripletReader::new(reader) {
        let (line, parsed) = item?;
        match parsed {
            Ok(r) => report.records.push(r),
            Err(error) if strict => return Err(CorpusError::Line { line, error }),
            Err(error) => {
                log::warn!("skipping line {line}: {error}");
                report.rejected.push((line, error));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"moves": ["e4", "e5"], "move": "Nf3", "commentary": "Developing.", "source": "g1"}"#;
    const BAD: &str = r#"{"moves": ["e4", "e4"], "move": "Nf3", "commentary": "x", "source": "g2"}"#;

    #[test]
    fn lenient_and_strict() {
        let text = format!("{GOOD}\n\n{BAD}\nnot json\n{GOOD}\n");
        let r = read_triplets(text.as_bytes(), false).unwrap();
        assert_eq!(r.records.len(), 2);
        assert_eq!(r.rejected.len(), 2);
        assert_eq!(r.rejected[0].0, 3);
        assert!(matches!(r.rejected[0].1, TripletError::IllegalMove { ply: 2, .. }));
        assert!(matches!(r.rejected[1], (4, TripletError::JsonSyntax(_))));

        match read_triplets(text.as_bytes(), true) {
            Err(CorpusError::Line { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(read_triplets("".as_bytes(), true).unwrap().records.is_empty());
    }

    #[test]
    fn record_contents() {
        let r = read_triplets(GOOD.as_bytes(), true).unwrap().records.remove(0);
        assert_eq!(r.game.plies.len(), 2);
        assert_eq!(r.mv.san, "Nf3");
        assert_eq!(r.commentary.ply_index, Some(2));
        assert_eq!(r.to_line(), serde_json::from_str::<TripletLine>(GOOD).unwrap());
    }

    #[test]
    fn illegal_final_move() {
        let line = r#"{"moves": ["e4"], "move": "Nf3", "commentary": "", "source": "g"}"#;
        let r = read_triplets(line.as_bytes(), false).unwrap();
        assert!(matches!(r.rejected[0].1, TripletError::IllegalMove { ply: 2, .. }));
    }

    #[test]
    fn from_pgn_comments() {
        let game = chesstag_chess::parse_pgn("1. e4 {Best by test.} e5 2. Nf3 {Attacks e5.} *").unwrap();
        let t = triplets_from_game(&game, "pgn:1");
        assert_eq!(t.len(), 2);
        assert_eq!(t[1].game.plies.len(), 2);
        assert_eq!(t[1].mv.san, "Nf3");
        assert_eq!(t[1].commentary.text, "Attacks e5.");
    }
}
