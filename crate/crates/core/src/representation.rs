//! Text serialization of game state, move and tags into generator input.
//!
//! Format v1 (see `docs/format.md`):
//!
//! ```text
//! [v1] [PGN] <movetext> [PIECES] <pieces> [ATTACKS] <attacks> [MOVE] <san> <tags>
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use chesstag_chess::{AttackMode, AttackRelation, BoardState, Color, GameRecord, MoveRecord, Piece, PieceKind, Square};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tags::{LengthTag, TagFamily, TagSet};

pub const VERSION_TOKEN: &str = "[v1]";
pub const UNCONDITIONED: &str = "[Unconditioned]";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Segment {
    Pgn,
    Pieces,
    Attacks,
    Move,
    Tags,
}

impl Segment {
    pub const ALL: [Segment; 5] = [Segment::Pgn, Segment::Pieces, Segment::Attacks, Segment::Move, Segment::Tags];

    /// Sentinel preceding the segment. Tags carry their own markers.
    pub fn sentinel(self) -> Option<&'static str> {
        match self {
            Segment::Pgn => Some("[PGN]"),
            Segment::Pieces => Some("[PIECES]"),
            Segment::Attacks => Some("[ATTACKS]"),
            Segment::Move => Some("[MOVE]"),
            Segment::Tags => None,
        }
    }
}

/// Which game-state segments to include.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateSegments {
    pub pgn: bool,
    pub pieces: bool,
    pub attacks: bool,
}

impl StateSegments {
    pub const ALL: StateSegments = StateSegments {
        pgn: true,
        pieces: true,
        attacks: true,
    };
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ablation {
    Unconditioned,
    MoveOnly,
    GameState(StateSegments),
    /// Full game state plus the listed tag families.
    WithTags(Vec<TagFamily>),
    Fully,
}

impl Ablation {
    pub fn segments(&self) -> StateSegments {
        match self {
            Ablation::Unconditioned | Ablation::MoveOnly => StateSegments {
                pgn: false,
                pieces: false,
                attacks: false,
            },
            Ablation::GameState(s) => *s,
            Ablation::WithTags(_) | Ablation::Fully => StateSegments::ALL,
        }
    }

    pub fn tag_families(&self) -> Vec<TagFamily> {
        match self {
            Ablation::WithTags(f) => f.clone(),
            Ablation::Fully => TagFamily::ALL.to_vec(),
            _ => Vec::new(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Ablation::Unconditioned => "unconditioned",
            Ablation::MoveOnly => "move",
            Ablation::GameState(_) => "game-state",
            Ablation::WithTags(_) => "tags",
            Ablation::Fully => "fully",
        }
    }
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ablation {
    type Err = String;

    /// Accepts `unconditioned`, `move`, `game-state`, `tags`, `fully`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "unconditioned" => Ok(Ablation::Unconditioned),
            "move" | "move-only" => Ok(Ablation::MoveOnly),
            "game-state" | "gamestate" => Ok(Ablation::GameState(StateSegments::ALL)),
            "tags" | "with-tags" => Ok(Ablation::WithTags(TagFamily::ALL.to_vec())),
            "fully" | "fully-conditioned" | "full" => Ok(Ablation::Fully),
            other => Err(format!("unknown ablation {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum DelimiterScheme {
    #[default]
    V1,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationConfig {
    pub ablation: Ablation,
    pub scheme: DelimiterScheme,
    pub attack_mode: AttackMode,
}

impl RepresentationConfig {
    pub fn new(ablation: Ablation) -> RepresentationConfig {
        RepresentationConfig {
            ablation,
            scheme: DelimiterScheme::V1,
            attack_mode: AttackMode::PseudoLegal,
        }
    }

    pub fn fully() -> RepresentationConfig {
        RepresentationConfig::new(Ablation::Fully)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepresentationError {
    #[error("board does not match the replayed game: expected {expected}, got {actual}")]
    InconsistentState { expected: String, actual: String },
    #[error("game record does not replay: {0}")]
    Replay(#[from] chesstag_chess::ChessError),
}

/// Assembled generator input with the byte range of each segment's content.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputText {
    pub text: String,
    pub segment_spans: BTreeMap<Segment, Range<usize>>,
}

impl InputText {
    pub fn segment(&self, seg: Segment) -> Option<&str> {
        self.segment_spans.get(&seg).map(|r| &self.text[r.clone()])
    }
}

impl fmt::Display for InputText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// `White R_c5`
pub fn render_piece(piece: Piece, sq: Square) -> String {
    format!("{} {}_{}", piece.color.name(), piece.kind.letter(), sq)
}

/// `White R_a1$P_a2`
pub fn render_attack(rel: &AttackRelation) -> String {
    let (attacker, from) = rel.attacker;
    let (target, to) = rel.target;
    format!("{} {}_{}${}_{}", attacker.color.name(), attacker.kind.letter(), from, target.kind.letter(), to)
}

/// Pieces by color (White first), kind (K, Q, R, B, N, P), then square
/// in file-major order.
pub fn render_pieces(board: &BoardState) -> String {
    let mut out = Vec::new();
    for color in [Color::White, Color::Black] {
        for kind in PieceKind::LISTING_ORDER {
            let piece = Piece::new(color, kind);
            let mut squares = board.squares_of(piece);
            squares.sort_by_key(|sq| sq.file_major_key());
            out.extend(squares.into_iter().map(|sq| render_piece(piece, sq)));
        }
    }
    out.join(" ")
}

pub fn render_attacks(board: &BoardState, mode: AttackMode) -> String {
    board
        .attack_relations_with(mode)
        .iter()
        .map(render_attack)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Game-state segments enabled by `config`, in fixed order. `board` must be
/// the position reached by replaying `record`.
pub fn render_game_state(
    record: &GameRecord,
    board: &BoardState,
    config: &RepresentationConfig,
) -> Result<Vec<(Segment, String)>, RepresentationError> {
    let replayed = record.final_position()?;
    if &replayed != board {
        return Err(RepresentationError::InconsistentState {
            expected: replayed.to_fen(),
            actual: board.to_fen(),
        });
    }
    let enabled = config.ablation.segments();
    let mut out = Vec::new();
    if enabled.pgn {
        out.push((Segment::Pgn, record.movetext()));
    }
    if enabled.pieces {
        out.push((Segment::Pieces, render_pieces(board)));
    }
    if enabled.attacks {
        out.push((Segment::Attacks, render_attacks(board, config.attack_mode)));
    }
    Ok(out)
}

fn tag_parts(tags: &TagSet, families: &[TagFamily]) -> Vec<String> {
    let mut parts = Vec::new();
    for family in TagFamily::ALL.into_iter().filter(|f| families.contains(f)) {
        let marker = family.marker().unwrap_or_default();
        match family {
            TagFamily::CommentaryType => {
                parts.extend(tags.commentary_type.map(|t| format!("{marker} {}", t.label())));
            }
            TagFamily::MoveQuality => {
                parts.extend(tags.move_quality.map(|q| format!("{marker} {}", q.label())));
            }
            TagFamily::SuggestedMove => {
                for line in tags.suggested.iter().flatten().filter(|l| !l.moves.is_empty()) {
                    parts.push(format!("{marker} {}", line.text()));
                }
            }
            TagFamily::Pronoun => parts.extend(tags.pronouns.iter().map(|p| format!("{marker} {p}"))),
            TagFamily::ProperNoun => parts.extend(tags.proper_nouns.iter().map(|p| format!("{marker} {p}"))),
            TagFamily::Length => parts.push(tags.length.token()),
        }
    }
    parts
}

/// All present tags in family order, e.g. `[Move Quality] Good [short]`.
pub fn render_tags(tags: &TagSet) -> String {
    tag_parts(tags, &TagFamily::ALL).join(" ")
}

pub fn render_tags_subset(tags: &TagSet, families: &[TagFamily]) -> String {
    tag_parts(tags, families).join(" ")
}

struct Builder {
    text: String,
    spans: BTreeMap<Segment, Range<usize>>,
}

impl Builder {
    fn word(&mut self, w: &str) {
        if w.is_empty() {
            return;
        }
        if !self.text.is_empty() {
            self.text.push(' ');
        }
        self.text.push_str(w);
    }

    fn segment(&mut self, seg: Segment, content: &str) {
        if let Some(s) = seg.sentinel() {
            self.word(s);
        }
        let start = if content.is_empty() {
            self.text.len()
        } else {
            self.word(content);
            self.text.len() - content.len()
        };
        self.spans.insert(seg, start..self.text.len());
    }
}

/// Joins segments, move and tags as `config` dictates.
pub fn assemble_input(
    segments: &[(Segment, String)],
    mv: &MoveRecord,
    tags: &TagSet,
    config: &RepresentationConfig,
) -> InputText {
    let mut b = Builder {
        text: String::new(),
        spans: BTreeMap::new(),
    };
    match &config.ablation {
        Ablation::Unconditioned => b.word(UNCONDITIONED),
        Ablation::MoveOnly => {
            b.word(&mv.san);
            b.spans.insert(Segment::Move, 0..b.text.len());
        }
        ablation => {
            b.word(VERSION_TOKEN);
            let enabled = ablation.segments();
            for (seg, on) in [
                (Segment::Pgn, enabled.pgn),
                (Segment::Pieces, enabled.pieces),
                (Segment::Attacks, enabled.attacks),
            ] {
                if on {
                    let content = segments.iter().find(|(s, _)| *s == seg).map_or("", |(_, c)| c.as_str());
                    b.segment(seg, content);
                }
            }
            b.segment(Segment::Move, &mv.san);
            let families = ablation.tag_families();
            if !families.is_empty() {
                b.segment(Segment::Tags, &render_tags_subset(tags, &families));
            }
        }
    }
    InputText {
        text: b.text,
        segment_spans: b.spans,
    }
}

/// The game-state prefix alone (`[v1] [PGN] ... [ATTACKS] ...`), without a
/// move. Used as probe context.
pub fn game_state_text(
    record: &GameRecord,
    board: &BoardState,
    config: &RepresentationConfig,
) -> Result<String, RepresentationError> {
    let mut b = Builder {
        text: String::new(),
        spans: BTreeMap::new(),
    };
    b.word(VERSION_TOKEN);
    for (seg, content) in render_game_state(record, board, config)? {
        b.segment(seg, &content);
    }
    Ok(b.text)
}

/// Convenience: render the state of `record` and assemble with `mv`.
pub fn build_input(
    record: &GameRecord,
    board: &BoardState,
    mv: &MoveRecord,
    tags: &TagSet,
    config: &RepresentationConfig,
) -> Result<InputText, RepresentationError> {
    let segments = render_game_state(record, board, config)?;
    Ok(assemble_input(&segments, mv, tags, config))
}

/// Segments recovered from an assembled input.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParsedInput {
    pub unconditioned: bool,
    pub segments: BTreeMap<Segment, String>,
    /// Tags as (family, value); length tags have the bare name as value.
    pub tags: Vec<(TagFamily, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("unsupported format version in {0:?}")]
    Version(String),
    #[error("segment {0:?} out of order or repeated")]
    Order(String),
    #[error("missing [MOVE] segment")]
    MissingMove,
}

/// Inverse of [`assemble_input`].
pub fn split_input(text: &str) -> Result<ParsedInput, SplitError> {
    let mut parsed = ParsedInput::default();
    if text == UNCONDITIONED {
        parsed.unconditioned = true;
        return Ok(parsed);
    }
    let Some(rest) = text.strip_prefix(VERSION_TOKEN) else {
        if text.is_empty() || text.contains(char::is_whitespace) {
            return Err(SplitError::Version(text.chars().take(20).collect()));
        }
        parsed.segments.insert(Segment::Move, text.to_string());
        return Ok(parsed);
    };

    let mut words = rest.split(' ').filter(|w| !w.is_empty()).peekable();
    let mut current: Option<Segment> = None;
    let mut content: Vec<&str> = Vec::new();
    let mut last = None;
    let flush = |seg: Option<Segment>, content: &mut Vec<&str>, parsed: &mut ParsedInput| {
        if let Some(seg) = seg {
            parsed.segments.insert(seg, content.join(" "));
        }
        content.clear();
    };
    while let Some(w) = words.next() {
        let sentinel = [Segment::Pgn, Segment::Pieces, Segment::Attacks, Segment::Move]
            .into_iter()
            .find(|s| s.sentinel() == Some(w));
        if let Some(seg) = sentinel {
            if last.is_some_and(|l| l >= seg) {
                return Err(SplitError::Order(w.to_string()));
            }
            flush(current, &mut content, &mut parsed);
            current = Some(seg);
            last = Some(seg);
            if seg == Segment::Move {
                if let Some(san) = words.next() {
                    parsed.segments.insert(Segment::Move, san.to_string());
                }
                current = None;
                let tags: Vec<&str> = words.by_ref().collect();
                if !tags.is_empty() {
                    let joined = tags.join(" ");
                    parsed.tags = parse_tags(&joined);
                    parsed.segments.insert(Segment::Tags, joined);
                }
            }
        } else {
            content.push(w);
        }
    }
    flush(current, &mut content, &mut parsed);
    if !parsed.segments.contains_key(&Segment::Move) {
        return Err(SplitError::MissingMove);
    }
    Ok(parsed)
}

/// Splits a rendered tag string into (family, value) pairs.
pub fn parse_tags(text: &str) -> Vec<(TagFamily, String)> {
    let mut out: Vec<(TagFamily, String)> = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let marker = TagFamily::ALL
            .into_iter()
            .filter_map(|f| f.marker().map(|m| (f, m)))
            .find(|(_, m)| rest.starts_with(m));
        if let Some((family, m)) = marker {
            rest = rest[m.len()..].trim_start();
            let end = next_tag_start(rest);
            out.push((family, rest[..end].trim_end().to_string()));
            rest = rest[end..].trim_start();
            continue;
        }
        let length = LengthTag::ALL.into_iter().find(|l| rest.starts_with(&l.token()));
        if let Some(l) = length {
            out.push((TagFamily::Length, l.name().to_string()));
            rest = rest[l.token().len()..].trim_start();
            continue;
        }
        // Stray text: attach to the previous value.
        let end = next_tag_start(rest).max(rest.find(' ').map_or(rest.len(), |i| i + 1));
        if let Some(last) = out.last_mut() {
            last.1.push(' ');
            last.1.push_str(rest[..end].trim());
        }
        rest = rest[end..].trim_start();
    }
    out
}

fn next_tag_start(s: &str) -> usize {
    let mut best = s.len();
    for m in TagFamily::ALL.iter().filter_map(|f| f.marker()) {
        if let Some(i) = s.find(m) {
            best = best.min(i);
        }
    }
    for l in LengthTag::ALL {
        if let Some(i) = s.find(&l.token()) {
            best = best.min(i);
        }
    }
    best
}
