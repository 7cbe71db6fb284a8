//! Prompted belief states: where does a likelihood oracle think a piece
//! stands?

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chesstag_chess::{BoardState, Color, Piece, PieceKind, Square};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{BackendError, ScoreOracle};

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("oracle returned {got} scores for {expected} squares")]
    WrongScoreCount { expected: usize, got: usize },
    #[error("no prompts to score")]
    Empty,
    #[error("heatmap I/O: {0}")]
    Io(#[from] io::Error),
    #[error("malformed heatmap: {0}")]
    Heatmap(String),
}

/// Prompt text per (color, piece). `{Color}`/`{color}` and `{piece}` are
/// substituted; explicit overrides win.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplates {
    pub pattern: String,
    #[serde(default)]
    pub overrides: BTreeMap<String, String>,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates {
            pattern: "{Color}'s {piece} on ".to_string(),
            overrides: BTreeMap::new(),
        }
    }
}

impl PromptTemplates {
    fn key(piece: Piece) -> String {
        format!("{} {}", piece.color.name(), piece.kind.name())
    }

    /// Sets the prompt for one piece, e.g. `("White king", "The white king stands on ")`.
    pub fn set(&mut self, piece: Piece, template: &str) {
        self.overrides.insert(PromptTemplates::key(piece), template.to_string());
    }

    pub fn render(&self, piece: Piece) -> String {
        if let Some(t) = self.overrides.get(&PromptTemplates::key(piece)) {
            return t.clone();
        }
        self.pattern
            .replace("{Color}", piece.color.name())
            .replace("{color}", &piece.color.name().to_lowercase())
            .replace("{piece}", piece.kind.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbePrompt {
    pub color: Color,
    pub kind: PieceKind,
    pub template: String,
}

/// The 64 square names, in square index order (a1, b1, ..., h8).
pub fn square_tokens() -> Vec<String> {
    Square::all().map(|s| s.to_string()).collect()
}

/// One prompt per (color, kind) present on the board, White first, kinds
/// in K, Q, R, B, N, P order.
pub fn build_prompts(board: &BoardState, templates: &PromptTemplates) -> Vec<ProbePrompt> {
    let mut out = Vec::new();
    for color in [Color::White, Color::Black] {
        for kind in PieceKind::LISTING_ORDER {
            let piece = Piece::new(color, kind);
            if !board.squares_of(piece).is_empty() {
                out.push(ProbePrompt {
                    color,
                    kind,
                    template: templates.render(piece),
                });
            }
        }
    }
    out
}

/// Distribution over squares for one prompt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    pub prompt: ProbePrompt,
    /// Indexed by square index (a1 = 0, b1 = 1, ..., h8 = 63).
    pub distribution: Vec<f64>,
    pub valid_squares: Vec<Square>,
}

impl BeliefState {
    /// Builds a state from raw log-probabilities, normalizing over the 64
    /// squares. `-inf` means zero mass; NaN and `+inf` are rejected.
    pub fn from_logprobs(prompt: ProbePrompt, logprobs: &[f64], valid_squares: Vec<Square>) -> Result<BeliefState, ProbeError> {
        if logprobs.len() != 64 {
            return Err(ProbeError::WrongScoreCount {
                expected: 64,
                got: logprobs.len(),
            });
        }
        if let Some((index, &value)) = logprobs.iter().enumerate().find(|(_, v)| v.is_nan() || **v == f64::INFINITY) {
            return Err(BackendError::NonFiniteScore { index, value }.into());
        }
        let max = logprobs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(BackendError::NonFiniteScore { index: 0, value: max }.into());
        }
        let weights: Vec<f64> = logprobs.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = weights.iter().sum();
        Ok(BeliefState {
            prompt,
            distribution: weights.iter().map(|w| w / total).collect(),
            valid_squares,
        })
    }

    pub fn prob(&self, sq: Square) -> f64 {
        self.distribution[sq.index()]
    }

    pub fn weight_on_valid(&self) -> f64 {
        self.valid_squares.iter().map(|s| self.prob(*s)).sum()
    }

    /// Most probable square; ties go to the earliest in file-major order.
    pub fn argmax(&self) -> Square {
        let mut best = Square::all_file_major().next().expect("64 squares");
        for sq in Square::all_file_major() {
            if self.prob(sq) > self.prob(best) {
                best = sq;
            }
        }
        best
    }

    pub fn argmax_is_valid(&self) -> bool {
        self.valid_squares.contains(&self.argmax())
    }
}

/// Scores all 64 squares as continuations of `context` followed by the
/// prompt template.
pub fn belief_state(
    oracle: &dyn ScoreOracle,
    prompt: &ProbePrompt,
    context: &str,
    board: &BoardState,
) -> Result<BeliefState, ProbeError> {
    let text = if context.is_empty() {
        prompt.template.clone()
    } else {
        format!("{context} {}", prompt.template)
    };
    let logprobs = oracle.score(&text, &square_tokens())?;
    let mut valid = board.squares_of(Piece::new(prompt.color, prompt.kind));
    valid.sort_by_key(|s| s.file_major_key());
    BeliefState::from_logprobs(prompt.clone(), &logprobs, valid)
}

/// Belief states for every prompt of `board`.
pub fn probe_position(
    oracle: &dyn ScoreOracle,
    board: &BoardState,
    context: &str,
    templates: &PromptTemplates,
) -> Result<Vec<BeliefState>, ProbeError> {
    build_prompts(board, templates)
        .iter()
        .map(|p| belief_state(oracle, p, context, board))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeMetrics {
    pub prompts: usize,
    pub weight_on_valid: f64,
    pub argmax_accuracy: f64,
}

pub fn probe_metrics(states: &[BeliefState]) -> Result<ProbeMetrics, ProbeError> {
    if states.is_empty() {
        return Err(ProbeError::Empty);
    }
    let n = states.len() as f64;
    Ok(ProbeMetrics {
        prompts: states.len(),
        weight_on_valid: states.iter().map(BeliefState::weight_on_valid).sum::<f64>() / n,
        argmax_accuracy: states.iter().filter(|s| s.argmax_is_valid()).count() as f64 / n,
    })
}

#[derive(Serialize)]
struct HeatmapMeta<'a> {
    color: Color,
    piece: PieceKind,
    prompt: &'a str,
    valid_squares: &'a [Square],
    argmax: Square,
    weight_on_valid: f64,
}

/// Writes an 8×8 CSV (rank 8 first, files a to h) and a JSON sidecar
/// with the same stem. Returns both paths.
pub fn emit_heatmap(state: &BeliefState, path: &Path) -> Result<(PathBuf, PathBuf), ProbeError> {
    let mut csv = String::new();
    for rank in (0..8).rev() {
        let row: Vec<String> = (0..8)
            .map(|file| state.prob(Square::new(file, rank).expect("on board")).to_string())
            .collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    fs::write(path, csv)?;
    let sidecar = path.with_extension("json");
    let meta = HeatmapMeta {
        color: state.prompt.color,
        piece: state.prompt.kind,
        prompt: &state.prompt.template,
        valid_squares: &state.valid_squares,
        argmax: state.argmax(),
        weight_on_valid: state.weight_on_valid(),
    };
    fs::write(&sidecar, serde_json::to_string_pretty(&meta).expect("serializable"))?;
    Ok((path.to_path_buf(), sidecar))
}

/// Reads a heatmap CSV back as `grid[row][col]`, row 0 being rank 8.
pub fn read_heatmap(path: &Path) -> Result<[[f64; 8]; 8], ProbeError> {
    let text = fs::read_to_string(path)?;
    let mut grid = [[0.0; 8]; 8];
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if rows.len() != 8 {
        return Err(ProbeError::Heatmap(format!("expected 8 rows, got {}", rows.len())));
    }
    for (r, line) in rows.iter().enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 8 {
            return Err(ProbeError::Heatmap(format!("row {} has {} cells", r + 1, cells.len())));
        }
        for (c, cell) in cells.iter().enumerate() {
            grid[r][c] = cell
                .trim()
                .parse()
                .map_err(|_| ProbeError::Heatmap(format!("bad cell {cell:?}")))?;
        }
    }
    Ok(grid)
}
