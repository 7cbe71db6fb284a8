//! Control tags and the rule-based extractors that derive them from
//! commentary text.

mod classifier;
mod commentary_type;
mod entities;
mod length;
mod quality;
mod suggested;

use std::fmt;
use std::str::FromStr;

use chesstag_chess::BoardState;
use serde::{Deserialize, Serialize};

pub use classifier::{ClassifierError, EntityRecognizer, HttpClassifier, Label, TextClassifier};
pub use commentary_type::{extract_commentary_type, TypeScore};
pub use entities::{extract_entities, AllowList, Entities, PRONOUNS};
pub use length::{tag_length, LengthCutoffs};
pub use quality::extract_move_quality_text;
pub use suggested::extract_suggested_moves;

/// One commentary text attached to a ply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commentary {
    pub text: String,
    pub token_count: usize,
    pub ply_index: Option<usize>,
    pub game: Option<String>,
}

impl Commentary {
    pub fn new(text: impl Into<String>) -> Commentary {
        let text = text.into();
        let token_count = text.split_whitespace().count();
        Commentary {
            text,
            token_count,
            ply_index: None,
            game: None,
        }
    }

    pub fn at(mut self, game: impl Into<String>, ply_index: usize) -> Commentary {
        self.game = Some(game.into());
        self.ply_index = Some(ply_index);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CommentaryType {
    #[serde(rename = "Move Description")]
    MoveDescription,
    #[serde(rename = "Move Quality")]
    MoveQuality,
    #[serde(rename = "Move Comparison")]
    MoveComparison,
    #[serde(rename = "Planning/Rationale")]
    Planning,
    #[serde(rename = "Contextual")]
    Contextual,
    #[serde(rename = "General")]
    General,
}

impl CommentaryType {
    pub const ALL: [CommentaryType; 6] = [
        CommentaryType::MoveDescription,
        CommentaryType::MoveQuality,
        CommentaryType::MoveComparison,
        CommentaryType::Planning,
        CommentaryType::Contextual,
        CommentaryType::General,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CommentaryType::MoveDescription => "Move Description",
            CommentaryType::MoveQuality => "Move Quality",
            CommentaryType::MoveComparison => "Move Comparison",
            CommentaryType::Planning => "Planning/Rationale",
            CommentaryType::Contextual => "Contextual",
            CommentaryType::General => "General",
        }
    }

    /// Identifier used on the command line (`move_quality`).
    pub fn slug(self) -> &'static str {
        match self {
            CommentaryType::MoveDescription => "move_description",
            CommentaryType::MoveQuality => "move_quality",
            CommentaryType::MoveComparison => "move_comparison",
            CommentaryType::Planning => "planning",
            CommentaryType::Contextual => "contextual",
            CommentaryType::General => "general",
        }
    }
}

impl fmt::Display for CommentaryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CommentaryType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['_', '-'], " ");
        CommentaryType::ALL
            .into_iter()
            .find(|t| t.label().to_ascii_lowercase() == norm || t.slug().replace('_', " ") == norm)
            .or(match norm.as_str() {
                "comparison" | "comparative" => Some(CommentaryType::MoveComparison),
                "description" => Some(CommentaryType::MoveDescription),
                "quality" => Some(CommentaryType::MoveQuality),
                "planning/rationale" | "rationale" => Some(CommentaryType::Planning),
                _ => None,
            })
            .ok_or_else(|| format!("unknown commentary type {s:?}"))
    }
}

/// Move quality, best first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveQuality {
    Excellent,
    Good,
    Inaccuracy,
    Mistake,
    Blunder,
}

impl MoveQuality {
    pub const ALL: [MoveQuality; 5] = [
        MoveQuality::Excellent,
        MoveQuality::Good,
        MoveQuality::Inaccuracy,
        MoveQuality::Mistake,
        MoveQuality::Blunder,
    ];

    /// Conventional commentary glyph.
    pub fn marker(self) -> &'static str {
        match self {
            MoveQuality::Excellent => "!!",
            MoveQuality::Good => "!",
            MoveQuality::Inaccuracy => "!?",
            MoveQuality::Mistake => "?",
            MoveQuality::Blunder => "??",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MoveQuality::Excellent => "Excellent",
            MoveQuality::Good => "Good",
            MoveQuality::Inaccuracy => "Inaccuracy",
            MoveQuality::Mistake => "Mistake",
            MoveQuality::Blunder => "Blunder",
        }
    }
}

impl fmt::Display for MoveQuality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MoveQuality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase();
        MoveQuality::ALL
            .into_iter()
            .find(|q| q.label().to_ascii_lowercase() == norm || q.marker() == norm)
            .or((norm == "inaccurate").then_some(MoveQuality::Inaccuracy))
            .ok_or_else(|| format!("unknown move quality {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthTag {
    Short,
    #[default]
    Medium,
    Long,
}

impl LengthTag {
    pub const ALL: [LengthTag; 3] = [LengthTag::Short, LengthTag::Medium, LengthTag::Long];

    pub fn name(self) -> &'static str {
        match self {
            LengthTag::Short => "short",
            LengthTag::Medium => "medium",
            LengthTag::Long => "long",
        }
    }

    /// Rendered form, e.g. `[short]`.
    pub fn token(self) -> String {
        format!("[{}]", self.name())
    }
}

impl FromStr for LengthTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().trim_start_matches('[').trim_end_matches(']').to_ascii_lowercase();
        LengthTag::ALL
            .into_iter()
            .find(|l| l.name() == norm)
            .ok_or_else(|| format!("unknown length tag {s:?}"))
    }
}

/// Reserved for telling recommended lines from refuted ones. Extraction
/// never sets it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Better,
    Inferior,
}

/// A line of moves, legal in sequence from `anchor`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuggestedLine {
    pub moves: Vec<String>,
    pub anchor: BoardState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarity: Option<Polarity>,
}

impl SuggestedLine {
    /// Validates `moves` from `anchor` and stores them in canonical SAN.
    pub fn new<S: AsRef<str>>(anchor: BoardState, moves: &[S]) -> Result<SuggestedLine, chesstag_chess::ChessError> {
        let mut board = anchor.clone();
        let mut canonical = Vec::with_capacity(moves.len());
        for san in moves {
            let (mv, next) = board.play_san(san.as_ref())?;
            canonical.push(mv.san);
            board = next;
        }
        Ok(SuggestedLine {
            moves: canonical,
            anchor,
            polarity: None,
        })
    }

    pub fn is_legal(&self) -> bool {
        let mut board = self.anchor.clone();
        for san in &self.moves {
            match board.play_san(san) {
                Ok((_, next)) => board = next,
                Err(_) => return false,
            }
        }
        true
    }

    pub fn text(&self) -> String {
        self.moves.join(" ")
    }
}

/// Tag families in their fixed rendering order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagFamily {
    CommentaryType,
    MoveQuality,
    SuggestedMove,
    Pronoun,
    ProperNoun,
    Length,
}

impl TagFamily {
    pub const ALL: [TagFamily; 6] = [
        TagFamily::CommentaryType,
        TagFamily::MoveQuality,
        TagFamily::SuggestedMove,
        TagFamily::Pronoun,
        TagFamily::ProperNoun,
        TagFamily::Length,
    ];

    /// Bracketed marker preceding the value. Length tags have no marker and
    /// render as `[short]` etc.
    pub fn marker(self) -> Option<&'static str> {
        match self {
            TagFamily::CommentaryType => Some("[Commentary Type]"),
            TagFamily::MoveQuality => Some("[Move Quality]"),
            TagFamily::SuggestedMove => Some("[Suggested Move]"),
            TagFamily::Pronoun => Some("[Pronoun]"),
            TagFamily::ProperNoun => Some("[Proper Noun]"),
            TagFamily::Length => None,
        }
    }
}

/// The control tags for one (position, move, commentary) example.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TagSet {
    pub commentary_type: Option<CommentaryType>,
    pub move_quality: Option<MoveQuality>,
    pub suggested: Option<Vec<SuggestedLine>>,
    #[serde(default)]
    pub pronouns: Vec<String>,
    #[serde(default)]
    pub proper_nouns: Vec<String>,
    pub length: LengthTag,
}

impl TagSet {
    /// Families with a value present.
    pub fn families(&self) -> Vec<TagFamily> {
        TagFamily::ALL
            .into_iter()
            .filter(|f| match f {
                TagFamily::CommentaryType => self.commentary_type.is_some(),
                TagFamily::MoveQuality => self.move_quality.is_some(),
                TagFamily::SuggestedMove => self.suggested.as_ref().is_some_and(|s| !s.is_empty()),
                TagFamily::Pronoun => !self.pronouns.is_empty(),
                TagFamily::ProperNoun => !self.proper_nouns.is_empty(),
                TagFamily::Length => true,
            })
            .collect()
    }
}

/// A non-fatal problem met while extracting tags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub extractor: String,
    pub message: String,
}

impl Warning {
    pub fn new(extractor: &str, message: impl Into<String>) -> Warning {
        Warning {
            extractor: extractor.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.extractor, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Annotated {
    pub tags: TagSet,
    pub warnings: Vec<Warning>,
}

/// The five extractors plus their configuration. External models, when
/// set, take precedence over the rule-based defaults.
#[derive(Default)]
pub struct Extractors {
    pub length_cutoffs: LengthCutoffs,
    pub allow_list: AllowList,
    pub classifier: Option<Box<dyn TextClassifier + Send + Sync>>,
    pub recognizer: Option<Box<dyn EntityRecognizer + Send + Sync>>,
}

impl Extractors {
    pub fn annotate(&self, commentary: &Commentary, anchor: &BoardState) -> Annotated {
        let mut warnings = Vec::new();

        let mut commentary_type = extract_commentary_type(commentary).category;
        let mut move_quality = extract_move_quality_text(commentary);
        if let Some(classifier) = &self.classifier {
            match classifier.classify("commentary_type", &commentary.text) {
                Ok(label) => match label.label.parse() {
                    Ok(t) => commentary_type = t,
                    Err(e) => warnings.push(Warning::new("commentary_type", e)),
                },
                Err(e) => warnings.push(Warning::new("commentary_type", e.to_string())),
            }
            match classifier.classify("move_quality", &commentary.text) {
                Ok(label) if label.label.eq_ignore_ascii_case("none") => move_quality = None,
                Ok(label) => match label.label.parse() {
                    Ok(q) => move_quality = Some(q),
                    Err(e) => warnings.push(Warning::new("move_quality", e)),
                },
                Err(e) => warnings.push(Warning::new("move_quality", e.to_string())),
            }
        }

        let (suggested, suggestion_warnings) = extract_suggested_moves(commentary, anchor);
        warnings.extend(suggestion_warnings);

        let entities = match &self.recognizer {
            Some(r) => match r.recognize(&commentary.text) {
                Ok(e) => e,
                Err(e) => {
                    warnings.push(Warning::new("entities", e.to_string()));
                    extract_entities(commentary, &self.allow_list)
                }
            },
            None => extract_entities(commentary, &self.allow_list),
        };

        Annotated {
            tags: TagSet {
                commentary_type: Some(commentary_type),
                move_quality,
                suggested,
                pronouns: entities.pronouns,
                proper_nouns: entities.proper_nouns,
                length: tag_length(commentary, &self.length_cutoffs),
            },
            warnings,
        }
    }
}

/// Runs the default rule-based extractors.
pub fn annotate(commentary: &Commentary, anchor: &BoardState) -> Annotated {
    Extractors::default().annotate(commentary, anchor)
}
