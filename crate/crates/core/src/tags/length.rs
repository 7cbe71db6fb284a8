use serde::{Deserialize, Serialize};

use super::{Commentary, LengthTag};

/// Inclusive upper bounds for the short and medium classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthCutoffs {
    pub short_max: usize,
    pub medium_max: usize,
}

impl Default for LengthCutoffs {
    fn default() -> Self {
        LengthCutoffs {
            short_max: 7,
            medium_max: 20,
        }
    }
}

impl LengthCutoffs {
    pub fn classify(&self, token_count: usize) -> LengthTag {
        if token_count <= self.short_max {
            LengthTag::Short
        } else if token_count <= self.medium_max {
            LengthTag::Medium
        } else {
            LengthTag::Long
        }
    }
}

pub fn tag_length(commentary: &Commentary, cutoffs: &LengthCutoffs) -> LengthTag {
    cutoffs.classify(commentary.token_count)
}
