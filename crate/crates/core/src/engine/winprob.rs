use serde::{Deserialize, Serialize};

use crate::tags::MoveQuality;

/// An engine score from the side to move's point of view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Score {
    Cp(i64),
    /// Moves to mate; negative when the side to move gets mated.
    Mate(i64),
    /// Per-mille win/draw/loss.
    Wdl { w: u32, d: u32, l: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WinProbSource {
    /// WDL when the engine reports it, otherwise the logistic map.
    #[default]
    Auto,
    EngineWdl,
    CpLogistic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WinProbConfig {
    pub source: WinProbSource,
    /// Logistic scale per centipawn.
    pub k: f64,
}

pub const DEFAULT_LOGISTIC_K: f64 = 0.004;

impl Default for WinProbConfig {
    fn default() -> Self {
        WinProbConfig {
            source: WinProbSource::Auto,
            k: DEFAULT_LOGISTIC_K,
        }
    }
}

/// `1 / (1 + exp(-k * cp))`
pub fn logistic(cp: f64, k: f64) -> f64 {
    1.0 / (1.0 + (-k * cp).exp())
}

pub fn score_to_winprob(score: Score, k: f64) -> f64 {
    match score {
        Score::Cp(cp) => logistic(cp as f64, k),
        Score::Mate(n) if n > 0 => 1.0,
        Score::Mate(_) => 0.0,
        Score::Wdl { w, d, l } => {
            let total = w + d + l;
            if total == 0 {
                return 0.5;
            }
            // Engines report per-mille; renormalize in case of rounding.
            ((w as f64 + 0.5 * d as f64) / total as f64).clamp(0.0, 1.0)
        }
    }
}

/// Upper bounds on ΔP for Excellent, Good, Inaccuracy and Mistake; anything
/// above the last is a Blunder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityThresholds {
    pub breakpoints: [f64; 4],
}

impl Default for QualityThresholds {
    fn default() -> Self {
        QualityThresholds {
            breakpoints: [0.02, 0.05, 0.10, 0.20],
        }
    }
}

impl QualityThresholds {
    pub fn new(breakpoints: [f64; 4]) -> Result<QualityThresholds, String> {
        let t = QualityThresholds { breakpoints };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), String> {
        let b = &self.breakpoints;
        if !b.iter().all(|x| x.is_finite() && (0.0..=1.0).contains(x)) {
            return Err(format!("breakpoints must lie in [0, 1]: {b:?}"));
        }
        if !b.windows(2).all(|w| w[0] < w[1]) {
            return Err(format!("breakpoints must be strictly increasing: {b:?}"));
        }
        Ok(())
    }

    pub fn classify(&self, delta: f64) -> MoveQuality {
        self.breakpoints
            .iter()
            .position(|&b| delta <= b)
            .map_or(MoveQuality::Blunder, |i| MoveQuality::ALL[i])
    }
}

/// ΔP = max(0, p_best − p_played) and its class.
pub fn classify_delta(p_best: f64, p_played: f64, thresholds: &QualityThresholds) -> (MoveQuality, f64) {
    let delta = (p_best - p_played).max(0.0);
    (thresholds.classify(delta), delta)
}
