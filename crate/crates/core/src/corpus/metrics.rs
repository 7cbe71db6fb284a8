use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Extractor output for one example, as stored in prediction and gold
/// files. Absent fields are not scored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractorOutput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commentary_type: Option<String>,
    /// `"none"` or null for no quality cue.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub move_quality: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggested: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub examples: usize,
    pub commentary_type_f1: Option<f64>,
    pub move_quality_f1: Option<f64>,
    pub suggested_exact_match: Option<f64>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("{predictions} predictions for {gold} gold examples")]
    LengthMismatch { predictions: usize, gold: usize },
}

/// Unweighted mean of per-class F1 over every class seen in either list.
pub fn macro_f1<L: Ord + Clone>(predictions: &[L], gold: &[L]) -> Result<f64, MetricsError> {
    if predictions.len() != gold.len() {
        return Err(MetricsError::LengthMismatch {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    let classes: BTreeSet<&L> = predictions.iter().chain(gold).collect();
    if classes.is_empty() {
        return Ok(1.0);
    }
    let mut sum = 0.0;
    for c in &classes {
        let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
        for (p, g) in predictions.iter().zip(gold) {
            match (p == *c, g == *c) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                _ => {}
            }
        }
        let denom = 2 * tp + fp + fn_;
        sum += if denom == 0 { 0.0 } else { 2.0 * tp as f64 / denom as f64 };
    }
    Ok(sum / classes.len() as f64)
}

fn label(s: &Option<String>) -> String {
    s.as_deref().map(str::trim).filter(|l| !l.is_empty()).unwrap_or("none").to_ascii_lowercase()
}

fn move_tokens(lines: &Option<Vec<Vec<String>>>) -> Vec<&str> {
    lines.iter().flatten().flatten().map(String::as_str).collect()
}

/// Macro F1 for type and quality, exact token match for suggestions. A
/// field is scored over the examples whose gold value is present.
pub fn evaluate_extractor(predictions: &[ExtractorOutput], gold: &[ExtractorOutput]) -> Result<Metrics, MetricsError> {
    if predictions.len() != gold.len() {
        return Err(MetricsError::LengthMismatch {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    let pairs: Vec<(&ExtractorOutput, &ExtractorOutput)> = predictions.iter().zip(gold).collect();

    let type_pairs: Vec<_> = pairs.iter().filter(|(_, g)| g.commentary_type.is_some()).collect();
    let commentary_type_f1 = (!type_pairs.is_empty())
        .then(|| {
            let p: Vec<String> = type_pairs.iter().map(|(p, _)| label(&p.commentary_type)).collect();
            let g: Vec<String> = type_pairs.iter().map(|(_, g)| label(&g.commentary_type)).collect();
            macro_f1(&p, &g)
        })
        .transpose()?;

    // Gold quality may legitimately be "none", so every example counts.
    let p: Vec<String> = pairs.iter().map(|(p, _)| label(&p.move_quality)).collect();
    let g: Vec<String> = pairs.iter().map(|(_, g)| label(&g.move_quality)).collect();
    let any_quality = pairs.iter().any(|(p, g)| p.move_quality.is_some() || g.move_quality.is_some());
    let move_quality_f1 = any_quality.then(|| macro_f1(&p, &g)).transpose()?;

    let sugg: Vec<_> = pairs.iter().filter(|(_, g)| g.suggested.is_some()).collect();
    let suggested_exact_match = (!sugg.is_empty()).then(|| {
        let hits = sugg
            .iter()
            .filter(|(p, g)| move_tokens(&p.suggested) == move_tokens(&g.suggested))
            .count();
        hits as f64 / sugg.len() as f64
    });

    Ok(Metrics {
        examples: pairs.len(),
        commentary_type_f1,
        move_quality_f1,
        suggested_exact_match,
    })
}
