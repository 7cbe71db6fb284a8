use chesstag_chess::BoardState;

use super::{Commentary, SuggestedLine, Warning};
use crate::text;

/// Finds runs of SAN tokens and keeps those that replay legally from
/// `anchor`, alternating sides. Runs that fail are dropped with a warning.
pub fn extract_suggested_moves(commentary: &Commentary, anchor: &BoardState) -> (Option<Vec<SuggestedLine>>, Vec<Warning>) {
    let mut lines = Vec::new();
    let mut warnings = Vec::new();
    for run in text::san_runs(&commentary.text) {
        let sans: Vec<&str> = run.iter().map(|m| m.text.as_str()).collect();
        match SuggestedLine::new(anchor.clone(), &sans) {
            Ok(line) => {
                if !lines.contains(&line) {
                    lines.push(line);
                }
            }
            Err(e) => warnings.push(Warning::new(
                "suggested_move",
                format!("dropped {:?} at byte {}: {e}", sans.join(" "), run[0].span.start),
            )),
        }
    }
    ((!lines.is_empty()).then_some(lines), warnings)
}
