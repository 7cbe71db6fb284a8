use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{TripletLine, TripletRecord};
use crate::representation::{build_input, RepresentationConfig};
use crate::tags::{Extractors, TagSet, Warning};

/// A triplet with its tags and one generator input per ablation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedRecord {
    #[serde(flatten)]
    pub record: TripletLine,
    pub tags: TagSet,
    /// Ablation name to input text.
    pub inputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Warning>,
}

pub fn annotate_record(record: &TripletRecord, extractors: &Extractors, configs: &[RepresentationConfig]) -> AnnotatedRecord {
    let anchor = record.anchor();
    let annotated = extractors.annotate(&record.commentary, &anchor);
    let mut inputs = BTreeMap::new();
    for config in configs {
        let input = build_input(&record.game, &anchor, &record.mv, &annotated.tags, config)
            .expect("anchor is the replayed game");
        inputs.insert(config.ablation.name().to_string(), input.text);
    }
    AnnotatedRecord {
        record: record.to_line(),
        tags: annotated.tags,
        inputs,
        warnings: annotated.warnings,
    }
}

/// Annotates every record; output order and count match the input.
pub fn annotate_corpus<'a>(
    records: impl IntoIterator<Item = &'a TripletRecord> + 'a,
    extractors: &'a Extractors,
    configs: &'a [RepresentationConfig],
) -> impl Iterator<Item = AnnotatedRecord> + 'a {
    records.into_iter().map(move |r| annotate_record(r, extractors, configs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::read_triplets;
    use crate::representation::Ablation;
    use crate::tags::{CommentaryType, LengthTag, MoveQuality};

    fn record(moves: &[&str], mv: &str, commentary: &str) -> TripletRecord {
        let line = TripletLine {
            moves: moves.iter().map(|s| s.to_string()).collect(),
            mv: mv.into(),
            commentary: commentary.into(),
            source: "t".into(),
            fen: None,
        };
        TripletRecord::from_line(&line).unwrap()
    }

    #[test]
    fn blunder_with_suggestion() {
        let r = record(&["e4", "c5", "Nf3", "g6", "d4", "cxd4"], "c3", "?? Better was Qxd4.");
        let configs = [RepresentationConfig::fully(), RepresentationConfig::new(Ablation::Unconditioned)];
        let a = annotate_record(&r, &Extractors::default(), &configs);
        assert_eq!(a.tags.move_quality, Some(MoveQuality::Blunder));
        assert_eq!(a.tags.suggested.as_ref().unwrap()[0].moves, ["Qxd4"]);
        assert!(a.inputs["fully"].ends_with("[MOVE] c3 [Commentary Type] Move Quality [Move Quality] Blunder [Suggested Move] Qxd4 [short]"));
        assert_eq!(a.inputs["unconditioned"], "[Unconditioned]");
    }

    #[test]
    fn castles() {
        let r = record(&["e4", "e5", "Nf3", "Nc6", "Bc4", "Bc5"], "O-O", "White castles.");
        let a = annotate_record(&r, &Extractors::default(), &[]);
        assert_eq!(a.tags.commentary_type, Some(CommentaryType::MoveDescription));
        assert_eq!(a.tags.length, LengthTag::Short);
        assert_eq!(a.tags.move_quality, None);
    }

    #[test]
    fn count_preserved_and_json_shape() {
        let text = r#"{"moves": [], "move": "e4", "commentary": "Better was Ke9.", "source": "a"}
{"moves": ["e4"], "move": "e5", "commentary": "", "source": "b"}"#;
        let records = read_triplets(text.as_bytes(), true).unwrap().records;
        let configs = [RepresentationConfig::fully()];
        let extractors = Extractors::default();
        let out: Vec<_> = annotate_corpus(&records, &extractors, &configs).collect();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].warnings.len(), 1);
        let json = serde_json::to_value(&out[1]).unwrap();
        assert_eq!(json["move"], "e5");
        assert_eq!(json["source"], "b");
        assert_eq!(json["tags"]["length"], "short");
        let back: AnnotatedRecord = serde_json::from_value(json).unwrap();
        assert_eq!(back, out[1]);
    }
}
