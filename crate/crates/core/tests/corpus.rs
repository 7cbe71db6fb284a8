use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use chesstag_core::corpus::{
    annotate_corpus, assign_split, evaluate_extractor, filter_forum_post, load_triplets, macro_f1, read_triplets,
    scrub_pii, split_dataset, DropReason, ExtractorOutput, FilterConfig, ForumPost, Pattern, Split, SplitSpec,
    TripletLine, TripletRecord, EVENT_TOKENS,
};
use chesstag_core::representation::{Ablation, RepresentationConfig};
use chesstag_core::tags::{CommentaryType, Extractors, LengthTag, MoveQuality};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn keep(text: &str) -> (bool, Vec<Pattern>) {
    let d = filter_forum_post(&ForumPost::new(text), &FilterConfig::default());
    (d.keep, d.patterns)
}

#[test]
fn forum_pattern_fixtures() {
    let (k, p) = keep("around move 10 you lost a tempo");
    assert!(k && p.contains(&Pattern::MoveNumber));
    let (k, p) = keep("nice fianchetto");
    assert!(k && p.contains(&Pattern::EventToken));
    let d = filter_forum_post(
        &ForumPost::new("see https://lichess.org/abc for the pin"),
        &FilterConfig::default(),
    );
    assert!(!d.keep);
    assert_eq!(d.reason, Some(DropReason::ExternalLink));
    let (k, p) = keep("Thanks everyone, that was really helpful and kind.");
    assert!(!k && p.is_empty());
    let (k, p) = keep("21. Qxd4! was the point");
    assert!(k && p.contains(&Pattern::Notation));
    let (k, p) = keep("your bishop was doing nothing");
    assert!(k && p == [Pattern::PieceToken]);
}

#[test]
fn every_event_token_keeps() {
    assert_eq!(EVENT_TOKENS.len(), 17);
    for token in EVENT_TOKENS {
        for text in [format!("that {token} was nice"), format!("That {} Was Nice", token.to_uppercase())] {
            let (k, p) = keep(&text);
            assert!(k && p.contains(&Pattern::EventToken), "{text}");
        }
    }
}

#[test]
fn link_in_context_drops_thread() {
    let mut post = ForumPost::new("a fine gambit");
    post.context.push("analysis at www.example.com".into());
    assert!(!filter_forum_post(&post, &FilterConfig::default()).keep);
    let mut post = ForumPost::new("a fine gambit");
    post.metadata.tags.push("Chess-Engines".into());
    let config = FilterConfig {
        irrelevant_tags: vec!["chess-engines".into()],
    };
    assert!(matches!(filter_forum_post(&post, &config).reason, Some(DropReason::IrrelevantTag(_))));
}

#[test]
fn pii_fixtures() {
    assert_eq!(scrub_pii("email me at a@b.com"), "email me at [EMAIL]");
    assert_eq!(scrub_pii("u/somePlayer said"), "[USER] said");
    assert_eq!(scrub_pii("21. Qxd4!"), "21. Qxd4!");
    assert_eq!(scrub_pii("thanks @magnus_fan, see chess.com."), "thanks [USER], see [URL].");
}

proptest! {
    #[test]
    fn scrub_is_idempotent(s in "[ -~]{0,80}") {
        let once = scrub_pii(&s);
        prop_assert_eq!(scrub_pii(&once), once);
    }

    #[test]
    fn scrub_is_idempotent_on_pii_fragments(parts in prop::collection::vec(prop::sample::select(vec![
        "a@b.com", "www.x.org", "http://y.io/p?q=1", "u/ab_c", "/u/xy", "@ab", "[USER]", "[URL]", ".", ",", " ", "x", "Nf3", "(", ")", "@",
    ]), 0..12)) {
        let s: String = parts.concat();
        let once = scrub_pii(&s);
        prop_assert_eq!(scrub_pii(&once), once);
    }

    #[test]
    fn adding_a_pattern_never_drops(s in "[a-z ]{0,40}") {
        let before = keep(&s).0;
        for extra in [" gambit", " move 12", " knight", " Nf3"] {
            let after = keep(&format!("{s}{extra}")).0;
            prop_assert!(!before || after);
            prop_assert!(after);
        }
    }
}

fn synthetic_groups(records: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(records);
    let mut game = 0;
    while out.len() < records {
        let n = rng.random_range(1..=12).min(records - out.len());
        out.extend(std::iter::repeat_n(format!("game-{game}"), n));
        game += 1;
    }
    out
}

#[test]
fn split_10k_is_a_deterministic_partition() {
    let groups = synthetic_groups(10_000, 1);
    let spec = SplitSpec::new([85, 10, 5], 42).unwrap();
    let a = assign_split(&groups, &spec);
    assert_eq!(a, assign_split(&groups, &spec));
    assert_eq!(a.len(), groups.len());

    let mut per_group: BTreeMap<&str, BTreeSet<Split>> = BTreeMap::new();
    for (g, s) in groups.iter().zip(&a) {
        per_group.entry(g).or_default().insert(*s);
    }
    assert!(per_group.values().all(|s| s.len() == 1), "a game straddles splits");

    let count = |s: Split| a.iter().filter(|x| **x == s).count();
    let (valid, test) = (count(Split::Valid), count(Split::Test));
    assert!((500 - 12..=500).contains(&test), "test {test}");
    assert!((1000 - 12..=1000).contains(&valid), "valid {valid}");
    assert_eq!(count(Split::Train) + valid + test, 10_000);

    let records: Vec<(usize, String)> = groups.iter().cloned().enumerate().collect();
    let splits = split_dataset(&records, |r| r.1.clone(), &spec);
    let mut ids: Vec<usize> = [Split::Train, Split::Valid, Split::Test]
        .into_iter()
        .flat_map(|s| splits.get(s).iter().map(|r| r.0))
        .collect();
    ids.sort_unstable();
    assert_eq!(ids, (0..10_000).collect::<Vec<_>>());

    // Input order does not change the assignment.
    let mut shuffled: Vec<usize> = (0..groups.len()).collect();
    shuffled.reverse();
    let reordered: Vec<&String> = shuffled.iter().map(|&i| &groups[i]).collect();
    let b = assign_split(&reordered, &spec);
    for (j, &i) in shuffled.iter().enumerate() {
        assert_eq!(b[j], a[i]);
    }
    assert_ne!(a, assign_split(&groups, &SplitSpec::new([85, 10, 5], 43).unwrap()));
}

#[test]
fn single_record_games_hit_targets_exactly() {
    let groups: Vec<String> = (0..100).map(|i| format!("g{i}")).collect();
    let splits = split_dataset(&groups, |g| g.clone(), &SplitSpec::default());
    assert_eq!(splits.sizes(), (85, 10, 5));
    let groups: Vec<String> = (0..1800).map(|i| format!("g{i}")).collect();
    let spec: SplitSpec = "80:10:10".parse().unwrap();
    assert_eq!(split_dataset(&groups, |g| g.clone(), &spec).sizes(), (1440, 180, 180));
    assert!("80:10:20".parse::<SplitSpec>().is_err());
}

fn line(moves: &[&str], mv: &str, commentary: &str) -> String {
    serde_json::to_string(&TripletLine {
        moves: moves.iter().map(|s| s.to_string()).collect(),
        mv: mv.into(),
        commentary: commentary.into(),
        source: "g1".into(),
        fen: None,
    })
    .unwrap()
}

#[test]
fn triplet_loading() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "{}", line(&["e4", "c5"], "Nf3", "A normal developing move.")).unwrap();
    writeln!(f, "{}", line(&["e4", "e5"], "Ke3", "Bongcloud deluxe.")).unwrap();
    writeln!(f, "not json").unwrap();
    f.flush().unwrap();
    let lenient = load_triplets(f.path(), false).unwrap();
    assert_eq!(lenient.records.len(), 1);
    assert_eq!(lenient.rejected.iter().map(|r| r.0).collect::<Vec<_>>(), [2, 3]);
    assert!(load_triplets(f.path(), true).is_err());
    assert!(read_triplets(&b""[..], true).unwrap().records.is_empty());
}

#[test]
fn annotation_fixtures() {
    let text = [
        line(&["e4", "c5", "Nf3", "d6", "d4", "cxd4"], "Nxd4", "?? Better was Qxd4."),
        line(&["e4", "e5", "Nf3", "Nc6", "Bc4", "Nf6"], "O-O", "White castles."),
    ]
    .join("\n");
    let report = read_triplets(text.as_bytes(), true).unwrap();
    let configs = [RepresentationConfig::fully(), RepresentationConfig::new(Ablation::Unconditioned)];
    let extractors = Extractors::default();
    let out: Vec<_> = annotate_corpus(&report.records, &extractors, &configs).collect();
    assert_eq!(out.len(), 2);

    let blunder = &out[0];
    assert_eq!(blunder.tags.move_quality, Some(MoveQuality::Blunder));
    assert_eq!(blunder.tags.suggested.as_ref().unwrap()[0].moves, ["Qxd4"]);
    assert!(blunder.inputs["fully"].ends_with("[MOVE] Nxd4 [Commentary Type] Move Quality [Move Quality] Blunder [Suggested Move] Qxd4 [short]"));
    assert_eq!(blunder.inputs["unconditioned"], "[Unconditioned]");

    let castle = &out[1];
    assert_eq!(castle.tags.commentary_type, Some(CommentaryType::MoveDescription));
    assert_eq!(castle.tags.length, LengthTag::Short);
    assert_eq!(out[1].inputs["unconditioned"], "[Unconditioned]");

    let back: TripletRecord = TripletRecord::from_line(&castle.record).unwrap();
    assert_eq!(back.mv.san, "O-O");
}

fn out(ty: &str, q: &str) -> ExtractorOutput {
    ExtractorOutput {
        commentary_type: Some(ty.into()),
        move_quality: Some(q.into()),
        suggested: None,
    }
}

/// Per-class F1 from an explicit confusion matrix.
#[allow(clippy::needless_range_loop)]
fn f1_from_confusion(m: &[[u32; 3]; 3]) -> f64 {
    let mut sum = 0.0;
    for c in 0..3 {
        let tp = m[c][c] as f64;
        let fp: f64 = (0..3).filter(|&g| g != c).map(|g| m[g][c] as f64).sum();
        let fn_: f64 = (0..3).filter(|&p| p != c).map(|p| m[c][p] as f64).sum();
        let precision = tp / (tp + fp);
        let recall = tp / (tp + fn_);
        sum += 2.0 * precision * recall / (precision + recall);
    }
    sum / 3.0
}

#[test]
fn metric_fixtures() {
    let gold = vec![out("a", "good"), out("b", "none"), out("c", "blunder")];
    let m = evaluate_extractor(&gold, &gold).unwrap();
    assert_eq!((m.commentary_type_f1, m.move_quality_f1), (Some(1.0), Some(1.0)));

    let wrong = vec![out("b", "none"), out("c", "blunder"), out("a", "good")];
    assert_eq!(evaluate_extractor(&wrong, &gold).unwrap().commentary_type_f1, Some(0.0));

    // gold rows, predicted columns
    let confusion = [[3, 1, 0], [1, 2, 1], [0, 2, 2]];
    let (mut p, mut g) = (Vec::new(), Vec::new());
    for (gi, row) in confusion.iter().enumerate() {
        for (pi, &n) in row.iter().enumerate() {
            for _ in 0..n {
                g.push(gi);
                p.push(pi);
            }
        }
    }
    let got = macro_f1(&p, &g).unwrap();
    // (6/8 + 4/9 + 4/7) / 3, worked by hand
    let by_hand = (0.75 + 4.0 / 9.0 + 4.0 / 7.0) / 3.0;
    assert!((got - f1_from_confusion(&confusion)).abs() < 1e-12);
    assert!((got - by_hand).abs() < 1e-12);

    let sugg = |m: &[&str]| ExtractorOutput {
        suggested: Some(vec![m.iter().map(|s| s.to_string()).collect()]),
        ..Default::default()
    };
    let em = evaluate_extractor(&[sugg(&["Qxd4"]), sugg(&["e4"])], &[sugg(&["Qxd4"]), sugg(&["d4"])]).unwrap();
    assert_eq!(em.suggested_exact_match, Some(0.5));
    assert!(evaluate_extractor(&gold[..1], &gold).is_err());
}
