use std::collections::HashSet;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Commentary;
use crate::text;

/// Closed class of personal pronouns tagged as entities. "it" is left out
/// since commentary uses it for pieces and moves.
pub const PRONOUNS: &[&str] = &[
    "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "he", "him", "his", "himself", "she",
    "her", "hers", "herself", "we", "us", "our", "ours", "ourselves", "they", "them", "their", "theirs",
    "themselves",
];

/// Capitalized words that are chess vocabulary, not names.
const CHESS_TERMS: &[&str] = &[
    "white", "black", "king", "queen", "rook", "bishop", "knight", "pawn", "kings", "queens", "rooks", "bishops",
    "knights", "pawns", "check", "checkmate", "mate", "gm", "im", "fm", "cm", "wgm", "elo", "fide", "eco", "pgn",
    "fen", "san", "uci",
];

/// Sentence-initial function words never taken as names.
const STOPWORDS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "after", "before", "now", "then", "here", "there", "if",
    "and", "but", "or", "so", "as", "in", "on", "at", "of", "for", "with", "it", "its", "what", "why", "how",
    "when", "which", "who", "not", "no", "yes", "also", "still", "perhaps", "maybe", "to", "all",
];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entities {
    pub pronouns: Vec<String>,
    pub proper_nouns: Vec<String>,
}

/// Phrases (opening names and the like) that are capitalized but must not
/// be tagged as proper nouns. Matched case-insensitively on whole words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllowList {
    phrases: Vec<Vec<String>>,
    singles: HashSet<String>,
}

const DEFAULT_ALLOW_LIST: &str = include_str!("../../data/proper_noun_allow_list.txt");

impl Default for AllowList {
    fn default() -> Self {
        AllowList::parse(DEFAULT_ALLOW_LIST)
    }
}

fn normalize(word: &str) -> String {
    let lower = word.to_lowercase();
    let lower = lower.strip_suffix("'s").or(lower.strip_suffix("’s")).unwrap_or(&lower).to_string();
    lower.replace('’', "'")
}

impl AllowList {
    /// One term per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> AllowList {
        let mut list = AllowList {
            phrases: Vec::new(),
            singles: HashSet::new(),
        };
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            list.insert(line);
        }
        list
    }

    pub fn load(path: &Path) -> io::Result<AllowList> {
        Ok(AllowList::parse(&std::fs::read_to_string(path)?))
    }

    pub fn empty() -> AllowList {
        AllowList::parse("")
    }

    pub fn insert(&mut self, term: &str) {
        let words: Vec<String> = term.split_whitespace().map(normalize).collect();
        match words.len() {
            0 => {}
            1 => {
                self.singles.insert(words[0].clone());
            }
            _ => self.phrases.push(words),
        }
    }

    pub fn len(&self) -> usize {
        self.phrases.len() + self.singles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, term: &str) -> bool {
        let words: Vec<String> = term.split_whitespace().map(normalize).collect();
        match words.len() {
            0 => false,
            1 => self.singles.contains(&words[0]),
            _ => self.phrases.contains(&words),
        }
    }

    /// Marks the tokens covered by a listed phrase or word.
    fn covered(&self, words: &[String]) -> Vec<bool> {
        let mut covered: Vec<bool> = words.iter().map(|w| self.singles.contains(w)).collect();
        for phrase in &self.phrases {
            if phrase.len() > words.len() {
                continue;
            }
            for start in 0..=words.len() - phrase.len() {
                if words[start..start + phrase.len()] == phrase[..] {
                    covered[start..start + phrase.len()].iter_mut().for_each(|c| *c = true);
                }
            }
        }
        covered
    }
}

fn is_capitalized(word: &str) -> bool {
    word.chars().next().is_some_and(char::is_uppercase)
}

/// Pronouns from the closed class and proper nouns from capitalization.
/// A capitalized word counts mid-sentence; at the start of a sentence only
/// when possessive or followed by another name word. Consecutive name words
/// merge into one mention. Allow-listed phrases, chess terms, SAN and
/// pronouns are never names.
pub fn extract_entities(commentary: &Commentary, allow: &AllowList) -> Entities {
    let toks = text::tokens(&commentary.text);
    let words: Vec<String> = toks.iter().map(|t| normalize(t.core)).collect();
    let covered = allow.covered(&words);

    let mut pronouns = Vec::new();
    let mut candidate = vec![false; toks.len()];
    let mut sentence_start = vec![false; toks.len()];
    let mut at_start = true;
    for (i, tok) in toks.iter().enumerate() {
        sentence_start[i] = at_start;
        let raw_end = commentary.text[tok.span.end..].chars().next();
        at_start = tok.ends_clause && matches!(raw_end, Some('.') | Some('!') | Some('?'))
            || tok.core.ends_with(['!', '?']) && !text::looks_like_san(tok.core);

        let lower = tok.core.to_lowercase();
        if PRONOUNS.contains(&lower.as_str()) {
            if !pronouns.contains(&tok.core.to_string()) {
                pronouns.push(tok.core.to_string());
            }
            continue;
        }
        let bare = tok.core.trim_end_matches(['!', '?']);
        candidate[i] = is_capitalized(bare)
            && bare.chars().any(char::is_lowercase)
            && !covered[i]
            && !CHESS_TERMS.contains(&words[i].as_str())
            && !text::looks_like_san(bare)
            && !(sentence_start[i] && STOPWORDS.contains(&words[i].as_str()));
    }

    let mut proper_nouns: Vec<String> = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        if !candidate[i] {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < toks.len() && candidate[j] && !sentence_start[j] && !toks[j - 1].ends_clause {
            j += 1;
        }
        let possessive = toks[j - 1].core.ends_with("'s") || toks[j - 1].core.ends_with("’s");
        if !sentence_start[i] || possessive || j - i > 1 {
            let span = toks[i].span.start..toks[j - 1].span.end;
            let mention = commentary.text[span].trim_end_matches(['!', '?']).to_string();
            if !proper_nouns.contains(&mention) {
                proper_nouns.push(mention);
            }
        }
        i = j;
    }

    Entities {
        pronouns,
        proper_nouns,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ents(text: &str) -> Entities {
        extract_entities(&Commentary::new(text), &AllowList::default())
    }

    #[test]
    fn fixtures() {
        assert_eq!(ents("Carlsen's favorite line.").proper_nouns, ["Carlsen's"]);
        assert!(ents("The Ruy Lopez appears.").proper_nouns.is_empty());
        assert_eq!(ents("White captures."), Entities::default());
    }

    #[test]
    fn pronouns_keep_surface_form() {
        let e = ents("Her rook is strong, and I like his plan.");
        assert_eq!(e.pronouns, ["Her", "I", "his"]);
        assert!(e.proper_nouns.is_empty());
    }

    #[test]
    fn names_mid_sentence_merge() {
        let e = ents("This was played by Magnus Carlsen against Hikaru in 2019.");
        assert_eq!(e.proper_nouns, ["Magnus Carlsen", "Hikaru"]);
    }

    #[test]
    fn sentence_initial_words_need_evidence() {
        assert!(ents("Developing the knight. Castling next.").proper_nouns.is_empty());
        assert_eq!(ents("Kasparov Garry would approve.").proper_nouns, ["Kasparov Garry"]);
    }

    #[test]
    fn chess_words_are_not_names() {
        let e = ents("After Nf3 the Knight and Bishop of White coordinate in the Sicilian Najdorf.");
        assert!(e.proper_nouns.is_empty(), "{:?}", e.proper_nouns);
    }

    #[test]
    fn allow_list_file_format() {
        let list = AllowList::parse("# openings\nRuy Lopez\n\nGiuoco Piano\nCatalan\n");
        assert_eq!(list.len(), 3);
        assert!(list.contains("ruy lopez"));
        assert!(list.contains("Catalan"));
        assert!(!list.contains("Lopez"));
        let e = extract_entities(&Commentary::new("We reach a Giuoco Piano with Anand."), &list);
        assert_eq!(e.proper_nouns, ["Anand"]);
        assert_eq!(e.pronouns, ["We"]);
    }

    #[test]
    fn default_list_is_seeded() {
        let list = AllowList::default();
        assert!(list.len() > 100);
        for name in ["Ruy Lopez", "Sicilian Defense", "Queen's Gambit", "Caro-Kann", "Nimzo-Indian"] {
            assert!(list.contains(name), "{name}");
        }
    }
}
