//! Bidirectional mapping between formal terms and colloquial variants.
//!
//! The file format is a UTF-8 TSV with one mapping per line,
//! `formal<TAB>colloquial[<TAB>pos]`. Terms are space-separated token
//! sequences; lines starting with `#` are comments.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub formal: Vec<String>,
    pub colloquial: Vec<String>,
    /// Carried for reference; lookups do not filter on it.
    pub pos_hint: Option<String>,
}

impl LexiconEntry {
    pub fn new(formal: &str, colloquial: &str) -> Self {
        Self {
            formal: split_term(formal),
            colloquial: split_term(colloquial),
            pos_hint: None,
        }
    }
}

fn split_term(term: &str) -> Vec<String> {
    term.split_whitespace().map(str::to_string).collect()
}

/// Lower-cased, space-joined matching key.
fn key<S: AsRef<str>>(tokens: &[S]) -> String {
    tokens
        .iter()
        .map(|t| t.as_ref().to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    by_formal: HashMap<String, Vec<usize>>,
    by_colloquial: HashMap<String, Vec<usize>>,
    duplicates: usize,
}

impl Lexicon {
    pub fn from_entries(entries: impl IntoIterator<Item = LexiconEntry>) -> Result<Self> {
        let mut lex = Lexicon::default();
        let mut seen = HashSet::new();
        for entry in entries {
            if entry.formal.is_empty() || entry.colloquial.is_empty() {
                return Err(Error::Argument("lexicon terms must be non-empty".into()));
            }
            lex.push(entry, &mut seen);
        }
        Ok(lex)
    }

    fn push(&mut self, entry: LexiconEntry, seen: &mut HashSet<(String, String)>) {
        let formal = key(&entry.formal);
        let colloquial = key(&entry.colloquial);
        if !seen.insert((formal.clone(), colloquial.clone())) {
            self.duplicates += 1;
            return;
        }
        let idx = self.entries.len();
        self.by_formal.entry(formal).or_default().push(idx);
        self.by_colloquial.entry(colloquial).or_default().push(idx);
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of duplicate (formal, colloquial) rows dropped while loading.
    pub fn duplicates_collapsed(&self) -> usize {
        self.duplicates
    }

    /// Formal variants of a colloquial term, in file order. Matching is
    /// case-insensitive on the whole token sequence.
    pub fn lookup_formal<S: AsRef<str>>(&self, term: &[S]) -> Vec<&[String]> {
        self.by_colloquial
            .get(&key(term))
            .map(|ids| ids.iter().map(|&i| self.entries[i].formal.as_slice()).collect())
            .unwrap_or_default()
    }

    /// Colloquial variants of a formal term, in file order.
    pub fn lookup_colloquial<S: AsRef<str>>(&self, term: &[S]) -> Vec<&[String]> {
        self.by_formal
            .get(&key(term))
            .map(|ids| {
                ids.iter()
                    .map(|&i| self.entries[i].colloquial.as_slice())
                    .collect()
            })
            .unwrap_or_default()
    }
}

pub fn load_lexicon(text: &str) -> Result<Lexicon> {
    let mut lex = Lexicon::default();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let parse_err = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(format!(
                "expected 2 or 3 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let entry = LexiconEntry {
            formal: split_term(fields[0]),
            colloquial: split_term(fields[1]),
            pos_hint: fields
                .get(2)
                .map(|p| p.trim())
                .filter(|p| !p.is_empty())
                .map(str::to_string),
        };
        if entry.formal.is_empty() || entry.colloquial.is_empty() {
            return Err(parse_err("empty term".into()));
        }
        lex.push(entry, &mut seen);
    }
    if lex.duplicates > 0 {
        warn!("collapsed {} duplicate lexicon rows", lex.duplicates);
    }
    Ok(lex)
}

pub fn read_lexicon(path: impl AsRef<Path>) -> Result<Lexicon> {
    load_lexicon(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiword_colloquial_side() {
        let lex = load_lexicon("dyspnea\tdifficulty of breathing\n").unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.entries()[0].formal.len(), 1);
        assert_eq!(lex.entries()[0].colloquial.len(), 3);
        assert_eq!(
            lex.lookup_colloquial(&["dyspnea"]),
            vec![["difficulty", "of", "breathing"].map(String::from).as_slice()]
        );
        assert!(lex.lookup_colloquial(&["fever"]).is_empty());
    }

    #[test]
    fn empty_file() {
        assert!(load_lexicon("").unwrap().is_empty());
        assert!(load_lexicon("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn variants_in_file_order() {
        let lex = load_lexicon("vomit\tthrow up\nvomit\tthrowing up\nvomit\tbe sick\tVERB\n").unwrap();
        let variants: Vec<String> = lex
            .lookup_colloquial(&["vomit"])
            .iter()
            .map(|v| v.join(" "))
            .collect();
        assert_eq!(variants, ["throw up", "throwing up", "be sick"]);
        assert_eq!(lex.entries()[2].pos_hint.as_deref(), Some("VERB"));
    }

    #[test]
    fn lookup_formal_is_case_insensitive() {
        let lex = load_lexicon("vomit\tthrow up\n").unwrap();
        let vomit = ["vomit".to_string()];
        let expected = vec![vomit.as_slice()];
        assert_eq!(lex.lookup_formal(&["throw", "up"]), expected);
        assert_eq!(lex.lookup_formal(&["THROW", "UP"]), expected);
        assert!(lex.lookup_formal(&["throw"]).is_empty());
    }

    #[test]
    fn duplicates_collapse() {
        let lex = load_lexicon("vomit\tthrow up\nVomit\tthrow UP\n").unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.duplicates_collapsed(), 1);
    }

    #[test]
    fn short_row_is_an_error() {
        let err = load_lexicon("fever\tpyrexia\nbroken row\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
