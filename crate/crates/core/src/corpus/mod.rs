//! IOB-tagged corpora: data types, the tab-separated file format, label
//! validation and repair, span extraction, statistics and synthetic fixtures.
//!
//! A sentence is a non-empty run of `token<TAB>label` lines. Labels follow the
//! IOB scheme: `B-<category>` opens an entity, `I-<category>` continues it and
//! `O` marks tokens outside any entity. A sentence is VALID when every `I`
//! label directly follows a `B` or `I` of the same category.

mod format;
mod stats;
mod synth;
mod tokenize;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use format::{parse_corpus, read_corpus, serialize_corpus, write_corpus};
pub use stats::{corpus_stats, StatsRow};
pub use synth::{synth_corpus, SynthConfig};
pub use tokenize::tokenize_raw;

/// Category used when none is given. The corpora this toolkit was built for
/// tag a single entity type, symptoms.
pub const DEFAULT_CATEGORY: &str = "SYM";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    O,
    B(String),
    I(String),
}

impl Label {
    pub fn begin(category: impl Into<String>) -> Self {
        Label::B(category.into())
    }

    pub fn inside(category: impl Into<String>) -> Self {
        Label::I(category.into())
    }

    pub fn category(&self) -> Option<&str> {
        match self {
            Label::O => None,
            Label::B(c) | Label::I(c) => Some(c),
        }
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, Label::O)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::O => f.write_str("O"),
            Label::B(c) => write!(f, "B-{c}"),
            Label::I(c) => write!(f, "I-{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseLabelError(pub String);

impl fmt::Display for ParseLabelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown label '{}' (expected O, B-<category> or I-<category>)", self.0)
    }
}

impl std::error::Error for ParseLabelError {}

impl FromStr for Label {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "O" {
            return Ok(Label::O);
        }
        let category_ok = |c: &str| !c.is_empty() && !c.chars().any(char::is_whitespace);
        match s.split_once('-') {
            Some(("B", c)) if category_ok(c) => Ok(Label::B(c.to_string())),
            Some(("I", c)) if category_ok(c) => Ok(Label::I(c.to_string())),
            _ => Err(ParseLabelError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub label: Label,
}

impl Token {
    pub fn new(text: impl Into<String>, label: Label) -> Self {
        Self {
            text: text.into(),
            label,
        }
    }
}

/// Token text must be non-empty and free of whitespace so that it survives
/// the line-oriented file format.
pub fn is_valid_token_text(text: &str) -> bool {
    !text.is_empty() && !text.chars().any(char::is_whitespace)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabeledSentence {
    pub tokens: Vec<Token>,
    /// Comment lines preceding the sentence, without the leading `"# "`.
    /// `key: value` comments are metadata; `source` carries provenance.
    pub comments: Vec<String>,
}

impl LabeledSentence {
    pub fn new(tokens: Vec<Token>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::Argument("a sentence needs at least one token".into()));
        }
        if let Some(bad) = tokens.iter().find(|t| !is_valid_token_text(&t.text)) {
            return Err(Error::Argument(format!(
                "token text {:?} is empty or contains whitespace",
                bad.text
            )));
        }
        Ok(Self {
            tokens,
            comments: Vec::new(),
        })
    }

    /// Builds a sentence from parallel text and label slices.
    pub fn from_parts<S: AsRef<str>>(texts: &[S], labels: &[Label]) -> Result<Self> {
        if texts.len() != labels.len() {
            return Err(Error::Argument(format!(
                "{} tokens but {} labels",
                texts.len(),
                labels.len()
            )));
        }
        Self::new(
            texts
                .iter()
                .zip(labels)
                .map(|(t, l)| Token::new(t.as_ref(), l.clone()))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.text.as_str())
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.tokens.iter().map(|t| &t.label)
    }

    /// Value of the first `key: value` comment with the given key.
    pub fn metadata(&self, key: &str) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let (k, v) = c.split_once(':')?;
            (k.trim() == key).then(|| v.trim())
        })
    }

    pub fn source(&self) -> Option<&str> {
        self.metadata("source")
    }

    /// Sets (or replaces) the `source` metadata comment.
    pub fn set_source(&mut self, source: &str) {
        let line = format!("source: {source}");
        match self
            .comments
            .iter_mut()
            .find(|c| c.split_once(':').is_some_and(|(k, _)| k.trim() == "source"))
        {
            Some(existing) => *existing = line,
            None => self.comments.insert(0, line),
        }
    }

    /// Maximal `B I*` runs of one category, left to right.
    ///
    /// Fails with [`Error::InvalidSentence`] on the first `I` that does not
    /// continue a span of its own category.
    pub fn spans(&self, sentence_index: usize) -> Result<Vec<EntitySpan>> {
        let mut spans = Vec::new();
        let mut open: Option<(usize, &str)> = None;
        let close = |spans: &mut Vec<EntitySpan>, start: usize, end: usize, cat: &str| {
            spans.push(EntitySpan::from_sentence(self, sentence_index, start, end, cat));
        };
        for (i, token) in self.tokens.iter().enumerate() {
            match &token.label {
                Label::O => {
                    if let Some((start, cat)) = open.take() {
                        close(&mut spans, start, i, cat);
                    }
                }
                Label::B(cat) => {
                    if let Some((start, prev)) = open.take() {
                        close(&mut spans, start, i, prev);
                    }
                    open = Some((i, cat));
                }
                Label::I(cat) => match open {
                    Some((_, prev)) if prev == cat => {}
                    _ => {
                        return Err(Error::InvalidSentence {
                            sentence: sentence_index,
                            token: i,
                        })
                    }
                },
            }
        }
        if let Some((start, cat)) = open {
            close(&mut spans, start, self.tokens.len(), cat);
        }
        Ok(spans)
    }

    pub fn is_valid(&self) -> bool {
        sentence_violations(0, self).is_empty()
    }
}

/// Label sequence of length `len` that tags exactly the given spans
/// (`B` on the first token, `I` on the rest, `O` elsewhere).
pub fn labels_from_spans(len: usize, spans: &[EntitySpan]) -> Vec<Label> {
    let mut labels = vec![Label::O; len];
    for span in spans {
        labels[span.start] = Label::B(span.category.clone());
        for label in &mut labels[span.start + 1..span.end] {
            *label = Label::I(span.category.clone());
        }
    }
    labels
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub name: String,
    pub sentences: Vec<LabeledSentence>,
}

impl Corpus {
    pub fn new(name: impl Into<String>, sentences: Vec<LabeledSentence>) -> Self {
        Self {
            name: name.into(),
            sentences,
        }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Spans of every sentence, in sentence order.
    pub fn spans(&self) -> Result<Vec<EntitySpan>> {
        let mut all = Vec::new();
        for (i, s) in self.sentences.iter().enumerate() {
            all.extend(s.spans(i)?);
        }
        Ok(all)
    }

    pub fn is_valid(&self) -> bool {
        validate(self).is_empty()
    }
}

/// A contiguous labeled term inside one sentence. `end` is exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntitySpan {
    pub sentence_index: usize,
    pub start: usize,
    pub end: usize,
    pub category: String,
    pub surface: String,
}

impl EntitySpan {
    fn from_sentence(
        sentence: &LabeledSentence,
        sentence_index: usize,
        start: usize,
        end: usize,
        category: &str,
    ) -> Self {
        let surface = sentence.tokens[start..end]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        Self {
            sentence_index,
            start,
            end,
            category: category.to_string(),
            surface,
        }
    }

    /// Length in tokens.
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Number of tokens shared with `other`; zero across sentences.
    pub fn overlap(&self, other: &EntitySpan) -> usize {
        if self.sentence_index != other.sentence_index {
            return 0;
        }
        self.end.min(other.end).saturating_sub(self.start.max(other.start))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `I` at sentence start or after `O`.
    OrphanInside,
    /// `I` after a `B`/`I` of a different category.
    CategoryMismatch,
}

impl Rule {
    pub fn id(&self) -> &'static str {
        match self {
            Rule::OrphanInside => "orphan-inside",
            Rule::CategoryMismatch => "category-mismatch",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub sentence: usize,
    pub token: usize,
    pub rule: Rule,
}

fn sentence_violations(sentence_index: usize, sentence: &LabeledSentence) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut prev: Option<&Label> = None;
    for (i, token) in sentence.tokens.iter().enumerate() {
        if let Label::I(cat) = &token.label {
            let rule = match prev {
                None | Some(Label::O) => Some(Rule::OrphanInside),
                Some(Label::B(p) | Label::I(p)) if p != cat => Some(Rule::CategoryMismatch),
                _ => None,
            };
            if let Some(rule) = rule {
                out.push(Violation {
                    sentence: sentence_index,
                    token: i,
                    rule,
                });
            }
        }
        prev = Some(&token.label);
    }
    out
}

/// Every IOB violation in the corpus; empty iff the corpus is VALID.
pub fn validate(corpus: &Corpus) -> Vec<Violation> {
    corpus
        .sentences
        .iter()
        .enumerate()
        .flat_map(|(i, s)| sentence_violations(i, s))
        .collect()
}

/// Rewrites every invalid `I-x` to `B-x`, the conlleval convention. VALID
/// sentences pass through untouched.
pub fn repair_labels(corpus: &Corpus) -> Corpus {
    let mut out = corpus.clone();
    for sentence in &mut out.sentences {
        repair_sentence(sentence);
    }
    out
}

/// In-place variant of [`repair_labels`] for one sentence. Returns the number
/// of labels changed.
pub fn repair_sentence(sentence: &mut LabeledSentence) -> usize {
    let mut changed = 0;
    for i in 0..sentence.tokens.len() {
        let keep = match &sentence.tokens[i].label {
            Label::I(cat) => match i.checked_sub(1).map(|p| &sentence.tokens[p].label) {
                Some(Label::B(p) | Label::I(p)) => p == cat,
                _ => false,
            },
            _ => true,
        };
        if !keep {
            let cat = sentence.tokens[i].label.category().unwrap_or_default().to_string();
            sentence.tokens[i].label = Label::B(cat);
            changed += 1;
        }
    }
    changed
}
