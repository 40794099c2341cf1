//! Derived training sets: entity-level normalization and de-normalization
//! through a [`Lexicon`], and seeded half/half mixing of two corpora.
//!
//! Perturbations only touch tokens inside replaced spans. Every other token
//! keeps its text and label, and each sentence keeps its span count.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Label, LabeledSentence, Token};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Colloquial span -> formal term.
    Normalize,
    /// Formal span -> colloquial description.
    Denormalize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replacement {
    pub sentence_index: usize,
    /// Token offset of the span in the input sentence.
    pub start: usize,
    pub old: String,
    pub new: String,
    pub variant_index: usize,
}

/// Audit trail of a perturbation run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PerturbLog {
    pub replacements: Vec<Replacement>,
    pub n_spans_seen: usize,
    pub n_spans_replaced: usize,
}

impl PerturbLog {
    /// CSV with columns `sentence_index,old,new,variant_index`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["sentence_index", "old", "new", "variant_index"])?;
        for r in &self.replacements {
            w.write_record([
                r.sentence_index.to_string(),
                r.old.clone(),
                r.new.clone(),
                r.variant_index.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv writer emits UTF-8"))
    }
}

pub fn normalize(corpus: &Corpus, lex: &Lexicon, seed: u64) -> Result<(Corpus, PerturbLog)> {
    perturb(corpus, lex, Direction::Normalize, seed)
}

pub fn denormalize(corpus: &Corpus, lex: &Lexicon, seed: u64) -> Result<(Corpus, PerturbLog)> {
    perturb(corpus, lex, Direction::Denormalize, seed)
}

/// Replaces every span whose whole surface is a lexicon key with one of its
/// variants. With several variants the choice depends only on
/// `(seed, sentence_index, span start)`, so sentences can be processed in
/// any order.
pub fn perturb(
    corpus: &Corpus,
    lex: &Lexicon,
    direction: Direction,
    seed: u64,
) -> Result<(Corpus, PerturbLog)> {
    let mut log = PerturbLog::default();
    let mut sentences = Vec::with_capacity(corpus.len());
    for (si, sentence) in corpus.sentences.iter().enumerate() {
        let spans = sentence.spans(si)?;
        log.n_spans_seen += spans.len();

        let mut tokens = Vec::with_capacity(sentence.len());
        let mut cursor = 0;
        for span in &spans {
            let original = &sentence.tokens[span.start..span.end];
            let texts: Vec<&str> = original.iter().map(|t| t.text.as_str()).collect();
            let variants = match direction {
                Direction::Normalize => lex.lookup_formal(&texts),
                Direction::Denormalize => lex.lookup_colloquial(&texts),
            };
            if variants.is_empty() {
                continue;
            }
            let variant_index = pick_variant(seed, si, span.start, variants.len());
            let mut replacement: Vec<String> = variants[variant_index].to_vec();
            if starts_uppercase(texts[0]) {
                replacement[0] = capitalize(&replacement[0]);
            }

            tokens.extend_from_slice(&sentence.tokens[cursor..span.start]);
            tokens.extend(replacement.iter().enumerate().map(|(k, text)| {
                let label = if k == 0 {
                    Label::B(span.category.clone())
                } else {
                    Label::I(span.category.clone())
                };
                Token::new(text.as_str(), label)
            }));
            cursor = span.end;

            log.replacements.push(Replacement {
                sentence_index: si,
                start: span.start,
                old: span.surface.clone(),
                new: replacement.join(" "),
                variant_index,
            });
        }
        tokens.extend_from_slice(&sentence.tokens[cursor..]);
        sentences.push(LabeledSentence {
            tokens,
            comments: sentence.comments.clone(),
        });
    }
    log.n_spans_replaced = log.replacements.len();
    Ok((Corpus::new(corpus.name.clone(), sentences), log))
}

fn pick_variant(seed: u64, sentence_index: usize, start: usize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(sentence_index as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(start as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key).gen_range(0..n)
}

fn starts_uppercase(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixSize {
    Exact(usize),
    /// `2 * floor((|a| + |b|) / 4)`: the even number nearest below the mean
    /// of the two source sizes.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixSpec {
    pub size: MixSize,
    pub seed: u64,
}

impl MixSpec {
    pub fn resolve(&self, a: usize, b: usize) -> Result<usize> {
        match self.size {
            MixSize::Exact(n) if n < 2 => Err(Error::Argument(format!(
                "mix size must be at least 2, got {n}"
            ))),
            MixSize::Exact(n) => Ok(n),
            MixSize::Auto => Ok(2 * ((a + b) / 4)),
        }
    }
}

/// Draws `floor(target / 2)` sentences from `a` and the rest from `b`
/// without replacement, tags each with its source corpus name and shuffles
/// the result.
pub fn mix(a: &Corpus, b: &Corpus, spec: &MixSpec) -> Result<Corpus> {
    if a.name.is_empty() || b.name.is_empty() || a.name == b.name {
        return Err(Error::Argument(format!(
            "mixed corpora need distinct non-empty names for provenance, got '{}' and '{}'",
            a.name, b.name
        )));
    }
    let target = spec.resolve(a.len(), b.len())?;
    let from_a = target / 2;
    let from_b = target - from_a;
    for (corpus, needed) in [(a, from_a), (b, from_b)] {
        if corpus.len() < needed {
            return Err(Error::Size {
                corpus: corpus.name.clone(),
                needed,
                available: corpus.len(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(target);
    for (corpus, amount) in [(a, from_a), (b, from_b)] {
        let mut picked = rand::seq::index::sample(&mut rng, corpus.len(), amount).into_vec();
        picked.sort_unstable();
        for i in picked {
            let mut sentence = corpus.sentences[i].clone();
            sentence.set_source(&corpus.name);
            out.push(sentence);
        }
    }
    out.shuffle(&mut rng);
    Ok(Corpus::new(format!("{}+{}", a.name, b.name), out))
}
