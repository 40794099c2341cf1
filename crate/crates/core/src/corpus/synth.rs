//! Seeded synthetic corpora for fixtures and smoke tests.

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::{is_valid_token_text, Corpus, Label, LabeledSentence, Token, DEFAULT_CATEGORY};
use crate::error::{Error, Result};

const CONTEXT_WORDS: &[&str] = &[
    "i", "have", "had", "been", "my", "the", "a", "and", "then", "since", "today", "yesterday",
    "still", "feel", "really", "bad", "for", "days", "after", "some", "with", "now", "it", "is",
    "was", "started", "week", ",", ".",
];

const ENTITY_WORDS: &[&str] = &[
    "fever", "cough", "headache", "fatigue", "chills", "nausea", "dizziness", "dyspnea", "sore",
    "throat", "chest", "pain", "loss", "of", "smell", "taste", "runny", "nose", "aches", "tight",
];

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_sentences: usize,
    /// Target fraction of sentences holding at least one span.
    pub entity_rate: f64,
    /// Relative weight of span length `i + 1` at index `i`.
    pub length_weights: Vec<f64>,
    /// Pool for context (`O`) tokens.
    pub vocab: Vec<String>,
    /// Pool for span tokens; falls back to `vocab` when empty.
    pub entity_vocab: Vec<String>,
    pub category: String,
    pub max_spans_per_sentence: usize,
    /// Inclusive range of context tokens per sentence.
    pub context_len: (usize, usize),
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_sentences: 100,
            entity_rate: 0.33,
            length_weights: vec![0.5, 0.25, 0.15, 0.1],
            vocab: CONTEXT_WORDS.iter().map(|s| s.to_string()).collect(),
            entity_vocab: ENTITY_WORDS.iter().map(|s| s.to_string()).collect(),
            category: DEFAULT_CATEGORY.to_string(),
            max_spans_per_sentence: 2,
            context_len: (3, 12),
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(0.0..=1.0).contains(&self.entity_rate) {
            return bad("entity_rate must lie in [0, 1]");
        }
        if self.length_weights.iter().any(|w| !w.is_finite() || *w < 0.0)
            || self.length_weights.iter().all(|w| *w == 0.0)
        {
            return bad("length_weights must be non-negative and not all zero");
        }
        if self.vocab.is_empty() {
            return bad("vocab is empty");
        }
        if self
            .vocab
            .iter()
            .chain(&self.entity_vocab)
            .any(|t| !is_valid_token_text(t))
        {
            return bad("vocabulary tokens must be non-empty and contain no whitespace");
        }
        if self.category.is_empty() || self.category.chars().any(char::is_whitespace) {
            return bad("category must be a non-empty word");
        }
        if self.max_spans_per_sentence == 0 {
            return bad("max_spans_per_sentence must be at least 1");
        }
        if self.context_len.0 > self.context_len.1 {
            return bad("context_len range is empty");
        }
        Ok(())
    }
}

/// Generates a VALID corpus. The number of sentences with spans is
/// `round(entity_rate * n_sentences)`, so the realized rate is within half a
/// sentence of the target.
pub fn synth_corpus(cfg: &SynthConfig) -> Result<Corpus> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_sentences;
    let n_with = ((cfg.entity_rate * n as f64).round() as usize).min(n);
    let mut has_entity = vec![false; n];
    for i in rand::seq::index::sample(&mut rng, n, n_with) {
        has_entity[i] = true;
    }

    let lengths = WeightedIndex::new(&cfg.length_weights)
        .map_err(|e| Error::Config(format!("length_weights: {e}")))?;
    let entity_vocab = if cfg.entity_vocab.is_empty() {
        &cfg.vocab
    } else {
        &cfg.entity_vocab
    };

    let mut sentences = Vec::with_capacity(n);
    for &with_entity in &has_entity {
        let n_context = rng.gen_range(cfg.context_len.0..=cfg.context_len.1);
        // Each unit is either a single context token or a whole span.
        let mut units: Vec<Vec<Token>> = (0..n_context)
            .map(|_| vec![Token::new(cfg.vocab.choose(&mut rng).unwrap().as_str(), Label::O)])
            .collect();
        if with_entity {
            for _ in 0..rng.gen_range(1..=cfg.max_spans_per_sentence) {
                let len = lengths.sample(&mut rng) + 1;
                let span = (0..len)
                    .map(|k| {
                        let text = entity_vocab.choose(&mut rng).unwrap().as_str();
                        let label = if k == 0 {
                            Label::B(cfg.category.clone())
                        } else {
                            Label::I(cfg.category.clone())
                        };
                        Token::new(text, label)
                    })
                    .collect();
                let at = rng.gen_range(0..=units.len());
                units.insert(at, span);
            }
        }
        if units.is_empty() {
            units.push(vec![Token::new(cfg.vocab[0].as_str(), Label::O)]);
        }
        let mut sentence = LabeledSentence::new(units.into_iter().flatten().collect())?;
        sentence.set_source("synth");
        sentences.push(sentence);
    }
    Ok(Corpus::new("synth", sentences))
}
