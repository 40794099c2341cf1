use std::collections::HashSet;

use super::Corpus;
use crate::error::Result;

/// Summary of a corpus and its entity spans.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StatsRow {
    pub n_sentences: usize,
    pub n_entities: usize,
    /// Distinct surfaces, compared case-insensitively.
    pub n_distinct_entities: usize,
    pub pct_sentences_with_entity: f64,
    pub max_entity_length: usize,
    pub pct_one_word: f64,
}

impl StatsRow {
    /// Number of one-token spans (`pct_one_word * n_entities`, exactly).
    pub fn n_one_word(&self) -> usize {
        (self.pct_one_word * self.n_entities as f64).round() as usize
    }
}

/// Fails only if the corpus is not VALID.
pub fn corpus_stats(corpus: &Corpus) -> Result<StatsRow> {
    let mut n_entities = 0;
    let mut with_entity = 0;
    let mut one_word = 0;
    let mut max_len = 0;
    let mut distinct = HashSet::new();
    for (i, sentence) in corpus.sentences.iter().enumerate() {
        let spans = sentence.spans(i)?;
        if !spans.is_empty() {
            with_entity += 1;
        }
        for span in spans {
            n_entities += 1;
            one_word += usize::from(span.len() == 1);
            max_len = max_len.max(span.len());
            distinct.insert(span.surface.to_lowercase());
        }
    }
    let frac = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    Ok(StatsRow {
        n_sentences: corpus.len(),
        n_entities,
        n_distinct_entities: distinct.len(),
        pct_sentences_with_entity: frac(with_entity, corpus.len()),
        max_entity_length: max_len,
        pct_one_word: frac(one_word, n_entities),
    })
}
