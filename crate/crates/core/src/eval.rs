//! Span-level scoring of predicted corpora against gold corpora.
//!
//! Two matching modes are supported. EXACT pairs spans with identical
//! sentence, boundaries and category. PARTIAL keeps every exact pair and then
//! pairs the leftovers one-to-one when they share at least one token, taking
//! the largest overlaps first (ties: smaller gold start, then smaller
//! predicted start). Metrics are micro-averaged over the whole corpus.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::corpus::{Corpus, EntitySpan};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchMode {
    Exact,
    Partial,
}

impl MatchMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            MatchMode::Exact => "exact",
            MatchMode::Partial => "partial",
        }
    }
}

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    pub mode: MatchMode,
    /// `(gold, predicted)` pairs, ordered by gold position.
    pub tp_pairs: Vec<(EntitySpan, EntitySpan)>,
    pub false_positives: Vec<EntitySpan>,
    pub false_negatives: Vec<EntitySpan>,
}

impl MatchResult {
    pub fn counts(&self) -> Counts {
        Counts {
            tp: self.tp_pairs.len(),
            fp: self.false_positives.len(),
            fn_: self.false_negatives.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub counts: Counts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl From<Counts> for Metrics {
    /// Precision (recall) is 0 when there are no predictions (gold spans);
    /// F1 is 0 when precision and recall are both 0.
    fn from(counts: Counts) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(counts.tp, counts.tp + counts.fp);
        let recall = ratio(counts.tp, counts.tp + counts.fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            counts,
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalResult {
    pub exact: Metrics,
    pub partial: Metrics,
}

impl EvalResult {
    pub fn get(&self, mode: MatchMode) -> &Metrics {
        match mode {
            MatchMode::Exact => &self.exact,
            MatchMode::Partial => &self.partial,
        }
    }
}

type ExactKey<'a> = (usize, usize, usize, &'a str);

fn exact_key(s: &EntitySpan) -> ExactKey<'_> {
    (s.sentence_index, s.start, s.end, s.category.as_str())
}

pub fn match_spans(gold: &[EntitySpan], pred: &[EntitySpan], mode: MatchMode) -> MatchResult {
    let mut gold_used = vec![false; gold.len()];
    let mut pred_used = vec![false; pred.len()];
    let mut pairs: Vec<(usize, usize)> = Vec::new();

    let mut by_key: HashMap<ExactKey<'_>, Vec<usize>> = HashMap::new();
    for (gi, g) in gold.iter().enumerate() {
        by_key.entry(exact_key(g)).or_default().push(gi);
    }
    for (pi, p) in pred.iter().enumerate() {
        if let Some(candidates) = by_key.get(&exact_key(p)) {
            if let Some(&gi) = candidates.iter().find(|&&gi| !gold_used[gi]) {
                gold_used[gi] = true;
                pred_used[pi] = true;
                pairs.push((gi, pi));
            }
        }
    }

    if mode == MatchMode::Partial {
        let mut open_gold: HashMap<usize, Vec<usize>> = HashMap::new();
        for (gi, g) in gold.iter().enumerate().filter(|(gi, _)| !gold_used[*gi]) {
            open_gold.entry(g.sentence_index).or_default().push(gi);
        }
        let mut candidates = Vec::new();
        for (pi, p) in pred.iter().enumerate().filter(|(pi, _)| !pred_used[*pi]) {
            for &gi in open_gold.get(&p.sentence_index).into_iter().flatten() {
                let g = &gold[gi];
                let overlap = g.overlap(p);
                if overlap > 0 && g.category == p.category {
                    candidates.push((overlap, gi, pi));
                }
            }
        }
        candidates.sort_by_key(|&(overlap, gi, pi)| {
            let (g, p) = (&gold[gi], &pred[pi]);
            (Reverse(overlap), g.sentence_index, g.start, p.start)
        });
        for (_, gi, pi) in candidates {
            if !gold_used[gi] && !pred_used[pi] {
                gold_used[gi] = true;
                pred_used[pi] = true;
                pairs.push((gi, pi));
            }
        }
    }

    pairs.sort_by(|a, b| gold[a.0].cmp(&gold[b.0]));
    let mut false_positives: Vec<EntitySpan> = pred
        .iter()
        .zip(&pred_used)
        .filter(|(_, used)| !**used)
        .map(|(s, _)| s.clone())
        .collect();
    let mut false_negatives: Vec<EntitySpan> = gold
        .iter()
        .zip(&gold_used)
        .filter(|(_, used)| !**used)
        .map(|(s, _)| s.clone())
        .collect();
    false_positives.sort();
    false_negatives.sort();
    MatchResult {
        mode,
        tp_pairs: pairs
            .into_iter()
            .map(|(gi, pi)| (gold[gi].clone(), pred[pi].clone()))
            .collect(),
        false_positives,
        false_negatives,
    }
}

/// Checks that both corpora hold the same sentences with the same token
/// texts; labels may differ.
pub fn check_alignment(gold: &Corpus, pred: &Corpus) -> Result<()> {
    if gold.len() != pred.len() {
        return Err(Error::Alignment {
            sentence: gold.len().min(pred.len()),
            token: 0,
            message: format!("gold has {} sentences, pred has {}", gold.len(), pred.len()),
        });
    }
    for (si, (g, p)) in gold.sentences.iter().zip(&pred.sentences).enumerate() {
        if let Some(ti) = g.texts().zip(p.texts()).position(|(a, b)| a != b) {
            return Err(Error::Alignment {
                sentence: si,
                token: ti,
                message: format!("gold token {:?} vs pred token {:?}", g.tokens[ti].text, p.tokens[ti].text),
            });
        }
        if g.len() != p.len() {
            return Err(Error::Alignment {
                sentence: si,
                token: g.len().min(p.len()),
                message: format!("gold has {} tokens, pred has {}", g.len(), p.len()),
            });
        }
    }
    Ok(())
}

fn aligned_spans(gold: &Corpus, pred: &Corpus) -> Result<(Vec<EntitySpan>, Vec<EntitySpan>)> {
    check_alignment(gold, pred)?;
    Ok((gold.spans()?, pred.spans()?))
}

pub fn score_corpus(gold: &Corpus, pred: &Corpus) -> Result<EvalResult> {
    let (g, p) = aligned_spans(gold, pred)?;
    Ok(EvalResult {
        exact: match_spans(&g, &p, MatchMode::Exact).counts().into(),
        partial: match_spans(&g, &p, MatchMode::Partial).counts().into(),
    })
}

pub const LENGTH_BUCKETS: [&str; 4] = ["1", "2", "3", "4+"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BucketCount {
    pub gold: usize,
    pub tp: usize,
}

impl BucketCount {
    /// Share of gold spans found by exact match; 0 for an empty bucket.
    pub fn proportion(&self) -> f64 {
        if self.gold == 0 {
            0.0
        } else {
            self.tp as f64 / self.gold as f64
        }
    }
}

/// Exact-match hits per gold span length, bucketed as 1, 2, 3 and 4+ tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LengthBucketTable {
    pub buckets: [BucketCount; 4],
}

impl LengthBucketTable {
    pub fn bucket_of(len: usize) -> usize {
        len.clamp(1, 4) - 1
    }

    pub fn total_gold(&self) -> usize {
        self.buckets.iter().map(|b| b.gold).sum()
    }
}

pub fn tp_by_length(gold: &Corpus, pred: &Corpus) -> Result<LengthBucketTable> {
    let (g, p) = aligned_spans(gold, pred)?;
    let mut table = LengthBucketTable::default();
    for span in &g {
        table.buckets[LengthBucketTable::bucket_of(span.len())].gold += 1;
    }
    for (span, _) in match_spans(&g, &p, MatchMode::Exact).tp_pairs {
        table.buckets[LengthBucketTable::bucket_of(span.len())].tp += 1;
    }
    Ok(table)
}

/// Lower-cased surface -> frequency.
pub type TermCounts = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ErrorTerms {
    pub false_positives: TermCounts,
    pub false_negatives: TermCounts,
}

fn count_terms(spans: &[EntitySpan]) -> TermCounts {
    let mut out = TermCounts::new();
    for s in spans {
        *out.entry(s.surface.to_lowercase()).or_default() += 1;
    }
    out
}

pub fn error_terms(gold: &Corpus, pred: &Corpus, mode: MatchMode) -> Result<ErrorTerms> {
    let (g, p) = aligned_spans(gold, pred)?;
    let m = match_spans(&g, &p, mode);
    Ok(ErrorTerms {
        false_positives: count_terms(&m.false_positives),
        false_negatives: count_terms(&m.false_negatives),
    })
}

/// Surfaces that every run got wrong.
pub fn shared_errors(runs: &[(String, TermCounts)]) -> Result<BTreeSet<String>> {
    let Some(((_, first), rest)) = runs.split_first() else {
        return Err(Error::Argument("shared_errors needs at least one run".into()));
    };
    Ok(first
        .keys()
        .filter(|term| rest.iter().all(|(_, other)| other.contains_key(*term)))
        .cloned()
        .collect())
}

/// Length of the longest gold span found by exact match, with every distinct
/// surface of that length in corpus order. `(0, [])` without true positives.
pub fn longest_correct(gold: &Corpus, pred: &Corpus) -> Result<(usize, Vec<String>)> {
    let (g, p) = aligned_spans(gold, pred)?;
    let tps = match_spans(&g, &p, MatchMode::Exact).tp_pairs;
    let max = tps.iter().map(|(s, _)| s.len()).max().unwrap_or(0);
    let mut surfaces: Vec<String> = Vec::new();
    for (s, _) in tps.iter().filter(|(s, _)| s.len() == max) {
        if !surfaces.contains(&s.surface) {
            surfaces.push(s.surface.clone());
        }
    }
    Ok((max, surfaces))
}
