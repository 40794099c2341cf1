//! Shared helpers for integration tests: fixture paths, random corpus
//! generation and a brute-force reference scorer that works directly on
//! label strings, independent of the library's span and matching code.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use colloq_ner::corpus::{Corpus, Label, LabeledSentence};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// Reference span: (sentence, start, end, category).
pub type RefSpan = (usize, usize, usize, String);

/// Spans read straight off the label strings: each `B-x` opens a span that
/// runs over the following `I-x` tokens.
pub fn ref_spans(labels: &[Vec<String>]) -> Vec<RefSpan> {
    let mut out = Vec::new();
    for (si, row) in labels.iter().enumerate() {
        for (i, l) in row.iter().enumerate() {
            if let Some(cat) = l.strip_prefix("B-") {
                let cont = format!("I-{cat}");
                let mut end = i + 1;
                while end < row.len() && row[end] == cont {
                    end += 1;
                }
                out.push((si, i, end, cat.to_string()));
            }
        }
    }
    out
}

pub fn label_strings(c: &Corpus) -> Vec<Vec<String>> {
    c.sentences
        .iter()
        .map(|s| s.labels().map(|l| l.to_string()).collect())
        .collect()
}

fn ref_overlap(a: &RefSpan, b: &RefSpan) -> usize {
    if a.0 != b.0 || a.3 != b.3 {
        return 0;
    }
    let lo = a.1.max(b.1);
    let hi = a.2.min(b.2);
    hi.saturating_sub(lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RefCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl RefCounts {
    pub fn prf(&self) -> (f64, f64, f64) {
        let p = if self.tp + self.fp == 0 { 0.0 } else { self.tp as f64 / (self.tp + self.fp) as f64 };
        let r = if self.tp + self.fn_ == 0 { 0.0 } else { self.tp as f64 / (self.tp + self.fn_) as f64 };
        let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        (p, r, f)
    }
}

/// Exact matching as plain set intersection.
pub fn ref_exact(gold: &[RefSpan], pred: &[RefSpan]) -> RefCounts {
    let g: BTreeSet<&RefSpan> = gold.iter().collect();
    let p: BTreeSet<&RefSpan> = pred.iter().collect();
    let tp = g.intersection(&p).count();
    RefCounts {
        tp,
        fp: p.len() - tp,
        fn_: g.len() - tp,
    }
}

/// Spans left over after exact matching.
pub fn ref_leftovers(gold: &[RefSpan], pred: &[RefSpan]) -> (Vec<RefSpan>, Vec<RefSpan>) {
    let g: BTreeSet<&RefSpan> = gold.iter().collect();
    let p: BTreeSet<&RefSpan> = pred.iter().collect();
    (
        gold.iter().filter(|s| !p.contains(s)).cloned().collect(),
        pred.iter().filter(|s| !g.contains(s)).cloned().collect(),
    )
}

/// Partial matching by repeated selection: after the exact pairs, keep
/// picking the single best remaining overlapping pair (largest overlap,
/// then smallest gold start, then smallest predicted start) until none is
/// left.
pub fn ref_partial_greedy(gold: &[RefSpan], pred: &[RefSpan]) -> RefCounts {
    let exact = ref_exact(gold, pred).tp;
    let (g, p) = ref_leftovers(gold, pred);
    let mut g_free = vec![true; g.len()];
    let mut p_free = vec![true; p.len()];
    let mut extra = 0;
    loop {
        let mut best: Option<(usize, usize, usize, usize)> = None; // overlap, sentence, gold start, pred start
        let mut best_pair = (0, 0);
        for (gi, gs) in g.iter().enumerate().filter(|(i, _)| g_free[*i]) {
            for (pi, ps) in p.iter().enumerate().filter(|(i, _)| p_free[*i]) {
                let ov = ref_overlap(gs, ps);
                if ov == 0 {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bov, bsi, bgs, bps)) => {
                        ov > bov || (ov == bov && (gs.0, gs.1, ps.1) < (bsi, bgs, bps))
                    }
                };
                if better {
                    best = Some((ov, gs.0, gs.1, ps.1));
                    best_pair = (gi, pi);
                }
            }
        }
        if best.is_none() {
            break;
        }
        g_free[best_pair.0] = false;
        p_free[best_pair.1] = false;
        extra += 1;
    }
    let tp = exact + extra;
    RefCounts {
        tp,
        fp: pred.len() - tp,
        fn_: gold.len() - tp,
    }
}

/// Size of a maximum one-to-one overlap matching by exhaustive search.
pub fn ref_max_matching(gold: &[RefSpan], pred: &[RefSpan]) -> usize {
    fn go(gi: usize, gold: &[RefSpan], pred: &[RefSpan], used: &mut Vec<bool>) -> usize {
        if gi == gold.len() {
            return 0;
        }
        let mut best = go(gi + 1, gold, pred, used);
        for pi in 0..pred.len() {
            if !used[pi] && ref_overlap(&gold[gi], &pred[pi]) > 0 {
                used[pi] = true;
                best = best.max(1 + go(gi + 1, gold, pred, used));
                used[pi] = false;
            }
        }
        best
    }
    let mut total = 0;
    let sentences: BTreeSet<usize> = gold.iter().map(|s| s.0).collect();
    for si in sentences {
        let g: Vec<RefSpan> = gold.iter().filter(|s| s.0 == si).cloned().collect();
        let p: Vec<RefSpan> = pred.iter().filter(|s| s.0 == si).cloned().collect();
        total += go(0, &g, &p, &mut vec![false; p.len()]);
    }
    total
}

/// True when, after exact matching, no leftover span overlaps more than one
/// leftover span on the other side.
pub fn overlaps_conflict_free(gold: &[RefSpan], pred: &[RefSpan]) -> bool {
    let (g, p) = ref_leftovers(gold, pred);
    g.iter().all(|a| p.iter().filter(|b| ref_overlap(a, b) > 0).count() <= 1)
        && p.iter().all(|b| g.iter().filter(|a| ref_overlap(a, b) > 0).count() <= 1)
}

/// Non-overlapping spans placed at random in a sentence of `len` tokens.
fn random_layout(rng: &mut ChaCha8Rng, len: usize, max_spans: usize, cats: &[&str]) -> Vec<Label> {
    let mut labels = vec![Label::O; len];
    let n = rng.gen_range(0..=max_spans);
    let mut pos = 0;
    for _ in 0..n {
        if pos >= len {
            break;
        }
        let start = rng.gen_range(pos..len);
        let max_len = (len - start).min(5);
        let span_len = rng.gen_range(1..=max_len);
        let cat = cats[rng.gen_range(0..cats.len())];
        labels[start] = Label::begin(cat);
        for l in &mut labels[start + 1..start + span_len] {
            *l = Label::inside(cat);
        }
        pos = start + span_len;
    }
    labels
}

/// A prediction derived from gold: spans kept, dropped, re-bounded or
/// spliced, plus spurious spans.
fn noisy_copy(rng: &mut ChaCha8Rng, gold: &[Label], max_spans: usize, cats: &[&str]) -> Vec<Label> {
    if rng.gen_bool(0.3) {
        return random_layout(rng, gold.len(), max_spans, cats);
    }
    let mut pred = gold.to_vec();
    for slot in pred.iter_mut() {
        let roll: f64 = rng.gen();
        *slot = match (&*slot, roll) {
            (Label::B(c), r) if r < 0.15 => Label::I(c.clone()),
            (Label::I(c), r) if r < 0.15 => Label::B(c.clone()),
            (Label::I(_), r) if r < 0.25 => Label::O,
            (Label::O, r) if r < 0.08 => Label::begin(cats[rng.gen_range(0..cats.len())]),
            (l, _) => l.clone(),
        };
    }
    // Collapse orphan I labels the way a tagger's output would be repaired.
    let mut s = LabeledSentence::from_parts(&vec!["t"; pred.len()], &pred).unwrap();
    colloq_ner::corpus::repair_sentence(&mut s);
    let mut labels: Vec<Label> = s.labels().cloned().collect();
    // Enforce the span cap by dropping trailing spans.
    let mut seen = 0;
    for l in labels.iter_mut() {
        if matches!(l, Label::B(_)) {
            seen += 1;
        }
        if seen > max_spans {
            *l = Label::O;
        }
    }
    labels
}

/// A random (gold, pred) pair: up to 10 sentences, up to 6 spans per
/// sentence on each side.
pub fn random_pair(seed: u64) -> (Corpus, Corpus) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cats: &[&str] = if rng.gen_bool(0.2) { &["SYM", "DIS"] } else { &["SYM"] };
    let n_sentences = rng.gen_range(1..=10);
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    for _ in 0..n_sentences {
        let len = rng.gen_range(1..=24);
        let texts: Vec<String> = (0..len).map(|i| format!("w{i}")).collect();
        let g = random_layout(&mut rng, len, 6, cats);
        let p = noisy_copy(&mut rng, &g, 6, cats);
        gold.push(LabeledSentence::from_parts(&texts, &g).unwrap());
        pred.push(LabeledSentence::from_parts(&texts, &p).unwrap());
    }
    (Corpus::new("gold", gold), Corpus::new("pred", pred))
}
