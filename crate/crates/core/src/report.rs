//! Markdown and CSV renderings of corpus statistics, metric grids, score
//! tables and length-bucket tables.
//!
//! With `mark_top`, the best value gets a trailing `*` and the second-best
//! distinct value a trailing `^`.

use std::fmt::Write as _;

use crate::corpus::StatsRow;
use crate::error::{Error, Result};
use crate::eval::{EvalResult, LengthBucketTable, MatchMode, TermCounts, LENGTH_BUCKETS};
use crate::rank::{top_two_distinct, MetricGrid, RankTable, ScoreTriple};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    pub format: Format,
    pub mark_top: bool,
    /// Decimal places for fractions. Percentages carry two fewer, so a
    /// fraction shown as `0.73` appears as `73%`.
    pub precision_digits: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            format: Format::Markdown,
            mark_top: false,
            precision_digits: 2,
        }
    }
}

impl RenderOptions {
    pub fn validate(&self) -> Result<()> {
        if !(1..=6).contains(&self.precision_digits) {
            return Err(Error::Argument(format!(
                "precision_digits must be between 1 and 6, got {}",
                self.precision_digits
            )));
        }
        Ok(())
    }

    fn fraction(&self, v: f64) -> String {
        format!("{:.*}", self.precision_digits, v)
    }

    fn percent(&self, v: f64) -> String {
        format!("{:.*}%", self.precision_digits.saturating_sub(2), v * 100.0)
    }

    fn missing(&self) -> &'static str {
        match self.format {
            Format::Markdown => "-",
            Format::Csv => "",
        }
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Markdown => self.markdown(),
            Format::Csv => self.csv(),
        }
    }

    fn markdown(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count().max(3)).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::from("|");
            for (cell, w) in cells.iter().zip(&widths) {
                let pad = w - cell.chars().count();
                write!(s, " {cell}{} |", " ".repeat(pad)).unwrap();
            }
            s.push('\n');
            s
        };
        let mut out = line(&self.header);
        out.push('|');
        for w in &widths {
            write!(out, "{}|", "-".repeat(w + 2)).unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// One row per corpus, in input order.
pub fn render_stats(rows: &[(String, StatsRow)], opts: &RenderOptions) -> Result<String> {
    opts.validate()?;
    let mut t = Table::new([
        "Dataset",
        "# Sentences",
        "# Entities",
        "# Distinct Entities",
        "% Sentences with Entities",
        "Max Entity Length",
        "% One-word Entities",
    ]);
    for (name, s) in rows {
        t.rows.push(vec![
            name.clone(),
            s.n_sentences.to_string(),
            s.n_entities.to_string(),
            s.n_distinct_entities.to_string(),
            opts.percent(s.pct_sentences_with_entity),
            s.max_entity_length.to_string(),
            opts.percent(s.pct_one_word),
        ]);
    }
    Ok(t.render(opts.format))
}

fn marker(value: f64, top: &[f64]) -> &'static str {
    match top.iter().position(|t| *t == value) {
        Some(0) => "*",
        Some(_) => "^",
        None => "",
    }
}

/// Rows grouped by test set, then training set; one column per
/// (model, metric). Markers compare a value with the other training sets of
/// the same model, test set and metric.
pub fn render_metric_grid(grid: &MetricGrid, opts: &RenderOptions) -> Result<String> {
    opts.validate()?;
    let models = grid.models();
    let metrics: Vec<_> = crate::rank::Metric::ALL
        .into_iter()
        .filter(|m| grid.has_metric(*m))
        .collect();
    let mut header = vec!["Test Set".to_string(), "Training Set".to_string()];
    for model in &models {
        header.extend(metrics.iter().map(|m| format!("{model} {m}")));
    }
    let mut t = Table::new(header);
    for test in grid.test_sets() {
        let test = test.as_str();
        let train_sets: Vec<String> = grid
            .train_sets()
            .into_iter()
            .filter(|tr| grid.rows().iter().any(|r| r.test_set == test && &r.train_set == tr))
            .collect();
        let tops: Vec<Vec<f64>> = models
            .iter()
            .flat_map(|model| {
                metrics.iter().map(move |metric| {
                    top_two_distinct(
                        grid.rows()
                            .iter()
                            .filter(|r| &r.model == model && r.test_set == test)
                            .filter_map(|r| r.get(*metric)),
                    )
                })
            })
            .collect();
        for train in &train_sets {
            let mut row = vec![test.to_string(), train.clone()];
            let mut k = 0;
            for model in &models {
                for metric in &metrics {
                    let cell = match grid.get(model, train, test).and_then(|r| r.get(*metric)) {
                        Some(v) => {
                            let mark = if opts.mark_top { marker(v, &tops[k]) } else { "" };
                            format!("{}{mark}", opts.fraction(v))
                        }
                        None => opts.missing().to_string(),
                    };
                    row.push(cell);
                    k += 1;
                }
            }
            t.rows.push(row);
        }
    }
    Ok(t.render(opts.format))
}

/// `total(p,r,f)`; metrics absent from the grid show as `-`.
pub fn format_triple(t: &ScoreTriple) -> String {
    let part = |k: usize| {
        if t.available[k] {
            t.by_metric[k].to_string()
        } else {
            "-".to_string()
        }
    };
    format!("{}({},{},{})", t.total(), part(0), part(1), part(2))
}

const NO_SCORE: &str = "\u{2014}";

pub fn render_score_table(table: &RankTable, opts: &RenderOptions) -> Result<String> {
    opts.validate()?;
    let mut models: Vec<String> = Vec::new();
    for g in &table.groups {
        for m in &g.models {
            if !models.contains(m) {
                models.push(m.clone());
            }
        }
    }
    let mut header = vec!["Test Data".to_string(), "Training Set".to_string()];
    for m in &models {
        header.extend([format!("{m} Score"), format!("{m} pScore"), format!("{m} Tot")]);
    }
    let mut t = Table::new(header);
    for g in &table.groups {
        let label = format!("{} ({})", g.group.name, g.group.tests.join(" + "));
        let tops: Vec<Vec<f64>> = models
            .iter()
            .map(|m| {
                top_two_distinct(
                    g.entries
                        .iter()
                        .filter(|e| &e.model == m)
                        .map(|e| e.total() as f64),
                )
            })
            .collect();
        for train in &g.train_sets {
            let mut row = vec![label.clone(), train.clone()];
            for (mi, m) in models.iter().enumerate() {
                match g.get(m, train) {
                    Some(e) => {
                        row.push(e.score.as_ref().map_or(NO_SCORE.to_string(), format_triple));
                        row.push(e.pscore.as_ref().map_or(NO_SCORE.to_string(), format_triple));
                        let mark = if opts.mark_top {
                            marker(e.total() as f64, &tops[mi])
                        } else {
                            ""
                        };
                        row.push(format!("{}{mark}", e.total()));
                    }
                    None => row.extend(std::iter::repeat_n(opts.missing().to_string(), 3)),
                }
            }
            t.rows.push(row);
        }
    }
    Ok(t.render(opts.format))
}

/// One row per named table with TP-1 .. TP-4+ proportions; empty buckets
/// read `n/a`.
pub fn render_length_table(rows: &[(String, LengthBucketTable)], opts: &RenderOptions) -> Result<String> {
    opts.validate()?;
    let mut header = vec!["Name".to_string()];
    header.extend(LENGTH_BUCKETS.iter().map(|b| format!("TP-{b}")));
    let mut t = Table::new(header);
    for (name, table) in rows {
        let mut row = vec![name.clone()];
        row.extend(table.buckets.iter().map(|b| {
            if b.gold == 0 {
                "n/a".to_string()
            } else {
                opts.percent(b.proportion())
            }
        }));
        t.rows.push(row);
    }
    Ok(t.render(opts.format))
}

/// The `mode,TP,FP,FN,P,R,F1` report.
pub fn render_eval(result: &EvalResult, modes: &[MatchMode], opts: &RenderOptions) -> Result<String> {
    opts.validate()?;
    let mut t = Table::new(["mode", "TP", "FP", "FN", "P", "R", "F1"]);
    for mode in modes {
        let m = result.get(*mode);
        t.rows.push(vec![
            mode.to_string(),
            m.counts.tp.to_string(),
            m.counts.fp.to_string(),
            m.counts.fn_.to_string(),
            opts.fraction(m.precision),
            opts.fraction(m.recall),
            opts.fraction(m.f1),
        ]);
    }
    Ok(t.render(opts.format))
}

/// One row per named run with exact and partial P, R, F1.
pub fn render_eval_summary(rows: &[(String, EvalResult)], opts: &RenderOptions) -> Result<String> {
    opts.validate()?;
    let mut t = Table::new(["Name", "P", "R", "F1", "pP", "pR", "pF1"]);
    for (name, r) in rows {
        let mut row = vec![name.clone()];
        for m in [&r.exact, &r.partial] {
            row.extend([m.precision, m.recall, m.f1].map(|v| opts.fraction(v)));
        }
        t.rows.push(row);
    }
    Ok(t.render(opts.format))
}

/// `surface<TAB>count` lines, most frequent first.
pub fn render_terms(terms: &TermCounts) -> String {
    let mut sorted: Vec<(&String, &usize)> = terms.iter().collect();
    sorted.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    sorted
        .into_iter()
        .map(|(term, n)| format!("{term}\t{n}\n"))
        .collect()
}
