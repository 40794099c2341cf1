//! Score / pScore ranking over a (model x training set x test set) metric
//! grid.
//!
//! For one model and one test set, a training set earns a point on a metric
//! when its value is the highest or second-highest DISTINCT value among all
//! training sets for that model and test. Ties share the point. Score sums
//! the points over P, R and F1; pScore does the same for the partial-match
//! metrics pP, pR and pF1.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::eval::MatchMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    P,
    R,
    F1,
    PP,
    PR,
    PF1,
}

impl Metric {
    pub const ALL: [Metric; 6] = [Metric::P, Metric::R, Metric::F1, Metric::PP, Metric::PR, Metric::PF1];

    pub fn column(&self) -> &'static str {
        match self {
            Metric::P => "P",
            Metric::R => "R",
            Metric::F1 => "F1",
            Metric::PP => "pP",
            Metric::PR => "pR",
            Metric::PF1 => "pF1",
        }
    }

    pub fn index(&self) -> usize {
        *self as usize
    }

    /// The (precision, recall, F1) triple for a match mode.
    pub fn for_mode(mode: MatchMode) -> [Metric; 3] {
        match mode {
            MatchMode::Exact => [Metric::P, Metric::R, Metric::F1],
            MatchMode::Partial => [Metric::PP, Metric::PR, Metric::PF1],
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub model: String,
    pub train_set: String,
    pub test_set: String,
    pub values: [Option<f64>; 6],
}

impl GridRow {
    pub fn new(model: &str, train_set: &str, test_set: &str) -> Self {
        Self {
            model: model.to_string(),
            train_set: train_set.to_string(),
            test_set: test_set.to_string(),
            values: [None; 6],
        }
    }

    pub fn with(mut self, metric: Metric, value: f64) -> Self {
        self.values[metric.index()] = Some(value);
        self
    }

    pub fn get(&self, metric: Metric) -> Option<f64> {
        self.values[metric.index()]
    }

    fn key(&self) -> (String, String, String) {
        (self.model.clone(), self.train_set.clone(), self.test_set.clone())
    }
}

#[derive(Debug, Clone, Default)]
pub struct MetricGrid {
    rows: Vec<GridRow>,
    index: HashMap<(String, String, String), usize>,
}

fn check_value(metric: Metric, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Argument(format!("{metric} value {value} is outside [0, 1]")));
    }
    Ok(())
}

fn first_appearance<'a>(items: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut seen = HashSet::new();
    items.filter(|s| seen.insert(*s)).map(str::to_string).collect()
}

impl MetricGrid {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a row. Keys must be unique, values must lie in `[0, 1]` and at
    /// least one metric must be present.
    pub fn insert(&mut self, row: GridRow) -> Result<()> {
        for metric in Metric::ALL {
            if let Some(v) = row.get(metric) {
                check_value(metric, v)?;
            }
        }
        if row.values.iter().all(Option::is_none) {
            return Err(Error::Argument(format!(
                "row ({}, {}, {}) has no metric values",
                row.model, row.train_set, row.test_set
            )));
        }
        let key = row.key();
        if self.index.contains_key(&key) {
            return Err(Error::Argument(format!(
                "duplicate grid row ({}, {}, {})",
                key.0, key.1, key.2
            )));
        }
        self.index.insert(key, self.rows.len());
        self.rows.push(row);
        Ok(())
    }

    /// Folds `other` into this grid. Rows with a shared key fill each
    /// other's empty cells; two different values for one cell are an error.
    pub fn merge(&mut self, other: &MetricGrid) -> Result<()> {
        for row in &other.rows {
            let Some(&i) = self.index.get(&row.key()) else {
                self.insert(row.clone())?;
                continue;
            };
            let mine = &mut self.rows[i];
            for metric in Metric::ALL {
                match (mine.get(metric), row.get(metric)) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(Error::Argument(format!(
                            "conflicting {metric} for ({}, {}, {}): {a} vs {b}",
                            row.model, row.train_set, row.test_set
                        )))
                    }
                    (None, Some(b)) => mine.values[metric.index()] = Some(b),
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> &[GridRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, model: &str, train_set: &str, test_set: &str) -> Option<&GridRow> {
        self.index
            .get(&(model.to_string(), train_set.to_string(), test_set.to_string()))
            .map(|&i| &self.rows[i])
    }

    /// Model names in order of first appearance.
    pub fn models(&self) -> Vec<String> {
        first_appearance(self.rows.iter().map(|r| r.model.as_str()))
    }

    pub fn train_sets(&self) -> Vec<String> {
        first_appearance(self.rows.iter().map(|r| r.train_set.as_str()))
    }

    pub fn test_sets(&self) -> Vec<String> {
        first_appearance(self.rows.iter().map(|r| r.test_set.as_str()))
    }

    pub fn has_metric(&self, metric: Metric) -> bool {
        self.rows.iter().any(|r| r.get(metric).is_some())
    }

    fn slice<'a>(&'a self, model: &'a str, test_set: &'a str) -> impl Iterator<Item = &'a GridRow> + 'a {
        self.rows
            .iter()
            .filter(move |r| r.model == model && r.test_set == test_set)
    }
}

pub const GRID_HEADER: [&str; 9] = ["model", "train_set", "test_set", "P", "R", "F1", "pP", "pR", "pF1"];

/// Loads a grid CSV with header `model,train_set,test_set,P,R,F1,pP,pR,pF1`.
/// Metric cells may be empty.
pub fn load_grid<R: Read>(reader: R) -> Result<MetricGrid> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut columns = [0usize; 9];
    for (slot, name) in columns.iter_mut().zip(GRID_HEADER) {
        *slot = headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("grid header lacks column '{name}'"),
        })?;
    }

    let mut grid = MetricGrid::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| record.get(columns[i]).unwrap_or("");
        let mut row = GridRow::new(field(0), field(1), field(2));
        for (k, metric) in Metric::ALL.into_iter().enumerate() {
            let cell = field(3 + k);
            if cell.is_empty() {
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                line,
                message: format!("{metric} value '{cell}' is not a number"),
            })?;
            row.values[metric.index()] = Some(value);
        }
        grid.insert(row).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
    }
    Ok(grid)
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<MetricGrid> {
    load_grid(File::open(path)?)
}

/// The highest and second-highest distinct values, descending.
pub fn top_two_distinct(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    v.truncate(2);
    v
}

/// For one (model, test set, metric) slice: which training sets hold one of
/// the two highest distinct values.
pub fn top_two_flags(
    grid: &MetricGrid,
    model: &str,
    test_set: &str,
    metric: Metric,
) -> Result<IndexMap<String, bool>> {
    let rows: Vec<&GridRow> = grid.slice(model, test_set).collect();
    if rows.is_empty() {
        return Err(Error::Lookup(format!("no rows for model '{model}' on test '{test_set}'")));
    }
    let mut values = Vec::with_capacity(rows.len());
    for row in &rows {
        let v = row.get(metric).ok_or_else(|| {
            Error::Capability(format!(
                "{metric} missing for ({model}, {}, {test_set})",
                row.train_set
            ))
        })?;
        values.push(v);
    }
    let top = top_two_distinct(values.iter().copied());
    Ok(rows
        .iter()
        .zip(values)
        .map(|(row, v)| (row.train_set.clone(), top.contains(&v)))
        .collect())
}

/// Top-two counts for one training set over (precision, recall, F1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScoreTriple {
    pub by_metric: [usize; 3],
    /// Whether each metric was present in the grid and counted.
    pub available: [bool; 3],
}

impl ScoreTriple {
    pub fn total(&self) -> usize {
        self.by_metric.iter().sum()
    }
}

/// Score (EXACT) or pScore (PARTIAL) of every training set for `model` over
/// `tests`. A metric whose column is entirely empty for the model and test
/// is skipped and marked unavailable; a half-filled column is an error, as
/// is a mode with no populated metric at all.
pub fn score<S: AsRef<str>>(
    grid: &MetricGrid,
    model: &str,
    tests: &[S],
    mode: MatchMode,
) -> Result<IndexMap<String, ScoreTriple>> {
    let mut out: IndexMap<String, ScoreTriple> = IndexMap::new();
    for test in tests {
        let test = test.as_ref();
        if grid.slice(model, test).next().is_none() {
            return Err(Error::Lookup(format!("no rows for model '{model}' on test '{test}'")));
        }
        for row in grid.slice(model, test) {
            out.entry(row.train_set.clone()).or_default();
        }
    }
    // Keep grid order for training sets.
    let order = grid.train_sets();
    out.sort_by_cached_key(|k, _| order.iter().position(|t| t == k));

    for (k, metric) in Metric::for_mode(mode).into_iter().enumerate() {
        for test in tests {
            let test = test.as_ref();
            if grid.slice(model, test).all(|r| r.get(metric).is_none()) {
                continue;
            }
            for (train_set, flag) in top_two_flags(grid, model, test, metric)? {
                let triple = out.get_mut(&train_set).expect("train set collected above");
                triple.available[k] = true;
                triple.by_metric[k] += usize::from(flag);
            }
        }
        let seen = out.values().any(|t| t.available[k]);
        for triple in out.values_mut() {
            triple.available[k] = seen;
        }
    }
    if out.values().all(|t| t.available.iter().all(|a| !a)) {
        return Err(Error::Capability(format!(
            "no {mode} metrics in the grid for model '{model}'"
        )));
    }
    Ok(out)
}

/// A named set of test sets whose points are summed together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestGroup {
    pub name: String,
    pub tests: Vec<String>,
}

impl TestGroup {
    pub fn new<S: AsRef<str>>(name: &str, tests: &[S]) -> Self {
        Self {
            name: name.to_string(),
            tests: tests.iter().map(|t| t.as_ref().to_string()).collect(),
        }
    }
}

impl FromStr for TestGroup {
    type Err = Error;

    /// Parses `name=test1,test2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, tests) = s
            .split_once('=')
            .ok_or_else(|| Error::Argument(format!("group '{s}' is not of the form name=test1,test2")))?;
        let tests: Vec<String> = tests
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        if name.trim().is_empty() || tests.is_empty() {
            return Err(Error::Argument(format!("group '{s}' needs a name and at least one test")));
        }
        Ok(TestGroup {
            name: name.trim().to_string(),
            tests,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankEntry {
    pub model: String,
    pub train_set: String,
    pub score: Option<ScoreTriple>,
    pub pscore: Option<ScoreTriple>,
}

impl RankEntry {
    pub fn total(&self) -> usize {
        self.score.map_or(0, |s| s.total()) + self.pscore.map_or(0, |s| s.total())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    pub group: TestGroup,
    pub models: Vec<String>,
    pub train_sets: Vec<String>,
    pub entries: Vec<RankEntry>,
}

impl GroupTable {
    pub fn get(&self, model: &str, train_set: &str) -> Option<&RankEntry> {
        self.entries
            .iter()
            .find(|e| e.model == model && e.train_set == train_set)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankTable {
    pub groups: Vec<GroupTable>,
}

impl RankTable {
    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

fn optional(result: Result<IndexMap<String, ScoreTriple>>) -> Result<Option<IndexMap<String, ScoreTriple>>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(Error::Capability(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Score, pScore and their total for every model covering all tests of each
/// group. A mode without any populated metric is left out (`None`).
pub fn rank_table(grid: &MetricGrid, groups: &[TestGroup]) -> Result<RankTable> {
    if grid.is_empty() {
        return Ok(RankTable::default());
    }
    let known = grid.test_sets();
    let mut out = RankTable::default();
    for group in groups {
        if let Some(unknown) = group.tests.iter().find(|t| !known.contains(t)) {
            return Err(Error::Argument(format!(
                "group '{}' names unknown test set '{unknown}'",
                group.name
            )));
        }
        let models: Vec<String> = grid
            .models()
            .into_iter()
            .filter(|m| group.tests.iter().all(|t| grid.slice(m, t).next().is_some()))
            .collect();
        let mut entries = Vec::new();
        for model in &models {
            let exact = optional(score(grid, model, &group.tests, MatchMode::Exact))?;
            let partial = optional(score(grid, model, &group.tests, MatchMode::Partial))?;
            let train_sets = exact
                .as_ref()
                .or(partial.as_ref())
                .map(|m| m.keys().cloned().collect::<Vec<_>>())
                .unwrap_or_default();
            for train_set in train_sets {
                entries.push(RankEntry {
                    model: model.clone(),
                    score: exact.as_ref().and_then(|m| m.get(&train_set).copied()),
                    pscore: partial.as_ref().and_then(|m| m.get(&train_set).copied()),
                    train_set,
                });
            }
        }
        let order = grid.train_sets();
        let train_sets = order
            .into_iter()
            .filter(|t| entries.iter().any(|e| &e.train_set == t))
            .collect();
        out.groups.push(GroupTable {
            group: group.clone(),
            models,
            train_sets,
            entries,
        });
    }
    Ok(out)
}
