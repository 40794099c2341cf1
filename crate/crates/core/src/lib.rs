//! Toolkit for building, perturbing and scoring IOB-tagged entity-recognition
//! corpora of colloquial text.
//!
//! The crate is organised around a small pipeline:
//!
//! * [`corpus`] parses and writes the tab-separated corpus format, validates
//!   and repairs IOB sequences, extracts entity spans and computes corpus
//!   statistics.
//! * [`lexicon`] loads the formal/colloquial term mapping.
//! * [`perturb`] builds derived training sets: normalized, de-normalized and
//!   mixed corpora.
//! * [`eval`] scores predictions against gold data with exact and partial
//!   span matching, plus length-bucketed and term-level error analyses.
//! * [`rank`] counts how often each training set lands in the top two distinct
//!   values of a metric grid (Score / pScore).
//! * [`report`] renders all of the above as markdown or CSV tables.
//! * [`cli`] wires everything into the `colloq-ner` binary.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod perturb;
pub mod rank;
pub mod report;

pub use corpus::{Corpus, EntitySpan, Label, LabeledSentence, StatsRow, SynthConfig, Token};
pub use error::{Error, Result};
pub use eval::{EvalResult, MatchMode, MatchResult};
pub use lexicon::Lexicon;
pub use perturb::{MixSize, MixSpec, PerturbLog};
pub use rank::{MetricGrid, ScoreTriple};
