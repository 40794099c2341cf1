//! The `colloq-ner` command line.
//!
//! Exit status: 0 on success, 1 on data errors (unreadable or malformed
//! input, alignment failures, invalid labels under `--strict`), 2 on usage
//! errors. Diagnostics go to stderr; data goes to stdout or the named file.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{self, Corpus, SynthConfig};
use crate::error::{Error, Result};
use crate::eval::{self, MatchMode};
use crate::lexicon;
use crate::perturb::{self, Direction, MixSize, MixSpec};
use crate::rank::{self, MetricGrid, TestGroup};
use crate::report::{self, Format, RenderOptions};

#[derive(Debug, Parser)]
#[command(name = "colloq-ner", version, about = "Build, perturb, evaluate and rank IOB entity corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List IOB violations (orphan or category-mismatched I labels).
    Validate(ValidateArgs),
    /// Corpus statistics, one row per input file.
    Stats(StatsArgs),
    /// Normalize or de-normalize entity spans through a lexicon.
    Perturb(PerturbArgs),
    /// Draw half of a new corpus from each of two corpora.
    Mix(MixArgs),
    /// Score predictions against gold labels.
    Eval(EvalArgs),
    /// Score / pScore table over a metric grid.
    Rank(RankArgs),
    /// Render a metric grid, or summarize several prediction files.
    Report(ReportArgs),
    /// Generate a synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Md,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Md => Format::Markdown,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Normalize,
    Denormalize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatchArg {
    Exact,
    Partial,
    Both,
}

impl MatchArg {
    fn modes(self) -> Vec<MatchMode> {
        match self {
            MatchArg::Exact => vec![MatchMode::Exact],
            MatchArg::Partial => vec![MatchMode::Partial],
            MatchArg::Both => vec![MatchMode::Exact, MatchMode::Partial],
        }
    }
}

fn parse_size(s: &str) -> std::result::Result<MixSize, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(MixSize::Auto);
    }
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(MixSize::Exact(n)),
        _ => Err(format!("expected 'auto' or an integer >= 2, got '{s}'")),
    }
}

fn parse_group(s: &str) -> std::result::Result<TestGroup, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
struct ValidateArgs {
    input: PathBuf,
    /// Exit with status 1 when any violation is found.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct Rendering {
    #[arg(long, value_enum, default_value = "md")]
    format: FormatArg,
    /// Decimal places for fractions.
    #[arg(long, default_value_t = 2)]
    digits: usize,
}

impl Rendering {
    fn options(&self, mark_top: bool) -> RenderOptions {
        RenderOptions {
            format: self.format.into(),
            mark_top,
            precision_digits: self.digits,
        }
    }
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    render: Rendering,
    /// Fail on invalid IOB sequences instead of repairing them.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct PerturbArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the replacement audit CSV here.
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
    input: PathBuf,
    /// Output corpus; stdout when omitted.
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MixArgs {
    #[arg(long, value_parser = parse_size, default_value = "auto")]
    size: MixSize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    strict: bool,
    /// Source of the first floor(size/2) sentences.
    first: PathBuf,
    second: PathBuf,
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long = "match", value_enum, default_value = "both")]
    match_mode: MatchArg,
    /// Append the exact-match TP-by-length table.
    #[arg(long)]
    by_length: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long, default_value_t = 4)]
    digits: usize,
    /// Write false-positive surfaces with counts to this file.
    #[arg(long)]
    fp_terms: Option<PathBuf>,
    /// Write false-negative surfaces with counts to this file.
    #[arg(long)]
    fn_terms: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct RankArgs {
    /// Grid CSV; repeat to merge several grids.
    #[arg(long, required = true)]
    grid: Vec<PathBuf>,
    /// Test group `name=test1,test2`; defaults to one group per test set.
    #[arg(long, value_parser = parse_group)]
    group: Vec<TestGroup>,
    #[command(flatten)]
    render: Rendering,
    #[arg(long)]
    mark_top: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long, conflicts_with_all = ["gold", "pred"], required_unless_present = "gold")]
    grid: Vec<PathBuf>,
    #[arg(long, requires = "pred")]
    gold: Option<PathBuf>,
    #[arg(long)]
    pred: Vec<PathBuf>,
    #[command(flatten)]
    render: Rendering,
    #[arg(long)]
    mark_top: bool,
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    sentences: usize,
    #[arg(long, default_value_t = 0.33)]
    entity_rate: f64,
    /// Comma-separated weights for span lengths 1, 2, 3, ...
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.15,0.1")]
    length_weights: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    output: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the subcommand
/// against the process's stdout and stderr.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Validate(a) => validate(a, out, err),
        Command::Stats(a) => stats(a, out, err),
        Command::Perturb(a) => perturb_cmd(a, out, err),
        Command::Mix(a) => mix(a, out, err),
        Command::Eval(a) => eval_cmd(a, out, err),
        Command::Rank(a) => rank_cmd(a, out),
        Command::Report(a) => report_cmd(a, out, err),
        Command::Synth(a) => synth(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

/// Reads a corpus (`-` for stdin) and makes it VALID: repaired with a warning, or rejected
/// under `strict`.
fn load_valid(path: &Path, strict: bool, err: &mut dyn Write) -> Result<Corpus> {
    let c = if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        corpus::parse_corpus("stdin", &text)?
    } else {
        corpus::read_corpus(path)?
    };
    let violations = corpus::validate(&c);
    if violations.is_empty() {
        return Ok(c);
    }
    if strict {
        let v = &violations[0];
        return Err(Error::InvalidSentence {
            sentence: v.sentence,
            token: v.token,
        });
    }
    writeln!(
        err,
        "warning: {}: repaired {} invalid label(s)",
        path.display(),
        violations.len()
    )?;
    Ok(corpus::repair_labels(&c))
}

fn emit(output: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn validate(a: ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let c = corpus::read_corpus(&a.input)?;
    let violations = corpus::validate(&c);
    for v in &violations {
        writeln!(out, "{}\t{}\t{}", v.sentence, v.token, v.rule)?;
    }
    writeln!(
        err,
        "{}: {} sentence(s), {} violation(s)",
        a.input.display(),
        c.len(),
        violations.len()
    )?;
    Ok(if a.strict && !violations.is_empty() { 1 } else { 0 })
}

fn stats(a: StatsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let mut rows = Vec::new();
    for path in &a.inputs {
        let c = load_valid(path, a.strict, err)?;
        rows.push((c.name.clone(), corpus::corpus_stats(&c)?));
    }
    out.write_all(report::render_stats(&rows, &a.render.options(false))?.as_bytes())?;
    Ok(0)
}

fn perturb_cmd(a: PerturbArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let c = load_valid(&a.input, a.strict, err)?;
    let lex = lexicon::read_lexicon(&a.lexicon)?;
    if lex.duplicates_collapsed() > 0 {
        writeln!(err, "warning: collapsed {} duplicate lexicon row(s)", lex.duplicates_collapsed())?;
    }
    let direction = match a.mode {
        ModeArg::Normalize => Direction::Normalize,
        ModeArg::Denormalize => Direction::Denormalize,
    };
    let (perturbed, log) = perturb::perturb(&c, &lex, direction, a.seed)?;
    if let Some(path) = &a.log {
        fs::write(path, log.to_csv()?)?;
    }
    writeln!(
        err,
        "replaced {} of {} span(s)",
        log.n_spans_replaced, log.n_spans_seen
    )?;
    emit(a.output.as_deref(), &corpus::serialize_corpus(&perturbed), out)?;
    Ok(0)
}

fn mix(a: MixArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let first = load_valid(&a.first, a.strict, err)?;
    let second = load_valid(&a.second, a.strict, err)?;
    let spec = MixSpec {
        size: a.size,
        seed: a.seed,
    };
    let mixed = perturb::mix(&first, &second, &spec)?;
    writeln!(err, "mixed {} sentence(s)", mixed.len())?;
    emit(a.output.as_deref(), &corpus::serialize_corpus(&mixed), out)?;
    Ok(0)
}

fn eval_cmd(a: EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let gold = load_valid(&a.gold, a.strict, err)?;
    let pred = load_valid(&a.pred, a.strict, err)?;
    let opts = RenderOptions {
        format: a.format.into(),
        mark_top: false,
        precision_digits: a.digits,
    };
    let result = eval::score_corpus(&gold, &pred)?;
    let modes = a.match_mode.modes();
    out.write_all(report::render_eval(&result, &modes, &opts)?.as_bytes())?;
    if a.by_length {
        let table = eval::tp_by_length(&gold, &pred)?;
        writeln!(out)?;
        out.write_all(report::render_length_table(&[(pred.name.clone(), table)], &opts)?.as_bytes())?;
    }
    if a.fp_terms.is_some() || a.fn_terms.is_some() {
        let terms = eval::error_terms(&gold, &pred, modes[0])?;
        if let Some(p) = &a.fp_terms {
            fs::write(p, report::render_terms(&terms.false_positives))?;
        }
        if let Some(p) = &a.fn_terms {
            fs::write(p, report::render_terms(&terms.false_negatives))?;
        }
    }
    Ok(0)
}

fn load_grids(paths: &[PathBuf]) -> Result<MetricGrid> {
    let mut grid = MetricGrid::new();
    for p in paths {
        grid.merge(&rank::read_grid(p)?)?;
    }
    Ok(grid)
}

fn rank_cmd(a: RankArgs, out: &mut dyn Write) -> Result<u8> {
    let grid = load_grids(&a.grid)?;
    let groups = if a.group.is_empty() {
        grid.test_sets()
            .into_iter()
            .map(|t| TestGroup::new(&t, &[t.as_str()]))
            .collect()
    } else {
        a.group
    };
    let table = rank::rank_table(&grid, &groups)?;
    out.write_all(report::render_score_table(&table, &a.render.options(a.mark_top))?.as_bytes())?;
    Ok(0)
}

fn report_cmd(a: ReportArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let opts = a.render.options(a.mark_top);
    if let Some(gold_path) = &a.gold {
        let gold = load_valid(gold_path, a.strict, err)?;
        let mut results = Vec::new();
        let mut lengths = Vec::new();
        for p in &a.pred {
            let pred = load_valid(p, a.strict, err)?;
            results.push((pred.name.clone(), eval::score_corpus(&gold, &pred)?));
            lengths.push((pred.name.clone(), eval::tp_by_length(&gold, &pred)?));
        }
        out.write_all(report::render_eval_summary(&results, &opts)?.as_bytes())?;
        writeln!(out)?;
        out.write_all(report::render_length_table(&lengths, &opts)?.as_bytes())?;
        return Ok(0);
    }
    let grid = load_grids(&a.grid)?;
    out.write_all(report::render_metric_grid(&grid, &opts)?.as_bytes())?;
    Ok(0)
}

fn synth(a: SynthArgs, out: &mut dyn Write) -> Result<u8> {
    let cfg = SynthConfig {
        n_sentences: a.sentences,
        entity_rate: a.entity_rate,
        length_weights: a.length_weights,
        seed: a.seed,
        ..Default::default()
    };
    let c = corpus::synth_corpus(&cfg)?;
    emit(a.output.as_deref(), &corpus::serialize_corpus(&c), out)?;
    Ok(0)
}
