//! The corpus file format: one `token<TAB>label` pair per line, sentences
//! separated by a blank line, optional `# key: value` comment lines before a
//! sentence.

use std::fs;
use std::path::Path;

use super::{is_valid_token_text, Corpus, Label, LabeledSentence, Token};
use crate::error::{Error, Result};

const COMMENT_PREFIX: &str = "# ";

/// Parses corpus text. CRLF line endings are accepted; runs of blank lines
/// count as one separator.
pub fn parse_corpus(name: &str, text: &str) -> Result<Corpus> {
    let mut sentences = Vec::new();
    let mut comments: Vec<String> = Vec::new();
    let mut comment_line = 0;
    let mut tokens: Vec<Token> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            if !tokens.is_empty() {
                sentences.push(LabeledSentence {
                    tokens: std::mem::take(&mut tokens),
                    comments: std::mem::take(&mut comments),
                });
            }
            continue;
        }
        if let Some(comment) = line.strip_prefix(COMMENT_PREFIX) {
            if !tokens.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "comment line inside a sentence".into(),
                });
            }
            if comments.is_empty() {
                comment_line = line_no;
            }
            comments.push(comment.to_string());
            continue;
        }
        tokens.push(parse_token_line(line, line_no)?);
    }

    if !tokens.is_empty() {
        sentences.push(LabeledSentence { tokens, comments });
    } else if !comments.is_empty() {
        return Err(Error::Parse {
            line: comment_line,
            message: "metadata comment is not followed by a sentence".into(),
        });
    }
    Ok(Corpus::new(name, sentences))
}

fn parse_token_line(line: &str, line_no: usize) -> Result<Token> {
    let fields: Vec<&str> = line.split('\t').collect();
    let [text, label] = fields[..] else {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected 2 tab-separated fields, found {}", fields.len()),
        });
    };
    if !is_valid_token_text(text) {
        return Err(Error::Parse {
            line: line_no,
            message: format!("token {text:?} is empty or contains whitespace"),
        });
    }
    let label: Label = label.parse().map_err(|e| Error::Parse {
        line: line_no,
        message: format!("{e}"),
    })?;
    Ok(Token::new(text, label))
}

pub fn serialize_corpus(corpus: &Corpus) -> String {
    let mut out = String::new();
    for sentence in &corpus.sentences {
        for comment in &sentence.comments {
            out.push_str(COMMENT_PREFIX);
            out.push_str(comment);
            out.push('\n');
        }
        for token in &sentence.tokens {
            out.push_str(&token.text);
            out.push('\t');
            out.push_str(&token.label.to_string());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Reads a corpus file; the corpus is named after the file stem.
pub fn read_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_corpus(&name, &text)
}

pub fn write_corpus(path: impl AsRef<Path>, corpus: &Corpus) -> Result<()> {
    fs::write(path, serialize_corpus(corpus))?;
    Ok(())
}
