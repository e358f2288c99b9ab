//! Plain-text formats: transition systems, automata, and the formula
//! expression syntax. Parsers report 1-based line/column positions;
//! serializers emit LF line endings and a canonical field order, so a
//! parse/write cycle is stable.

pub mod aut_format;
pub mod formula;
pub mod lts_format;

pub use aut_format::{parse_aut, write_aut};
pub use formula::parse_formula;
pub use lts_format::{parse_lts, write_lts};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, col {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError { line, col, msg: msg.into() }
    }
}

/// One whitespace-separated field with the column it starts at.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Field<'a> {
    pub col: usize,
    pub text: &'a str,
}

/// One non-empty line of a directive file.
#[derive(Debug)]
pub(crate) struct Line<'a> {
    pub no: usize,
    pub fields: Vec<Field<'a>>,
}

impl<'a> Line<'a> {
    pub fn head(&self) -> Field<'a> {
        self.fields[0]
    }

    pub fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.no, self.head().col, msg)
    }

    /// The fields after the directive keyword.
    pub fn rest(&self) -> &[Field<'a>] {
        &self.fields[1..]
    }

    pub fn expect_len(&self, n: usize, usage: &str) -> Result<(), ParseError> {
        if self.fields.len() != n {
            Err(self.err(format!("expected `{usage}`")))
        } else {
            Ok(())
        }
    }
}

/// Splits a directive file into lines of fields. `#` starts a comment,
/// blank lines are skipped, CRLF is tolerated, and `[` / `]` are fields of
/// their own so bracket lists need no surrounding spaces.
pub(crate) fn split_lines(src: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let line = match line.find('#') {
            Some(p) => &line[..p],
            None => line,
        };
        let mut fields = Vec::new();
        let mut chars = line.char_indices().peekable();
        while let Some(&(start, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
            } else if c == '[' || c == ']' {
                chars.next();
                fields.push(Field { col: start + 1, text: &line[start..start + 1] });
            } else {
                let mut end = start;
                while let Some(&(p, c)) = chars.peek() {
                    if c.is_whitespace() || c == '[' || c == ']' {
                        break;
                    }
                    end = p + c.len_utf8();
                    chars.next();
                }
                fields.push(Field { col: start + 1, text: &line[start..end] });
            }
        }
        if !fields.is_empty() {
            out.push(Line { no: i + 1, fields });
        }
    }
    out
}
