//! File formats and command line front end for `sdnnf-core`.
//!
//! - [`dimacs`]: DIMACS CNF and QDIMACS readers and writers.
//! - [`serial`]: the line-oriented vtree and circuit formats.
//! - [`td_format`]: PACE `.td` tree decompositions.
//! - [`obdd_dump`]: a debugging dump of OBDDs.
//! - [`testkit`]: seeded generators for random instances.
//! - [`cli`]: the `sdnnf` command.

pub mod cli;
pub mod dimacs;
pub mod obdd_dump;
pub mod serial;
pub mod td_format;
pub mod testkit;

pub use sdnnf_core as core;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Core(#[from] sdnnf_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FormatError {
    pub(crate) fn at(line: usize, message: impl Into<String>) -> Self {
        FormatError::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, FormatError>;

/// Splits text into numbered lines, dropping blank lines and `c` comments.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        let comment = l == "c" || l.starts_with("c ") || l.starts_with("c\t");
        (!l.is_empty() && !comment).then_some((i + 1, l))
    })
}

/// Parses one whitespace-separated token.
pub(crate) fn token<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| FormatError::at(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| FormatError::at(line, format!("invalid {what} `{tok}`")))
}
