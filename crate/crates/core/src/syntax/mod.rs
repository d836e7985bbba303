//! Concrete syntax: lexer, term parser, pretty-printer and type syntax.
//!
//! The grammar is documented in `docs/grammar.md`.

mod lexer;
mod parser;
mod pretty;
mod types;

use std::fmt;

pub use lexer::{is_identifier, lex, Tok, Token, KEYWORDS};
pub use parser::{parse, parse_source};
pub use pretty::pretty;
pub use types::{parse_kind, parse_monotype, parse_scheme};

/// A 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A positioned parse or lex diagnostic.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{}:{}: {}: {message}", pos.line, pos.column, match severity { Severity::Error => "error", Severity::Warning => "warning" })]
pub struct Diagnostic {
    pub message: String,
    pub pos: Pos,
    pub severity: Severity,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, pos: Pos) -> Self {
        Diagnostic { message: message.into(), pos, severity: Severity::Error }
    }
}

/// Source text plus where it came from, for diagnostics.
#[derive(Clone, Debug)]
pub struct SourceProgram {
    pub text: String,
    pub origin: String,
}

impl SourceProgram {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Self {
        SourceProgram { text: text.into(), origin: origin.into() }
    }

    pub fn stdin(text: impl Into<String>) -> Self {
        SourceProgram::new(text, "<stdin>")
    }

    pub fn read(path: &std::path::Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(SourceProgram::new(text, path.display().to_string()))
    }
}

impl fmt::Display for SourceProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.origin)
    }
}
