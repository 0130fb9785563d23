//! Source locations and diagnostics shared by every stage of the pipeline.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Opaque identifier for a source file; resolved to a path via [`FileTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FileId(pub u32);

/// A region of a source file, 1-based, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub file: FileId,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn new(file: FileId, start_line: u32, start_col: u32, end_line: u32, end_col: u32) -> Self {
        debug_assert!((start_line, start_col) <= (end_line, end_col));
        Span { file, start_line, start_col, end_line, end_col }
    }

    pub fn join(self, other: Span) -> Span {
        debug_assert_eq!(self.file, other.file);
        Span {
            file: self.file,
            start_line: self.start_line.min(other.start_line),
            start_col: if self.start_line <= other.start_line { self.start_col } else { other.start_col },
            end_line: self.end_line.max(other.end_line),
            end_col: if self.end_line >= other.end_line { self.end_col } else { other.end_col },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
    Verified,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
            Severity::Warning => write!(f, "warning"),
            Severity::Info => write!(f, "info"),
            Severity::Verified => write!(f, "verified"),
        }
    }
}

/// A span-anchored verdict or problem report.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnostic {
    pub span: Span,
    pub severity: Severity,
    /// Short machine tag: `assrt.false`, `assrt.check`, `assrt.checked`,
    /// `syntax`, `unknown-pred`, ...
    pub code: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(span: Span, severity: Severity, code: &str, message: impl Into<String>) -> Self {
        Diagnostic { span, severity, code: code.to_string(), message: message.into() }
    }
}

/// Maps file ids to paths. Ids are assigned in registration order.
#[derive(Debug, Clone, Default)]
pub struct FileTable {
    paths: Vec<String>,
}

impl FileTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, path: &str) -> FileId {
        if let Some(i) = self.paths.iter().position(|p| p == path) {
            return FileId(i as u32);
        }
        self.paths.push(path.to_string());
        FileId((self.paths.len() - 1) as u32)
    }

    pub fn path(&self, id: FileId) -> &str {
        &self.paths[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}
