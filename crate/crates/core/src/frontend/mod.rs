// SPDX-License-Identifier: Apache-2.0

//! OOSL front end: parsing and fact extraction.
//!
//! OOSL is a small curly-brace object-oriented language; its grammar is
//! documented in `docs/oosl.md`.

mod ast;
mod extract;
mod lexer;
mod parser;

use std::fmt;
use std::path::Path;

pub use ast::*;
pub use extract::{extract, Extraction, ResolutionWarning};

use crate::facts::FactsError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub file: String,
    pub line: u32,
    pub col: u32,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: ", self.file, self.line, self.col)?;
        if self.expected.is_empty() {
            write!(f, "{}", self.found)
        } else {
            write!(f, "expected {}, found {}", self.expected.join(" or "), self.found)
        }
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, thiserror::Error)]
pub enum FrontendError {
    #[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
    Syntax(Vec<SyntaxError>),
    #[error(transparent)]
    Facts(#[from] FactsError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub fn parse_source(path: &str, text: &str) -> Result<SourceUnit, SyntaxError> {
    parser::parse_unit(path, text)
}

/// Parses every file; on failure returns one diagnostic per failing file.
pub fn parse(files: &[(String, String)]) -> Result<Vec<SourceUnit>, Vec<SyntaxError>> {
    let mut units = Vec::new();
    let mut errors = Vec::new();
    for (path, text) in files {
        match parser::parse_unit(path, text) {
            Ok(unit) => units.push(unit),
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(units)
    } else {
        Err(errors)
    }
}

/// Reads every `.oosl` file below `root`, with paths relative to it.
pub fn read_sources(root: &Path) -> Result<Vec<(String, String)>, FrontendError> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(String, String)>) -> Result<(), FrontendError> {
        let io = |source| FrontendError::Io {
            path: dir.display().to_string(),
            source,
        };
        let mut entries: Vec<_> = std::fs::read_dir(dir)
            .map_err(io)?
            .collect::<Result<_, _>>()
            .map_err(io)?;
        entries.sort_by_key(|e| e.path());
        for entry in entries {
            let path = entry.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else if path.extension().is_some_and(|ext| ext == "oosl") {
                let text = std::fs::read_to_string(&path).map_err(|source| FrontendError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                let rel = path
                    .strip_prefix(root)
                    .unwrap_or(&path)
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy())
                    .collect::<Vec<_>>()
                    .join("/");
                out.push((rel, text));
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(root, root, &mut out)?;
    Ok(out)
}

/// Parses and extracts in-memory sources.
pub fn extract_sources(files: &[(String, String)], project: &str) -> Result<Extraction, FrontendError> {
    let units = parse(files).map_err(FrontendError::Syntax)?;
    Ok(extract(&units, project)?)
}

/// Parses and extracts every `.oosl` file below `root`.
pub fn extract_dir(root: &Path, project: &str) -> Result<Extraction, FrontendError> {
    extract_sources(&read_sources(root)?, project)
}
