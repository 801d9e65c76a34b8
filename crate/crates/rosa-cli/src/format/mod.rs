//! The scenario file format.
//!
//! A line-oriented structured text with a versioned header and four
//! sections: `model` (the design-time knowledge), `timeline` (scripted
//! events per tick), `plant` (simulation parameters) and `mission` (the
//! behavior tree). The grammar is documented in the repository README.

mod emit;
mod parse;

pub use emit::emit;
pub use parse::{parse, HEADER};

use rosa_core::era::Store;
use rosa_core::model::{load_model, validate_document, LoadError, ScenarioDocument};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{source_err}")]
    Semantic { source_err: LoadError, line: Option<usize> },
}

impl ScenarioError {
    /// Line-annotated human description.
    pub fn describe(&self) -> String {
        match self {
            ScenarioError::Syntax { .. } => self.to_string(),
            ScenarioError::Semantic { source_err, line } => match line {
                Some(l) => format!("line {l}: {source_err}"),
                None => source_err.to_string(),
            },
        }
    }
}

/// Parses and loads a scenario: the text must parse, every cross-reference
/// must resolve, and the timeline and mission must be consistent with the
/// model. Nothing is kept on error.
pub fn load_scenario(text: &str) -> Result<(ScenarioDocument, Store), ScenarioError> {
    let (doc, decl_lines) = parse(text)?;
    let store = load_model(&doc.model).map_err(|e| ScenarioError::Semantic {
        line: e.decl.and_then(|i| decl_lines.get(i).copied()),
        source_err: e,
    })?;
    validate_document(&doc, &store)
        .map_err(|e| ScenarioError::Semantic { source_err: e, line: None })?;
    Ok((doc, store))
}
