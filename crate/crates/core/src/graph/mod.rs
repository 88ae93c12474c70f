//! Graph materialization of languages and views, plus validation, discovery,
//! layout and export over those graphs.

mod build;
mod export;
mod layout;
mod neighborhood;
mod validate;

use thiserror::Error;

use crate::model::LanguageId;

pub use build::{build_language_graph, build_view_graph, GraphEdge, GraphNode, GraphScope, PatternGraph};
pub use export::{export_graph, import_canonical_json, ExportFormat, GraphDocument};
pub use layout::{layout, LayoutResult, Point, DEFAULT_ITERATIONS};
pub use neighborhood::{neighborhood, NeighborhoodEntry};
pub use validate::{validate, Diagnostic, DiagnosticCode, Severity, ValidationScope};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown pattern language `{0}`")]
    UnknownLanguage(LanguageId),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("neighborhood depth must be non-negative, got {0}")]
    NegativeDepth(i64),
    #[error("unsupported export format `{0}` (expected dot, graphml or canonical-json)")]
    UnsupportedFormat(String),
    #[error("malformed graph document: {0}")]
    MalformedGraph(String),
}

impl GraphError {
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::UnknownLanguage(_) => "UnknownLanguage",
            GraphError::UnknownEntity(_) => "UnknownEntity",
            GraphError::NegativeDepth(_) => "NegativeDepth",
            GraphError::UnsupportedFormat(_) => "UnsupportedFormat",
            GraphError::MalformedGraph(_) => "MalformedGraph",
        }
    }

    pub fn subject(&self) -> String {
        match self {
            GraphError::UnknownLanguage(id) => id.to_string(),
            GraphError::UnknownEntity(id) | GraphError::UnsupportedFormat(id) => id.clone(),
            GraphError::NegativeDepth(depth) => depth.to_string(),
            GraphError::MalformedGraph(_) => String::new(),
        }
    }
}
