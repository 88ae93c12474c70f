//! Domain entities and the view-composition operations.
//!
//! A [`Repository`] holds pattern languages, their patterns, typed relations
//! and pattern views. Languages own the relations documented in their own
//! pattern descriptions; views own the extra relations defined for their
//! context and may adopt language relations by reference.

mod error;
mod ids;
mod repository;
mod types;

pub use error::ModelError;
pub use ids::{slugify, LanguageId, PatternId, RelationId, ViewId};
pub use repository::{
    check_schema, section_issues, NewLanguage, NewPattern, NewRelation, PatternDeletion, Repository, SchemaMode,
    SectionIssue, UncheckedEdit,
};
pub use types::{
    canonical_endpoints, global_relation_types, Ownership, Pattern, PatternLanguage, PatternView, Relation,
    RelationClass, RelationOwner, RelationType, SectionSpec, Span,
};
