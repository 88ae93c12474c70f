use thiserror::Error;

use super::ids::{LanguageId, PatternId, RelationId, ViewId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("id `{0}` is already in use")]
    DuplicateId(String),
    #[error("invalid section schema or relation vocabulary: {0}")]
    InvalidSchema(String),
    #[error("`{0}` does not yield a usable identifier")]
    InvalidName(String),
    #[error("unknown pattern language `{0}`")]
    UnknownLanguage(LanguageId),
    #[error("pattern `{pattern}` violates its language's section schema: {detail}")]
    SchemaViolation { pattern: String, detail: String },
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("relation source `{source_id}` is not documented by language `{language}`")]
    ForeignSource { source_id: PatternId, language: LanguageId },
    #[error("relation type `{relation_type}` is not available for {scope}")]
    UnknownRelationType { relation_type: String, scope: String },
    #[error("relation type `{relation_type}` has a different directedness than relation `{relation}`")]
    DirectionMismatch {
        relation: RelationId,
        relation_type: String,
    },
    #[error("undirected relation `{0}` does not list its endpoints in canonical order")]
    NonCanonicalEndpoints(RelationId),
    #[error("pattern `{0}` cannot relate to itself")]
    SelfLoop(PatternId),
    #[error("relation `{0}` duplicates an existing relation")]
    DuplicateRelation(RelationId),
    #[error("view `{0}` needs a non-empty context")]
    EmptyContext(ViewId),
    #[error("pattern `{pattern}` is already a member of view `{view}`")]
    AlreadyMember { view: ViewId, pattern: PatternId },
    #[error("pattern `{pattern}` is not a member of view `{view}`")]
    NotMember { view: ViewId, pattern: PatternId },
    #[error("relation `{relation}` is already referenced by view `{view}`")]
    AlreadyReferenced { view: ViewId, relation: RelationId },
    #[error("relation `{0}` is not owned by a pattern language")]
    NotLanguageOwned(RelationId),
    #[error("relation `{relation}` is listed by a view that does not own it")]
    OwnershipMismatch { relation: RelationId },
    #[error("pattern `{pattern}` is not a member of view `{view}`")]
    EndpointNotInView { view: ViewId, pattern: PatternId },
    #[error("removing `{pattern}` from `{view}` would orphan {} relation(s)", relations.len())]
    WouldOrphanRelations {
        view: ViewId,
        pattern: PatternId,
        relations: Vec<RelationId>,
    },
    #[error("pattern `{pattern}` is still a member of {} view(s)", views.len())]
    PatternInUse { pattern: PatternId, views: Vec<ViewId> },
    #[error("pattern language `{0}` still contains patterns")]
    LanguageNotEmpty(LanguageId),
    #[error("field `{field}` of `{subject}` cannot be changed")]
    ImmutableField { subject: String, field: &'static str },
}

impl ModelError {
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::DuplicateId(_) => "DuplicateId",
            ModelError::InvalidSchema(_) => "InvalidSchema",
            ModelError::InvalidName(_) => "InvalidName",
            ModelError::UnknownLanguage(_) => "UnknownLanguage",
            ModelError::SchemaViolation { .. } => "SchemaViolation",
            ModelError::UnknownEntity(_) => "UnknownEntity",
            ModelError::ForeignSource { .. } => "ForeignSource",
            ModelError::UnknownRelationType { .. } => "UnknownRelationType",
            ModelError::DirectionMismatch { .. } => "DirectionMismatch",
            ModelError::NonCanonicalEndpoints(_) => "NonCanonicalEndpoints",
            ModelError::SelfLoop(_) => "SelfLoop",
            ModelError::DuplicateRelation(_) => "DuplicateRelation",
            ModelError::EmptyContext(_) => "EmptyContext",
            ModelError::AlreadyMember { .. } => "AlreadyMember",
            ModelError::NotMember { .. } => "NotMember",
            ModelError::AlreadyReferenced { .. } => "AlreadyReferenced",
            ModelError::NotLanguageOwned(_) => "NotLanguageOwned",
            ModelError::OwnershipMismatch { .. } => "OwnershipMismatch",
            ModelError::EndpointNotInView { .. } => "EndpointNotInView",
            ModelError::WouldOrphanRelations { .. } => "WouldOrphanRelations",
            ModelError::PatternInUse { .. } => "PatternInUse",
            ModelError::LanguageNotEmpty(_) => "LanguageNotEmpty",
            ModelError::ImmutableField { .. } => "ImmutableField",
        }
    }

    /// Id of the entity the error is about.
    pub fn subject(&self) -> String {
        match self {
            ModelError::DuplicateId(id)
            | ModelError::InvalidSchema(id)
            | ModelError::InvalidName(id)
            | ModelError::UnknownEntity(id) => id.clone(),
            ModelError::UnknownLanguage(id) | ModelError::LanguageNotEmpty(id) => id.to_string(),
            ModelError::SchemaViolation { pattern, .. } => pattern.clone(),
            ModelError::ForeignSource { source_id, .. } => source_id.to_string(),
            ModelError::UnknownRelationType { relation_type, .. } => relation_type.clone(),
            ModelError::DirectionMismatch { relation, .. } | ModelError::OwnershipMismatch { relation } => {
                relation.to_string()
            }
            ModelError::SelfLoop(id) => id.to_string(),
            ModelError::DuplicateRelation(id)
            | ModelError::NotLanguageOwned(id)
            | ModelError::NonCanonicalEndpoints(id) => id.to_string(),
            ModelError::EmptyContext(id) => id.to_string(),
            ModelError::AlreadyMember { pattern, .. }
            | ModelError::NotMember { pattern, .. }
            | ModelError::EndpointNotInView { pattern, .. }
            | ModelError::WouldOrphanRelations { pattern, .. }
            | ModelError::PatternInUse { pattern, .. } => pattern.to_string(),
            ModelError::AlreadyReferenced { relation, .. } => relation.to_string(),
            ModelError::ImmutableField { subject, .. } => subject.clone(),
        }
    }
}
