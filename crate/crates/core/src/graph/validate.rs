use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::GraphError;
use crate::model::{
    check_schema, section_issues, LanguageId, PatternLanguage, PatternView, Relation, RelationOwner, RelationType,
    Repository, SectionIssue, ViewId,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Closed set of diagnostic codes.
///
/// | code | severity | violated invariant |
/// |---|---|---|
/// | `DanglingEndpoint` | error | a referenced pattern, relation, language or view does not exist |
/// | `EndpointNotInView` | error | a view relation has an endpoint that is not a view member |
/// | `ForeignSource` | error | a language-owned relation is not documented by a pattern of its language |
/// | `DuplicateRelation` | error | two relations share owner, source, target and type |
/// | `SelfLoop` | error | a relation connects a pattern to itself |
/// | `UnknownRelationType` | error | the relation type is not available to the owner |
/// | `DirectionMismatch` | error | the relation's directedness differs from its type |
/// | `NonCanonicalEndpoints` | error | an undirected relation is not stored in lexicographic endpoint order |
/// | `NotLanguageOwned` | error | a view references a relation that a view owns |
/// | `OwnershipMismatch` | error | a view lists a relation it does not own, or a view-owned relation is not listed by its owner |
/// | `EmptyContext` | error | a view has a blank context |
/// | `InvalidSchema` | error | a language schema lacks a required section or repeats names |
/// | `MissingSection` | warning | a pattern lacks a required section |
/// | `UnknownSection` | warning | a pattern has a section outside its language's schema |
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DiagnosticCode {
    DanglingEndpoint,
    EndpointNotInView,
    ForeignSource,
    DuplicateRelation,
    SelfLoop,
    UnknownRelationType,
    DirectionMismatch,
    NonCanonicalEndpoints,
    NotLanguageOwned,
    OwnershipMismatch,
    EmptyContext,
    InvalidSchema,
    MissingSection,
    UnknownSection,
}

impl DiagnosticCode {
    pub const ALL: [DiagnosticCode; 14] = [
        DiagnosticCode::DanglingEndpoint,
        DiagnosticCode::EndpointNotInView,
        DiagnosticCode::ForeignSource,
        DiagnosticCode::DuplicateRelation,
        DiagnosticCode::SelfLoop,
        DiagnosticCode::UnknownRelationType,
        DiagnosticCode::DirectionMismatch,
        DiagnosticCode::NonCanonicalEndpoints,
        DiagnosticCode::NotLanguageOwned,
        DiagnosticCode::OwnershipMismatch,
        DiagnosticCode::EmptyContext,
        DiagnosticCode::InvalidSchema,
        DiagnosticCode::MissingSection,
        DiagnosticCode::UnknownSection,
    ];

    pub fn severity(self) -> Severity {
        match self {
            DiagnosticCode::MissingSection | DiagnosticCode::UnknownSection => Severity::Warning,
            _ => Severity::Error,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::DanglingEndpoint => "DanglingEndpoint",
            DiagnosticCode::EndpointNotInView => "EndpointNotInView",
            DiagnosticCode::ForeignSource => "ForeignSource",
            DiagnosticCode::DuplicateRelation => "DuplicateRelation",
            DiagnosticCode::SelfLoop => "SelfLoop",
            DiagnosticCode::UnknownRelationType => "UnknownRelationType",
            DiagnosticCode::DirectionMismatch => "DirectionMismatch",
            DiagnosticCode::NonCanonicalEndpoints => "NonCanonicalEndpoints",
            DiagnosticCode::NotLanguageOwned => "NotLanguageOwned",
            DiagnosticCode::OwnershipMismatch => "OwnershipMismatch",
            DiagnosticCode::EmptyContext => "EmptyContext",
            DiagnosticCode::InvalidSchema => "InvalidSchema",
            DiagnosticCode::MissingSection => "MissingSection",
            DiagnosticCode::UnknownSection => "UnknownSection",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub subject: String,
    pub message: String,
}

impl Diagnostic {
    fn new(code: DiagnosticCode, subject: impl ToString, message: impl Into<String>) -> Self {
        Self {
            severity: code.severity(),
            code,
            subject: subject.to_string(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let severity = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{severity}\t{}\t{}\t{}", self.code, self.subject, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationScope {
    /// The languages, their patterns and the relations they own.
    Languages(Vec<LanguageId>),
    View(ViewId),
    /// Every language and view plus entities whose owner is missing.
    Repository,
}

/// Checks the repository invariants within `scope`. Never mutates; returns
/// diagnostics sorted and free of duplicates.
pub fn validate(repo: &Repository, scope: &ValidationScope) -> Result<Vec<Diagnostic>, GraphError> {
    let mut out = Vec::new();
    match scope {
        ValidationScope::Languages(ids) => {
            let ids: BTreeSet<&LanguageId> = ids.iter().collect();
            for id in &ids {
                let language = repo
                    .language(id.as_str())
                    .ok_or_else(|| GraphError::UnknownLanguage((*id).clone()))?;
                check_language(repo, language, &mut out);
            }
        }
        ValidationScope::View(id) => {
            let view = repo
                .view(id.as_str())
                .ok_or_else(|| GraphError::UnknownEntity(id.to_string()))?;
            check_view(repo, view, &mut out);
        }
        ValidationScope::Repository => {
            for language in repo.languages() {
                check_language(repo, language, &mut out);
            }
            for view in repo.views() {
                check_view(repo, view, &mut out);
            }
            check_orphans(repo, &mut out);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn check_language(repo: &Repository, language: &PatternLanguage, out: &mut Vec<Diagnostic>) {
    if let Err(detail) = check_schema(&language.section_schema, &language.relation_types) {
        out.push(Diagnostic::new(DiagnosticCode::InvalidSchema, &language.id, detail));
    }
    for pattern in repo.patterns_of(language.id.as_str()) {
        for issue in section_issues(language, &pattern.sections) {
            let code = match issue {
                SectionIssue::Missing(_) => DiagnosticCode::MissingSection,
                SectionIssue::Unknown(_) => DiagnosticCode::UnknownSection,
            };
            out.push(Diagnostic::new(code, &pattern.id, issue.describe()));
        }
    }
    let owner = RelationOwner::Language(language.id.clone());
    let owned: Vec<&Relation> = repo.relations_owned_by(&owner).collect();
    for relation in &owned {
        let declared = language.relation_type(&relation.relation_type).cloned();
        check_relation_shape(repo, relation, TypeLookup::Resolved(declared), out);
        let source = repo.pattern(relation.source_id.as_str());
        let target = repo.pattern(relation.target_id.as_str());
        let documented = |p: Option<&crate::model::Pattern>| p.is_some_and(|p| p.language_id == language.id);
        let foreign = if relation.directed {
            source.is_some() && !documented(source)
        } else {
            source.is_some() && target.is_some() && !documented(source) && !documented(target)
        };
        if foreign {
            out.push(Diagnostic::new(
                DiagnosticCode::ForeignSource,
                &relation.id,
                format!("`{}` is not a pattern of `{}`", relation.source_id, language.id),
            ));
        }
    }
    check_duplicates(&owned, out);
}

fn check_view(repo: &Repository, view: &PatternView, out: &mut Vec<Diagnostic>) {
    if view.context.trim().is_empty() {
        out.push(Diagnostic::new(
            DiagnosticCode::EmptyContext,
            &view.id,
            "view context is blank",
        ));
    }
    for member in &view.pattern_refs {
        if repo.pattern(member.as_str()).is_none() {
            out.push(Diagnostic::new(
                DiagnosticCode::DanglingEndpoint,
                &view.id,
                format!("member `{member}` does not exist"),
            ));
        }
    }
    for id in &view.referenced_relation_ids {
        let Some(relation) = repo.relation(id.as_str()) else {
            out.push(Diagnostic::new(
                DiagnosticCode::DanglingEndpoint,
                &view.id,
                format!("referenced relation `{id}` does not exist"),
            ));
            continue;
        };
        if let RelationOwner::View(owner) = &relation.owner {
            out.push(Diagnostic::new(
                DiagnosticCode::NotLanguageOwned,
                id,
                format!("referenced by `{}` but owned by view `{owner}`", view.id),
            ));
        }
        check_membership(repo, view, relation, out);
    }
    let mut owned = Vec::new();
    for id in &view.view_relation_ids {
        let Some(relation) = repo.relation(id.as_str()) else {
            out.push(Diagnostic::new(
                DiagnosticCode::DanglingEndpoint,
                &view.id,
                format!("view relation `{id}` does not exist"),
            ));
            continue;
        };
        if relation.owner != RelationOwner::View(view.id.clone()) {
            out.push(Diagnostic::new(
                DiagnosticCode::OwnershipMismatch,
                id,
                format!("listed by view `{}` but owned by {}", view.id, relation.owner),
            ));
            continue;
        }
        let vocabulary = match (
            repo.pattern(relation.source_id.as_str()),
            repo.pattern(relation.target_id.as_str()),
        ) {
            (Some(source), Some(target)) => {
                TypeLookup::Resolved(repo.view_relation_type(source, target, &relation.relation_type))
            }
            _ => TypeLookup::Unresolvable,
        };
        check_relation_shape(repo, relation, vocabulary, out);
        check_membership(repo, view, relation, out);
        owned.push(relation);
    }
    let owner = RelationOwner::View(view.id.clone());
    for relation in repo.relations_owned_by(&owner) {
        if !view.view_relation_ids.contains(&relation.id) {
            out.push(Diagnostic::new(
                DiagnosticCode::OwnershipMismatch,
                &relation.id,
                format!("owned by view `{}` but not listed by it", view.id),
            ));
        }
    }
    check_duplicates(&owned, out);
}

/// Outcome of looking up a relation's type in its owner's vocabulary. View
/// vocabularies depend on the endpoint languages, so they cannot be resolved
/// for dangling endpoints; those are reported as dangling only.
enum TypeLookup {
    Resolved(Option<RelationType>),
    Unresolvable,
}

/// Endpoint existence, loops, vocabulary, directedness and canonical order.
fn check_relation_shape(repo: &Repository, relation: &Relation, lookup: TypeLookup, out: &mut Vec<Diagnostic>) {
    for endpoint in [&relation.source_id, &relation.target_id] {
        if repo.pattern(endpoint.as_str()).is_none() {
            out.push(Diagnostic::new(
                DiagnosticCode::DanglingEndpoint,
                &relation.id,
                format!("endpoint `{endpoint}` does not exist"),
            ));
        }
    }
    if relation.source_id == relation.target_id {
        out.push(Diagnostic::new(
            DiagnosticCode::SelfLoop,
            &relation.id,
            "source equals target",
        ));
    }
    match lookup {
        TypeLookup::Unresolvable => {}
        TypeLookup::Resolved(None) => out.push(Diagnostic::new(
            DiagnosticCode::UnknownRelationType,
            &relation.id,
            format!(
                "type `{}` is not available to {}",
                relation.relation_type, relation.owner
            ),
        )),
        TypeLookup::Resolved(Some(ty)) if ty.directed != relation.directed => out.push(Diagnostic::new(
            DiagnosticCode::DirectionMismatch,
            &relation.id,
            format!("type `{}` has directed={}", ty.name, ty.directed),
        )),
        TypeLookup::Resolved(Some(_)) => {}
    }
    if !relation.is_canonical() {
        out.push(Diagnostic::new(
            DiagnosticCode::NonCanonicalEndpoints,
            &relation.id,
            "undirected endpoints must be in lexicographic order",
        ));
    }
}

fn check_membership(repo: &Repository, view: &PatternView, relation: &Relation, out: &mut Vec<Diagnostic>) {
    for endpoint in [&relation.source_id, &relation.target_id] {
        if repo.pattern(endpoint.as_str()).is_none() {
            out.push(Diagnostic::new(
                DiagnosticCode::DanglingEndpoint,
                &relation.id,
                format!("endpoint `{endpoint}` does not exist"),
            ));
        } else if !view.contains(endpoint) {
            out.push(Diagnostic::new(
                DiagnosticCode::EndpointNotInView,
                &relation.id,
                format!("endpoint `{endpoint}` is not a member of view `{}`", view.id),
            ));
        }
    }
}

fn check_duplicates(relations: &[&Relation], out: &mut Vec<Diagnostic>) {
    let mut groups: BTreeMap<_, Vec<&Relation>> = BTreeMap::new();
    for relation in relations {
        groups.entry(relation.identity_key()).or_default().push(relation);
    }
    for group in groups.values().filter(|g| g.len() > 1) {
        let first = &group[0].id;
        for duplicate in &group[1..] {
            out.push(Diagnostic::new(
                DiagnosticCode::DuplicateRelation,
                &duplicate.id,
                format!("duplicates relation `{first}`"),
            ));
        }
    }
}

fn check_orphans(repo: &Repository, out: &mut Vec<Diagnostic>) {
    for pattern in repo.patterns() {
        if repo.language(pattern.language_id.as_str()).is_none() {
            out.push(Diagnostic::new(
                DiagnosticCode::DanglingEndpoint,
                &pattern.id,
                format!("language `{}` does not exist", pattern.language_id),
            ));
        }
    }
    for relation in repo.relations() {
        let missing = match &relation.owner {
            RelationOwner::Language(id) => repo.language(id.as_str()).is_none(),
            RelationOwner::View(id) => repo.view(id.as_str()).is_none(),
        };
        if missing {
            out.push(Diagnostic::new(
                DiagnosticCode::DanglingEndpoint,
                &relation.id,
                format!("owner {} does not exist", relation.owner),
            ));
        }
    }
}
