//! Versioned entity storage and the bundle format.
//!
//! The store keeps the repository as an immutable snapshot behind an `Arc`.
//! Writers are serialized; each transaction edits a private copy, persists it
//! and then publishes it, so readers only ever see committed states. With a
//! path the state is written to a canonical-json file by atomic rename.

mod bundle;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bundle::{
    export_bundle, import_bundle, Bundle, BundleLanguage, BundlePattern, BundleRelation, BundleView, ImportMode,
    ImportReport, ImportWarning, Manifest, FORMAT_VERSION,
};

use crate::graph::{validate, Diagnostic, ValidationScope};
use crate::model::{
    section_issues, LanguageId, ModelError, Pattern, PatternLanguage, PatternView, Relation, RelationOwner, Repository,
    SectionIssue,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("`{0}` not found")]
    NotFound(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("version conflict on `{entity}`: expected {}, stored {actual}", display_expected(.expected))]
    VersionConflict {
        entity: String,
        expected: Option<u64>,
        actual: u64,
    },
    #[error("integrity violation on `{subject}`: {detail}")]
    IntegrityViolation { subject: String, detail: String },
    #[error("schema violation on `{subject}`: {detail}")]
    SchemaViolation { subject: String, detail: String },
    #[error("bundles can only be imported into an empty store")]
    NonEmptyStore,
    #[error("unsupported bundle formatVersion {0} (supported: 1)")]
    UnsupportedFormatVersion(u64),
    #[error("malformed bundle: {0}")]
    MalformedBundle(String),
    #[error("storage I/O failed: {0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn display_expected(expected: &Option<u64>) -> String {
    expected.map_or_else(|| "none".to_owned(), |v| v.to_string())
}

impl StoreError {
    pub fn code(&self) -> &'static str {
        match self {
            StoreError::NotFound(_) => "NotFound",
            StoreError::UnknownEntity(_) => "UnknownEntity",
            StoreError::VersionConflict { .. } => "VersionConflict",
            StoreError::IntegrityViolation { .. } => "IntegrityViolation",
            StoreError::SchemaViolation { .. } => "SchemaViolation",
            StoreError::NonEmptyStore => "NonEmptyStore",
            StoreError::UnsupportedFormatVersion(_) => "UnsupportedFormatVersion",
            StoreError::MalformedBundle(_) => "MalformedBundle",
            StoreError::Io(_) => "Io",
            StoreError::Model(e) => e.code(),
        }
    }

    pub fn subject(&self) -> String {
        match self {
            StoreError::NotFound(id) | StoreError::UnknownEntity(id) => id.clone(),
            StoreError::VersionConflict { entity, .. } => entity.clone(),
            StoreError::IntegrityViolation { subject, .. } | StoreError::SchemaViolation { subject, .. } => {
                subject.clone()
            }
            StoreError::UnsupportedFormatVersion(v) => v.to_string(),
            StoreError::NonEmptyStore | StoreError::MalformedBundle(_) | StoreError::Io(_) => String::new(),
            StoreError::Model(e) => e.subject(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Language,
    Pattern,
    Relation,
    View,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntityRef {
    pub kind: EntityKind,
    pub id: String,
}

impl EntityRef {
    pub fn new(kind: EntityKind, id: impl Into<String>) -> Self {
        Self { kind, id: id.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entity {
    Language(PatternLanguage),
    Pattern(Pattern),
    Relation(Relation),
    View(PatternView),
}

impl Entity {
    pub fn reference(&self) -> EntityRef {
        match self {
            Entity::Language(l) => EntityRef::new(EntityKind::Language, l.id.as_str()),
            Entity::Pattern(p) => EntityRef::new(EntityKind::Pattern, p.id.as_str()),
            Entity::Relation(r) => EntityRef::new(EntityKind::Relation, r.id.as_str()),
            Entity::View(v) => EntityRef::new(EntityKind::View, v.id.as_str()),
        }
    }

    pub fn version(&self) -> u64 {
        match self {
            Entity::Language(l) => l.version,
            Entity::Pattern(p) => p.version,
            Entity::Relation(r) => r.version,
            Entity::View(v) => v.version,
        }
    }

    fn set_version(&mut self, version: u64) {
        match self {
            Entity::Language(l) => l.version = version,
            Entity::Pattern(p) => p.version = version,
            Entity::Relation(r) => r.version = version,
            Entity::View(v) => v.version = version,
        }
    }
}

/// An entity id together with the version a write produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VersionToken {
    pub entity_id: String,
    pub version: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ListFilter {
    /// Patterns of this language, or relations it owns.
    pub language: Option<LanguageId>,
    /// Relations with this owner.
    pub owner: Option<RelationOwner>,
}

pub fn lookup(repo: &Repository, entity: &EntityRef) -> Option<Entity> {
    let id = entity.id.as_str();
    match entity.kind {
        EntityKind::Language => repo.language(id).cloned().map(Entity::Language),
        EntityKind::Pattern => repo.pattern(id).cloned().map(Entity::Pattern),
        EntityKind::Relation => repo.relation(id).cloned().map(Entity::Relation),
        EntityKind::View => repo.view(id).cloned().map(Entity::View),
    }
}

/// Compare-and-set precondition: the entity exists and is at `expected`.
pub fn check_version(repo: &Repository, entity: &EntityRef, expected: Option<u64>) -> Result<u64, StoreError> {
    let stored = lookup(repo, entity)
        .ok_or_else(|| StoreError::NotFound(entity.id.clone()))?
        .version();
    if expected != Some(stored) {
        return Err(StoreError::VersionConflict {
            entity: entity.id.clone(),
            expected,
            actual: stored,
        });
    }
    Ok(stored)
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct StateFile {
    format_version: u64,
    repository: Repository,
}

pub struct Store {
    current: RwLock<Arc<Repository>>,
    writer: Mutex<()>,
    path: Option<PathBuf>,
}

impl Store {
    pub fn in_memory() -> Self {
        Self::with_state(Repository::new(), None)
    }

    /// Opens the state file at `path`, starting empty if it does not exist.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let repo = match fs::read(&path) {
            Ok(bytes) => {
                let state: StateFile =
                    serde_json::from_slice(&bytes).map_err(|e| StoreError::Io(format!("{}: {e}", path.display())))?;
                if state.format_version != FORMAT_VERSION {
                    return Err(StoreError::UnsupportedFormatVersion(state.format_version));
                }
                state.repository
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Repository::new(),
            Err(e) => return Err(StoreError::Io(format!("{}: {e}", path.display()))),
        };
        Ok(Self::with_state(repo, Some(path)))
    }

    fn with_state(repo: Repository, path: Option<PathBuf>) -> Self {
        Self {
            current: RwLock::new(Arc::new(repo)),
            writer: Mutex::new(()),
            path,
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// The latest committed state. Later writes never change it.
    pub fn snapshot(&self) -> Arc<Repository> {
        Arc::clone(&self.current.read().unwrap_or_else(|e| e.into_inner()))
    }

    /// Runs `edit` against a copy of the current state and commits the copy
    /// if `edit` succeeds. Transactions are serialized.
    pub fn transact<T, E>(&self, edit: impl FnOnce(&mut Repository) -> Result<T, E>) -> Result<T, StoreError>
    where
        E: Into<StoreError>,
    {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut next = Repository::clone(&self.snapshot());
        let value = edit(&mut next).map_err(Into::into)?;
        if let Some(path) = &self.path {
            persist(path, &next)?;
        }
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
        Ok(value)
    }

    /// Creates (`expected = None`) or replaces (`expected = Some(current)`)
    /// one entity. The write must not introduce any new error diagnostic.
    pub fn put(&self, entity: Entity, expected: Option<u64>) -> Result<VersionToken, StoreError> {
        self.transact(|repo| put_entity(repo, entity, expected))
    }

    pub fn get(&self, entity: &EntityRef) -> Result<Entity, StoreError> {
        lookup(&self.snapshot(), entity).ok_or_else(|| StoreError::NotFound(entity.id.clone()))
    }

    /// Entities of one kind sorted by id.
    pub fn list(&self, kind: EntityKind, filter: &ListFilter) -> Vec<Entity> {
        let repo = self.snapshot();
        let language = filter.language.as_ref();
        match kind {
            EntityKind::Language => repo.languages().cloned().map(Entity::Language).collect(),
            EntityKind::Pattern => repo
                .patterns()
                .filter(|p| language.is_none_or(|l| &p.language_id == l))
                .cloned()
                .map(Entity::Pattern)
                .collect(),
            EntityKind::Relation => repo
                .relations()
                .filter(|r| language.is_none_or(|l| r.owner == RelationOwner::Language(l.clone())))
                .filter(|r| filter.owner.as_ref().is_none_or(|o| &r.owner == o))
                .cloned()
                .map(Entity::Relation)
                .collect(),
            EntityKind::View => repo.views().cloned().map(Entity::View).collect(),
        }
    }

    /// Deletes one entity at version `expected`. Patterns that are view
    /// members are refused; relations are removed from every view listing them.
    pub fn delete(&self, entity: &EntityRef, expected: Option<u64>) -> Result<(), StoreError> {
        self.transact(|repo| {
            check_version(repo, entity, expected)?;
            delete_entity(repo, entity)
        })
    }

    pub fn export(&self) -> Bundle {
        export_bundle(&self.snapshot())
    }

    pub fn import(&self, bundle: &Bundle, mode: ImportMode) -> Result<ImportReport, StoreError> {
        self.transact(|repo| {
            if !repo.is_empty() {
                return Err(StoreError::NonEmptyStore);
            }
            let (imported, report) = import_bundle(bundle, mode)?;
            *repo = imported;
            Ok(report)
        })
    }
}

fn persist(path: &Path, repo: &Repository) -> Result<(), StoreError> {
    let io = |e: std::io::Error| StoreError::Io(format!("{}: {e}", path.display()));
    let state = StateFile {
        format_version: FORMAT_VERSION,
        repository: repo.clone(),
    };
    let bytes = crate::canonical::to_vec(&state).map_err(|e| StoreError::Io(e.to_string()))?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut file = fs::File::create(&tmp).map_err(io)?;
        file.write_all(&bytes).map_err(io)?;
        file.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}

fn errors(repo: &Repository) -> BTreeSet<Diagnostic> {
    validate(repo, &ValidationScope::Repository)
        .expect("repository scope always resolves")
        .into_iter()
        .filter(Diagnostic::is_error)
        .collect()
}

fn immutable(subject: &str, field: &'static str) -> StoreError {
    StoreError::Model(ModelError::ImmutableField {
        subject: subject.to_owned(),
        field,
    })
}

fn put_entity(repo: &mut Repository, mut entity: Entity, expected: Option<u64>) -> Result<VersionToken, StoreError> {
    let reference = entity.reference();
    let existing = lookup(repo, &reference);
    let version = match (&existing, expected) {
        (Some(stored), Some(e)) if stored.version() == e => e + 1,
        (Some(stored), e) => {
            return Err(StoreError::VersionConflict {
                entity: reference.id,
                expected: e,
                actual: stored.version(),
            })
        }
        (None, Some(_)) => return Err(StoreError::UnknownEntity(reference.id)),
        (None, None) => 1,
    };
    if reference.id.trim().is_empty() {
        return Err(StoreError::IntegrityViolation {
            subject: reference.id,
            detail: "empty id".into(),
        });
    }
    entity.set_version(version);

    match (&entity, &existing) {
        (Entity::Pattern(new), Some(Entity::Pattern(old))) if new.language_id != old.language_id => {
            return Err(immutable(&reference.id, "languageId"));
        }
        (Entity::Relation(new), Some(Entity::Relation(old))) if new.owner != old.owner => {
            return Err(immutable(&reference.id, "owner"));
        }
        _ => {}
    }
    let integrity = |error: ModelError| StoreError::IntegrityViolation {
        subject: error.subject(),
        detail: format!("{}: {error}", error.code()),
    };
    match &entity {
        Entity::Pattern(pattern) => {
            let language = repo
                .language(pattern.language_id.as_str())
                .ok_or_else(|| integrity(ModelError::UnknownLanguage(pattern.language_id.clone())))?;
            let issues = section_issues(language, &pattern.sections);
            if !issues.is_empty() {
                let detail = issues.iter().map(SectionIssue::describe).collect::<Vec<_>>().join("; ");
                return Err(StoreError::SchemaViolation {
                    subject: reference.id,
                    detail,
                });
            }
        }
        Entity::Relation(relation) => repo.check_relation(relation).map_err(integrity)?,
        Entity::Language(_) | Entity::View(_) => {}
    }

    let before = errors(repo);
    let mut edit = repo.unchecked();
    match entity {
        Entity::Language(language) => {
            edit.insert_language(language);
        }
        Entity::Pattern(pattern) => {
            edit.insert_pattern(pattern);
        }
        Entity::Relation(relation) => {
            if let RelationOwner::View(view) = &relation.owner {
                if let Some(view) = edit.view_mut(view.as_str()) {
                    view.view_relation_ids.insert(relation.id.clone());
                }
            }
            edit.insert_relation(relation);
        }
        Entity::View(view) => {
            edit.insert_view(view);
        }
    }
    if let Some(new) = errors(repo).difference(&before).next() {
        return Err(StoreError::IntegrityViolation {
            subject: new.subject.clone(),
            detail: format!("{}: {}", new.code, new.message),
        });
    }
    Ok(VersionToken {
        entity_id: reference.id,
        version,
    })
}

fn delete_entity(repo: &mut Repository, entity: &EntityRef) -> Result<(), StoreError> {
    let id = entity.id.as_str();
    match entity.kind {
        EntityKind::Language => repo.delete_language(&id.into())?,
        EntityKind::Pattern => {
            repo.delete_pattern(&id.into(), false)?;
        }
        EntityKind::View => {
            repo.delete_view(&id.into())?;
        }
        EntityKind::Relation => {
            let listing: Vec<_> = repo
                .views()
                .filter(|v| v.relation_ids().any(|r| r.as_str() == id))
                .map(|v| v.id.clone())
                .collect();
            let mut edit = repo.unchecked();
            for view in listing {
                let view = edit.view_mut(view.as_str()).expect("listed above");
                view.referenced_relation_ids.remove(id);
                view.view_relation_ids.remove(id);
                view.version += 1;
            }
            edit.remove_relation(id);
        }
    }
    Ok(())
}
