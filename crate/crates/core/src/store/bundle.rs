//! Bundle format v1: one canonical-json document holding a whole repository.
//!
//! Bundles carry no version counters; every imported entity starts at 1.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::StoreError;
use crate::graph::{validate, ValidationScope};
use crate::model::{
    check_schema, section_issues, LanguageId, ModelError, Pattern, PatternId, PatternLanguage, PatternView, Relation,
    RelationId, RelationOwner, RelationType, Repository, SectionIssue, SectionSpec, ViewId,
};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Bundle {
    pub format_version: u64,
    pub languages: Vec<BundleLanguage>,
    pub views: Vec<BundleView>,
    pub manifest: Manifest,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BundleLanguage {
    pub id: LanguageId,
    pub name: String,
    pub domain_context: String,
    pub section_schema: Vec<SectionSpec>,
    pub relation_types: Vec<RelationType>,
    #[serde(default)]
    pub patterns: Vec<BundlePattern>,
    #[serde(default)]
    pub relations: Vec<BundleRelation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BundlePattern {
    pub id: PatternId,
    pub name: String,
    pub sections: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub icon_ref: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BundleRelation {
    pub id: RelationId,
    pub source_id: PatternId,
    pub target_id: PatternId,
    #[serde(rename = "type")]
    pub relation_type: String,
    pub directed: bool,
    #[serde(default)]
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BundleView {
    pub id: ViewId,
    pub name: String,
    pub context: String,
    #[serde(default)]
    pub pattern_refs: BTreeSet<PatternId>,
    #[serde(default)]
    pub referenced_relation_ids: BTreeSet<RelationId>,
    /// View-owned relations.
    #[serde(default)]
    pub relations: Vec<BundleRelation>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub languages: usize,
    pub patterns: usize,
    pub language_relations: usize,
    pub views: usize,
    pub view_relations: usize,
}

impl Bundle {
    pub fn to_canonical_json(&self) -> Vec<u8> {
        crate::canonical::to_vec(self).expect("bundles always serialize")
    }

    /// Parses a bundle, rejecting unknown `formatVersion`s before looking at
    /// anything else.
    pub fn from_json(bytes: &[u8]) -> Result<Self, StoreError> {
        let value: serde_json::Value =
            serde_json::from_slice(bytes).map_err(|e| StoreError::MalformedBundle(e.to_string()))?;
        match value.get("formatVersion").and_then(serde_json::Value::as_u64) {
            Some(FORMAT_VERSION) => {}
            Some(other) => return Err(StoreError::UnsupportedFormatVersion(other)),
            None => return Err(StoreError::MalformedBundle("missing integer `formatVersion`".into())),
        }
        serde_json::from_value(value).map_err(|e| StoreError::MalformedBundle(e.to_string()))
    }

    pub fn counted(&self) -> Manifest {
        Manifest {
            languages: self.languages.len(),
            patterns: self.languages.iter().map(|l| l.patterns.len()).sum(),
            language_relations: self.languages.iter().map(|l| l.relations.len()).sum(),
            views: self.views.len(),
            view_relations: self.views.iter().map(|v| v.relations.len()).sum(),
        }
    }
}

fn bundle_relation(relation: &Relation) -> BundleRelation {
    BundleRelation {
        id: relation.id.clone(),
        source_id: relation.source_id.clone(),
        target_id: relation.target_id.clone(),
        relation_type: relation.relation_type.clone(),
        directed: relation.directed,
        description: relation.description.clone(),
    }
}

/// Serializable form of `repo`. Patterns are grouped under their language and
/// relations under their owner; everything is sorted by id.
pub fn export_bundle(repo: &Repository) -> Bundle {
    let languages = repo
        .languages()
        .map(|language| {
            let owner = RelationOwner::Language(language.id.clone());
            BundleLanguage {
                id: language.id.clone(),
                name: language.name.clone(),
                domain_context: language.domain_context.clone(),
                section_schema: language.section_schema.clone(),
                relation_types: language.relation_types.clone(),
                patterns: repo
                    .patterns_of(language.id.as_str())
                    .map(|p| BundlePattern {
                        id: p.id.clone(),
                        name: p.name.clone(),
                        sections: p.sections.clone(),
                        icon_ref: p.icon_ref.clone(),
                    })
                    .collect(),
                relations: repo.relations_owned_by(&owner).map(bundle_relation).collect(),
            }
        })
        .collect();
    let views = repo
        .views()
        .map(|view| {
            let owner = RelationOwner::View(view.id.clone());
            BundleView {
                id: view.id.clone(),
                name: view.name.clone(),
                context: view.context.clone(),
                pattern_refs: view.pattern_refs.clone(),
                referenced_relation_ids: view.referenced_relation_ids.clone(),
                relations: repo.relations_owned_by(&owner).map(bundle_relation).collect(),
            }
        })
        .collect();
    let mut bundle = Bundle {
        format_version: FORMAT_VERSION,
        languages,
        views,
        manifest: Manifest::default(),
    };
    bundle.manifest = bundle.counted();
    bundle
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImportMode {
    #[default]
    Strict,
    Lenient,
}

impl std::str::FromStr for ImportMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(ImportMode::Strict),
            "lenient" => Ok(ImportMode::Lenient),
            other => Err(format!("unknown import mode `{other}` (expected strict or lenient)")),
        }
    }
}

/// A problem found during import. In lenient mode the offending item was
/// dropped, except for section problems, which are kept as warnings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportWarning {
    pub code: String,
    pub subject: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ImportReport {
    pub mode: ImportMode,
    pub imported: Manifest,
    pub warnings: Vec<ImportWarning>,
}

struct Importer {
    mode: ImportMode,
    repo: Repository,
    warnings: Vec<ImportWarning>,
}

impl Importer {
    /// Records a problem. Strict mode turns it into an error; `schema` marks
    /// section problems, which become `SchemaViolation`.
    fn reject(&mut self, code: &str, subject: &str, message: String, schema: bool) -> Result<(), StoreError> {
        if self.mode == ImportMode::Strict {
            let (subject, detail) = (subject.to_owned(), format!("{code}: {message}"));
            return Err(if schema {
                StoreError::SchemaViolation { subject, detail }
            } else {
                StoreError::IntegrityViolation { subject, detail }
            });
        }
        self.warnings.push(ImportWarning {
            code: code.to_owned(),
            subject: subject.to_owned(),
            message,
        });
        Ok(())
    }

    fn reject_model(&mut self, error: ModelError) -> Result<(), StoreError> {
        let message = error.to_string();
        self.reject(error.code(), &error.subject(), message, false)
    }

    fn relation(&self, owner: RelationOwner, r: &BundleRelation) -> Relation {
        Relation {
            id: r.id.clone(),
            owner,
            source_id: r.source_id.clone(),
            target_id: r.target_id.clone(),
            relation_type: r.relation_type.clone(),
            directed: r.directed,
            description: r.description.clone(),
            version: 1,
        }
    }

    /// Inserts a relation if it is valid against what has been imported so far.
    fn insert_relation(&mut self, relation: Relation) -> Result<bool, StoreError> {
        if self.repo.relation(relation.id.as_str()).is_some() {
            self.reject_model(ModelError::DuplicateId(relation.id.to_string()))?;
            return Ok(false);
        }
        if let Err(error) = self.repo.check_relation(&relation) {
            self.reject_model(error)?;
            return Ok(false);
        }
        self.repo.unchecked().insert_relation(relation);
        Ok(true)
    }

    fn languages(&mut self, languages: &[BundleLanguage]) -> Result<(), StoreError> {
        for bl in languages {
            if let Err(detail) = check_schema(&bl.section_schema, &bl.relation_types) {
                self.reject("InvalidSchema", bl.id.as_str(), detail, false)?;
                continue;
            }
            if bl.id.as_str().is_empty() || self.repo.language(bl.id.as_str()).is_some() {
                self.reject_model(ModelError::DuplicateId(bl.id.to_string()))?;
                continue;
            }
            let language = PatternLanguage {
                id: bl.id.clone(),
                name: bl.name.clone(),
                domain_context: bl.domain_context.clone(),
                section_schema: bl.section_schema.clone(),
                relation_types: bl.relation_types.clone(),
                version: 1,
            };
            for bp in &bl.patterns {
                if self.repo.pattern(bp.id.as_str()).is_some() {
                    self.reject_model(ModelError::DuplicateId(bp.id.to_string()))?;
                    continue;
                }
                for issue in section_issues(&language, &bp.sections) {
                    let code = match issue {
                        SectionIssue::Missing(_) => "MissingSection",
                        SectionIssue::Unknown(_) => "UnknownSection",
                    };
                    self.reject(code, bp.id.as_str(), issue.describe(), true)?;
                }
                self.repo.unchecked().insert_pattern(Pattern {
                    id: bp.id.clone(),
                    language_id: bl.id.clone(),
                    name: bp.name.clone(),
                    sections: bp.sections.clone(),
                    icon_ref: bp.icon_ref.clone(),
                    version: 1,
                });
            }
            self.repo.unchecked().insert_language(language);
        }
        // Relations last: cross-language targets may live in later languages.
        for bl in languages {
            if self.repo.language(bl.id.as_str()).is_none() {
                continue;
            }
            for br in &bl.relations {
                let relation = self.relation(RelationOwner::Language(bl.id.clone()), br);
                self.insert_relation(relation)?;
            }
        }
        Ok(())
    }

    fn views(&mut self, views: &[BundleView]) -> Result<(), StoreError> {
        for bv in views {
            if self.repo.view(bv.id.as_str()).is_some() || bv.id.as_str().is_empty() {
                self.reject_model(ModelError::DuplicateId(bv.id.to_string()))?;
                continue;
            }
            if bv.context.trim().is_empty() {
                self.reject_model(ModelError::EmptyContext(bv.id.clone()))?;
                continue;
            }
            let mut view = PatternView {
                id: bv.id.clone(),
                name: bv.name.clone(),
                context: bv.context.clone(),
                pattern_refs: BTreeSet::new(),
                referenced_relation_ids: BTreeSet::new(),
                view_relation_ids: BTreeSet::new(),
                version: 1,
            };
            for member in &bv.pattern_refs {
                if self.repo.pattern(member.as_str()).is_some() {
                    view.pattern_refs.insert(member.clone());
                } else {
                    self.reject_model(ModelError::UnknownEntity(member.to_string()))?;
                }
            }
            for id in &bv.referenced_relation_ids {
                let problem = match self.repo.relation(id.as_str()) {
                    None => Some(ModelError::UnknownEntity(id.to_string())),
                    Some(r) if !matches!(r.owner, RelationOwner::Language(_)) => {
                        Some(ModelError::NotLanguageOwned(id.clone()))
                    }
                    Some(r) => [&r.source_id, &r.target_id]
                        .into_iter()
                        .find(|p| !view.contains(p))
                        .map(|p| ModelError::EndpointNotInView {
                            view: view.id.clone(),
                            pattern: p.clone(),
                        }),
                };
                match problem {
                    Some(error) => self.reject_model(error)?,
                    None => {
                        view.referenced_relation_ids.insert(id.clone());
                    }
                }
            }
            self.repo.unchecked().insert_view(view);
            for br in &bv.relations {
                let relation = self.relation(RelationOwner::View(bv.id.clone()), br);
                let id = relation.id.clone();
                if self.insert_relation(relation)? {
                    if let Some(view) = self.repo.unchecked().view_mut(bv.id.as_str()) {
                        view.view_relation_ids.insert(id);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Builds a repository from a bundle. Strict mode fails on the first problem;
/// lenient mode drops what cannot be imported and reports it.
pub fn import_bundle(bundle: &Bundle, mode: ImportMode) -> Result<(Repository, ImportReport), StoreError> {
    if bundle.format_version != FORMAT_VERSION {
        return Err(StoreError::UnsupportedFormatVersion(bundle.format_version));
    }
    let mut importer = Importer {
        mode,
        repo: Repository::new(),
        warnings: Vec::new(),
    };
    let counted = bundle.counted();
    if counted != bundle.manifest {
        importer.reject(
            "ManifestMismatch",
            "manifest",
            format!("manifest says {:?} but the bundle holds {:?}", bundle.manifest, counted),
            false,
        )?;
    }
    importer.languages(&bundle.languages)?;
    importer.views(&bundle.views)?;

    // Anything the item checks above missed.
    let diagnostics = validate(&importer.repo, &ValidationScope::Repository).expect("repository scope");
    if let Some(error) = diagnostics.iter().find(|d| d.is_error()) {
        return Err(StoreError::IntegrityViolation {
            subject: error.subject.clone(),
            detail: format!("{}: {}", error.code, error.message),
        });
    }
    let imported = export_bundle(&importer.repo).manifest;
    let report = ImportReport {
        mode,
        imported,
        warnings: importer.warnings,
    };
    Ok((importer.repo, report))
}
