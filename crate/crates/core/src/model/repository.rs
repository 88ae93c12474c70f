use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::error::ModelError;
use super::ids::{slugify, LanguageId, PatternId, RelationId, ViewId};
use super::types::{
    canonical_endpoints, global_relation_types, Pattern, PatternLanguage, PatternView, Relation, RelationClass,
    RelationOwner, RelationType, SectionSpec, Span,
};

type Result<T> = std::result::Result<T, ModelError>;

/// How section schema violations are treated when a pattern is written.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemaMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectionIssue {
    Missing(String),
    Unknown(String),
}

impl SectionIssue {
    pub fn describe(&self) -> String {
        match self {
            SectionIssue::Missing(name) => format!("required section `{name}` is missing or empty"),
            SectionIssue::Unknown(name) => format!("section `{name}` is not part of the schema"),
        }
    }
}

/// Required sections that are absent or blank, then sections unknown to the schema.
pub fn section_issues(language: &PatternLanguage, sections: &BTreeMap<String, String>) -> Vec<SectionIssue> {
    let missing = language
        .section_schema
        .iter()
        .filter(|spec| spec.required)
        .filter(|spec| sections.get(&spec.name).is_none_or(|text| text.trim().is_empty()))
        .map(|spec| SectionIssue::Missing(spec.name.clone()));
    let unknown = sections
        .keys()
        .filter(|name| language.section(name).is_none())
        .map(|name| SectionIssue::Unknown(name.clone()));
    missing.chain(unknown).collect()
}

/// Language schema invariants; the error string names the first violation.
pub fn check_schema(
    section_schema: &[SectionSpec],
    relation_types: &[RelationType],
) -> std::result::Result<(), String> {
    if !section_schema.iter().any(|s| s.required) {
        return Err("the section schema needs at least one required section".into());
    }
    let mut seen = BTreeSet::new();
    for spec in section_schema {
        if spec.name.trim().is_empty() {
            return Err("section names must be non-empty".into());
        }
        if !seen.insert(spec.name.as_str()) {
            return Err(format!("section `{}` is declared twice", spec.name));
        }
    }
    let mut seen = BTreeSet::new();
    for ty in relation_types {
        if ty.name.trim().is_empty() {
            return Err("relation type names must be non-empty".into());
        }
        if !seen.insert(ty.name.as_str()) {
            return Err(format!("relation type `{}` is declared twice", ty.name));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NewLanguage {
    pub name: String,
    pub domain_context: String,
    pub section_schema: Vec<SectionSpec>,
    pub relation_types: Vec<RelationType>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NewPattern {
    pub name: String,
    pub sections: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub icon_ref: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NewRelation {
    pub source_id: PatternId,
    pub target_id: PatternId,
    #[serde(rename = "type")]
    pub relation_type: String,
    #[serde(default)]
    pub description: String,
}

/// Outcome of deleting a pattern; lists the views a forced delete touched.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternDeletion {
    pub removed_relations: Vec<RelationId>,
    pub updated_views: Vec<ViewId>,
}

/// The complete set of languages, patterns, relations and views.
///
/// Every public mutation either succeeds completely or leaves the repository
/// untouched. Successful mutations bump the version of the one existing
/// entity they change; newly created entities start at version 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Repository {
    languages: BTreeMap<LanguageId, PatternLanguage>,
    patterns: BTreeMap<PatternId, Pattern>,
    relations: BTreeMap<RelationId, Relation>,
    views: BTreeMap<ViewId, PatternView>,
}

impl Repository {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.languages.is_empty() && self.patterns.is_empty() && self.relations.is_empty() && self.views.is_empty()
    }

    pub fn language(&self, id: &str) -> Option<&PatternLanguage> {
        self.languages.get(id)
    }

    pub fn languages(&self) -> impl Iterator<Item = &PatternLanguage> {
        self.languages.values()
    }

    pub fn pattern(&self, id: &str) -> Option<&Pattern> {
        self.patterns.get(id)
    }

    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.patterns.values()
    }

    pub fn patterns_of<'a>(&'a self, language: &'a str) -> impl Iterator<Item = &'a Pattern> + 'a {
        self.patterns
            .values()
            .filter(move |p| p.language_id.as_str() == language)
    }

    pub fn relation(&self, id: &str) -> Option<&Relation> {
        self.relations.get(id)
    }

    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.values()
    }

    pub fn relations_owned_by<'a>(&'a self, owner: &'a RelationOwner) -> impl Iterator<Item = &'a Relation> + 'a {
        self.relations.values().filter(move |r| &r.owner == owner)
    }

    pub fn view(&self, id: &str) -> Option<&PatternView> {
        self.views.get(id)
    }

    pub fn views(&self) -> impl Iterator<Item = &PatternView> {
        self.views.values()
    }

    pub fn views_containing(&self, pattern: &PatternId) -> Vec<ViewId> {
        self.views
            .values()
            .filter(|v| v.contains(pattern))
            .map(|v| v.id.clone())
            .collect()
    }

    /// Raw table access that bypasses every invariant check. Used by bundle
    /// import, generic updates and for constructing broken states in tests.
    pub fn unchecked(&mut self) -> UncheckedEdit<'_> {
        UncheckedEdit(self)
    }

    pub fn create_language(&mut self, new: NewLanguage) -> Result<PatternLanguage> {
        let slug = slugify(&new.name);
        if slug.is_empty() {
            return Err(ModelError::InvalidName(new.name));
        }
        let id = LanguageId::new(slug);
        check_schema(&new.section_schema, &new.relation_types)
            .map_err(|detail| ModelError::InvalidSchema(format!("{id}: {detail}")))?;
        if self.languages.contains_key(&id) {
            return Err(ModelError::DuplicateId(id.to_string()));
        }
        let language = PatternLanguage {
            id: id.clone(),
            name: new.name,
            domain_context: new.domain_context,
            section_schema: new.section_schema,
            relation_types: new.relation_types,
            version: 1,
        };
        self.languages.insert(id, language.clone());
        Ok(language)
    }

    pub fn add_pattern(&mut self, language_id: &LanguageId, new: NewPattern, mode: SchemaMode) -> Result<Pattern> {
        let language = self
            .languages
            .get(language_id)
            .ok_or_else(|| ModelError::UnknownLanguage(language_id.clone()))?;
        let slug = slugify(&new.name);
        if slug.is_empty() {
            return Err(ModelError::InvalidName(new.name));
        }
        let id = PatternId::scoped(language_id, &slug);
        if mode == SchemaMode::Strict {
            let issues = section_issues(language, &new.sections);
            if !issues.is_empty() {
                let detail = issues.iter().map(SectionIssue::describe).collect::<Vec<_>>().join("; ");
                return Err(ModelError::SchemaViolation {
                    pattern: id.to_string(),
                    detail,
                });
            }
        }
        if self.patterns.contains_key(&id) {
            return Err(ModelError::DuplicateId(id.to_string()));
        }
        let pattern = Pattern {
            id: id.clone(),
            language_id: language_id.clone(),
            name: new.name,
            sections: new.sections,
            icon_ref: new.icon_ref,
            version: 1,
        };
        self.patterns.insert(id, pattern.clone());
        Ok(pattern)
    }

    pub fn add_language_relation(&mut self, language_id: &LanguageId, new: NewRelation) -> Result<Relation> {
        let language = self
            .languages
            .get(language_id)
            .ok_or_else(|| ModelError::UnknownEntity(language_id.to_string()))?;
        let directed = language
            .relation_type(&new.relation_type)
            .ok_or_else(|| ModelError::UnknownRelationType {
                relation_type: new.relation_type.clone(),
                scope: format!("language `{language_id}`"),
            })?
            .directed;
        let relation = self.build_relation(RelationOwner::Language(language_id.clone()), new, directed)?;
        self.relations.insert(relation.id.clone(), relation.clone());
        Ok(relation)
    }

    pub fn create_view(&mut self, name: &str, context: &str) -> Result<PatternView> {
        let slug = slugify(name);
        if slug.is_empty() {
            return Err(ModelError::InvalidName(name.to_owned()));
        }
        let id = ViewId::new(slug);
        if context.trim().is_empty() {
            return Err(ModelError::EmptyContext(id));
        }
        if self.views.contains_key(&id) {
            return Err(ModelError::DuplicateId(id.to_string()));
        }
        let view = PatternView {
            id: id.clone(),
            name: name.to_owned(),
            context: context.to_owned(),
            pattern_refs: BTreeSet::new(),
            referenced_relation_ids: BTreeSet::new(),
            view_relation_ids: BTreeSet::new(),
            version: 1,
        };
        self.views.insert(id, view.clone());
        Ok(view)
    }

    pub fn add_pattern_to_view(&mut self, view_id: &ViewId, pattern_id: &PatternId) -> Result<PatternView> {
        let view = self.existing_view(view_id)?;
        if !self.patterns.contains_key(pattern_id) {
            return Err(ModelError::UnknownEntity(pattern_id.to_string()));
        }
        if view.contains(pattern_id) {
            return Err(ModelError::AlreadyMember {
                view: view_id.clone(),
                pattern: pattern_id.clone(),
            });
        }
        let view = self.views.get_mut(view_id).expect("checked above");
        view.pattern_refs.insert(pattern_id.clone());
        view.version += 1;
        Ok(view.clone())
    }

    pub fn reference_relation_in_view(&mut self, view_id: &ViewId, relation_id: &RelationId) -> Result<PatternView> {
        let view = self.existing_view(view_id)?;
        let relation = self
            .relations
            .get(relation_id)
            .ok_or_else(|| ModelError::UnknownEntity(relation_id.to_string()))?;
        if !matches!(relation.owner, RelationOwner::Language(_)) {
            return Err(ModelError::NotLanguageOwned(relation_id.clone()));
        }
        for endpoint in [&relation.source_id, &relation.target_id] {
            if !view.contains(endpoint) {
                return Err(ModelError::EndpointNotInView {
                    view: view_id.clone(),
                    pattern: endpoint.clone(),
                });
            }
        }
        if view.referenced_relation_ids.contains(relation_id) {
            return Err(ModelError::AlreadyReferenced {
                view: view_id.clone(),
                relation: relation_id.clone(),
            });
        }
        let view = self.views.get_mut(view_id).expect("checked above");
        view.referenced_relation_ids.insert(relation_id.clone());
        view.version += 1;
        Ok(view.clone())
    }

    /// Adds a relation owned by the view. Returns the new relation and the
    /// updated view.
    pub fn add_view_relation(&mut self, view_id: &ViewId, new: NewRelation) -> Result<(Relation, PatternView)> {
        self.existing_view(view_id)?;
        if new.source_id == new.target_id {
            return Err(ModelError::SelfLoop(new.source_id));
        }
        let source = self.existing_pattern(&new.source_id)?;
        let target = self.existing_pattern(&new.target_id)?;
        let ty = self
            .view_relation_type(source, target, &new.relation_type)
            .ok_or_else(|| ModelError::UnknownRelationType {
                relation_type: new.relation_type.clone(),
                scope: format!("view `{view_id}`"),
            })?;
        let relation = self.build_relation(RelationOwner::View(view_id.clone()), new, ty.directed)?;
        self.relations.insert(relation.id.clone(), relation.clone());
        let view = self.views.get_mut(view_id).expect("checked above");
        view.view_relation_ids.insert(relation.id.clone());
        view.version += 1;
        Ok((relation, view.clone()))
    }

    pub fn remove_pattern_from_view(
        &mut self,
        view_id: &ViewId,
        pattern_id: &PatternId,
        cascade: bool,
    ) -> Result<PatternView> {
        let view = self.existing_view(view_id)?;
        if !view.contains(pattern_id) {
            return Err(ModelError::NotMember {
                view: view_id.clone(),
                pattern: pattern_id.clone(),
            });
        }
        let incident = |id: &RelationId| self.relations.get(id).is_some_and(|r| r.touches(pattern_id));
        let referenced: Vec<RelationId> = view
            .referenced_relation_ids
            .iter()
            .filter(|id| incident(id))
            .cloned()
            .collect();
        let owned: Vec<RelationId> = view
            .view_relation_ids
            .iter()
            .filter(|id| incident(id))
            .cloned()
            .collect();
        if !cascade && !(referenced.is_empty() && owned.is_empty()) {
            let relations = referenced.into_iter().chain(owned).collect();
            return Err(ModelError::WouldOrphanRelations {
                view: view_id.clone(),
                pattern: pattern_id.clone(),
                relations,
            });
        }
        for id in &owned {
            self.relations.remove(id);
        }
        let view = self.views.get_mut(view_id).expect("checked above");
        for id in &referenced {
            view.referenced_relation_ids.remove(id);
        }
        for id in &owned {
            view.view_relation_ids.remove(id);
        }
        view.pattern_refs.remove(pattern_id);
        view.version += 1;
        Ok(view.clone())
    }

    pub fn classify_relation(&self, relation_id: &RelationId) -> Result<RelationClass> {
        let relation = self
            .relations
            .get(relation_id)
            .ok_or_else(|| ModelError::UnknownEntity(relation_id.to_string()))?;
        Ok(self.classify(relation))
    }

    pub fn classify(&self, relation: &Relation) -> RelationClass {
        let source = self.language_of(&relation.source_id);
        let target = self.language_of(&relation.target_id);
        RelationClass {
            span: Span::between(&source, &target),
            ownership: relation.owner.ownership(),
        }
    }

    /// Language of a pattern; falls back to the id prefix for missing patterns.
    pub fn language_of(&self, pattern: &PatternId) -> LanguageId {
        self.patterns
            .get(pattern)
            .map(|p| p.language_id.clone())
            .unwrap_or_else(|| LanguageId::from(pattern.language_prefix()))
    }

    /// Deletes a pattern together with the language-owned relations touching it.
    /// Without `force` the pattern must not be a member of any view; with
    /// `force` it is removed from every view first, cascading its relations.
    pub fn delete_pattern(&mut self, pattern_id: &PatternId, force: bool) -> Result<PatternDeletion> {
        self.existing_pattern(pattern_id)?;
        let views = self.views_containing(pattern_id);
        if !views.is_empty() && !force {
            return Err(ModelError::PatternInUse {
                pattern: pattern_id.clone(),
                views,
            });
        }
        let mut staged = self.clone();
        let mut deletion = PatternDeletion::default();
        for view_id in &views {
            let before: BTreeSet<RelationId> = staged.views[view_id].view_relation_ids.iter().cloned().collect();
            staged.remove_pattern_from_view(view_id, pattern_id, true)?;
            let after = &staged.views[view_id].view_relation_ids;
            deletion
                .removed_relations
                .extend(before.into_iter().filter(|id| !after.contains(id)));
            deletion.updated_views.push(view_id.clone());
        }
        let doomed: Vec<RelationId> = staged
            .relations
            .values()
            .filter(|r| r.touches(pattern_id))
            .map(|r| r.id.clone())
            .collect();
        for id in doomed {
            staged.relations.remove(&id);
            deletion.removed_relations.push(id);
        }
        staged.patterns.remove(pattern_id);
        deletion.removed_relations.sort();
        *self = staged;
        Ok(deletion)
    }

    pub fn delete_language(&mut self, language_id: &LanguageId) -> Result<()> {
        if !self.languages.contains_key(language_id) {
            return Err(ModelError::UnknownEntity(language_id.to_string()));
        }
        if self.patterns_of(language_id.as_str()).next().is_some() {
            return Err(ModelError::LanguageNotEmpty(language_id.clone()));
        }
        let owner = RelationOwner::Language(language_id.clone());
        self.relations.retain(|_, r| r.owner != owner);
        self.languages.remove(language_id);
        Ok(())
    }

    /// Deletes a view and every relation it owns. Languages are untouched.
    pub fn delete_view(&mut self, view_id: &ViewId) -> Result<PatternView> {
        let view = self
            .views
            .remove(view_id)
            .ok_or_else(|| ModelError::UnknownEntity(view_id.to_string()))?;
        let owner = RelationOwner::View(view_id.clone());
        self.relations.retain(|_, r| r.owner != owner);
        Ok(view)
    }

    /// Relation types a view may use between two patterns: the source
    /// language's, then the target language's, then the global vocabulary.
    pub fn view_relation_type(&self, source: &Pattern, target: &Pattern, name: &str) -> Option<RelationType> {
        [&source.language_id, &target.language_id]
            .into_iter()
            .filter_map(|id| self.languages.get(id))
            .find_map(|language| language.relation_type(name).cloned())
            .or_else(|| global_relation_types().into_iter().find(|t| t.name == name))
    }

    /// Checks every invariant a stored relation must satisfy against the
    /// current state, ignoring a stored relation with the same id.
    pub fn check_relation(&self, relation: &Relation) -> Result<()> {
        match &relation.owner {
            RelationOwner::Language(id) if !self.languages.contains_key(id) => {
                return Err(ModelError::UnknownEntity(id.to_string()))
            }
            RelationOwner::View(id) if !self.views.contains_key(id) => {
                return Err(ModelError::UnknownEntity(id.to_string()))
            }
            _ => {}
        }
        if relation.source_id == relation.target_id {
            return Err(ModelError::SelfLoop(relation.source_id.clone()));
        }
        let source = self.existing_pattern(&relation.source_id)?;
        let declared = match &relation.owner {
            RelationOwner::Language(language_id) => {
                let language = &self.languages[language_id];
                let ty =
                    language
                        .relation_type(&relation.relation_type)
                        .ok_or_else(|| ModelError::UnknownRelationType {
                            relation_type: relation.relation_type.clone(),
                            scope: format!("language `{language_id}`"),
                        })?;
                if ty.directed && &source.language_id != language_id {
                    return Err(ModelError::ForeignSource {
                        source_id: source.id.clone(),
                        language: language_id.clone(),
                    });
                }
                let target = self.existing_pattern(&relation.target_id)?;
                if !ty.directed && &source.language_id != language_id && &target.language_id != language_id {
                    return Err(ModelError::ForeignSource {
                        source_id: source.id.clone(),
                        language: language_id.clone(),
                    });
                }
                ty.clone()
            }
            RelationOwner::View(view_id) => {
                let target = self.existing_pattern(&relation.target_id)?;
                let view = &self.views[view_id];
                for endpoint in [&relation.source_id, &relation.target_id] {
                    if !view.contains(endpoint) {
                        return Err(ModelError::EndpointNotInView {
                            view: view_id.clone(),
                            pattern: endpoint.clone(),
                        });
                    }
                }
                self.view_relation_type(source, target, &relation.relation_type)
                    .ok_or_else(|| ModelError::UnknownRelationType {
                        relation_type: relation.relation_type.clone(),
                        scope: format!("view `{view_id}`"),
                    })?
            }
        };
        if declared.directed != relation.directed {
            return Err(ModelError::DirectionMismatch {
                relation: relation.id.clone(),
                relation_type: relation.relation_type.clone(),
            });
        }
        if !relation.is_canonical() {
            return Err(ModelError::NonCanonicalEndpoints(relation.id.clone()));
        }
        let key = relation.identity_key();
        if self
            .relations
            .values()
            .any(|other| other.id != relation.id && other.identity_key() == key)
        {
            return Err(ModelError::DuplicateRelation(relation.id.clone()));
        }
        Ok(())
    }

    fn build_relation(&self, owner: RelationOwner, new: NewRelation, directed: bool) -> Result<Relation> {
        let (source_id, target_id) = canonical_endpoints(directed, new.source_id, new.target_id);
        let id = Relation::derive_id(&owner, &source_id, &new.relation_type, &target_id);
        let relation = Relation {
            id,
            owner,
            source_id,
            target_id,
            relation_type: new.relation_type,
            directed,
            description: new.description,
            version: 1,
        };
        if relation.source_id == relation.target_id {
            return Err(ModelError::SelfLoop(relation.source_id));
        }
        // Ids are derived from the identity tuple, so an id clash is a duplicate.
        if self.relations.contains_key(&relation.id) {
            return Err(ModelError::DuplicateRelation(relation.id));
        }
        self.check_relation(&relation)?;
        Ok(relation)
    }

    fn existing_view(&self, id: &ViewId) -> Result<&PatternView> {
        self.views
            .get(id)
            .ok_or_else(|| ModelError::UnknownEntity(id.to_string()))
    }

    fn existing_pattern(&self, id: &PatternId) -> Result<&Pattern> {
        self.patterns
            .get(id)
            .ok_or_else(|| ModelError::UnknownEntity(id.to_string()))
    }
}

/// Direct table access without invariant checks. See [`Repository::unchecked`].
pub struct UncheckedEdit<'a>(&'a mut Repository);

impl UncheckedEdit<'_> {
    pub fn insert_language(&mut self, language: PatternLanguage) -> Option<PatternLanguage> {
        self.0.languages.insert(language.id.clone(), language)
    }

    pub fn insert_pattern(&mut self, pattern: Pattern) -> Option<Pattern> {
        self.0.patterns.insert(pattern.id.clone(), pattern)
    }

    pub fn insert_relation(&mut self, relation: Relation) -> Option<Relation> {
        self.0.relations.insert(relation.id.clone(), relation)
    }

    pub fn insert_view(&mut self, view: PatternView) -> Option<PatternView> {
        self.0.views.insert(view.id.clone(), view)
    }

    pub fn remove_language(&mut self, id: &str) -> Option<PatternLanguage> {
        self.0.languages.remove(id)
    }

    pub fn remove_pattern(&mut self, id: &str) -> Option<Pattern> {
        self.0.patterns.remove(id)
    }

    pub fn remove_relation(&mut self, id: &str) -> Option<Relation> {
        self.0.relations.remove(id)
    }

    pub fn remove_view(&mut self, id: &str) -> Option<PatternView> {
        self.0.views.remove(id)
    }

    pub fn language_mut(&mut self, id: &str) -> Option<&mut PatternLanguage> {
        self.0.languages.get_mut(id)
    }

    pub fn pattern_mut(&mut self, id: &str) -> Option<&mut Pattern> {
        self.0.patterns.get_mut(id)
    }

    pub fn relation_mut(&mut self, id: &str) -> Option<&mut Relation> {
        self.0.relations.get_mut(id)
    }

    pub fn view_mut(&mut self, id: &str) -> Option<&mut PatternView> {
        self.0.views.get_mut(id)
    }
}
