use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ids::{LanguageId, PatternId, RelationId, ViewId};

/// One entry of a language's pattern format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionSpec {
    pub name: String,
    pub required: bool,
}

impl SectionSpec {
    pub fn required(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            required: true,
        }
    }

    pub fn optional(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            required: false,
        }
    }
}

/// A relation semantic such as `see-also` or `variation`. Directedness is
/// fixed per type and copied onto every relation created with it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationType {
    pub name: String,
    pub directed: bool,
    #[serde(default)]
    pub description: String,
}

impl RelationType {
    pub fn directed(name: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            directed: true,
            description: description.into(),
        }
    }

    pub fn undirected(name: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            directed: false,
            description: description.into(),
        }
    }
}

/// Relation types every view may use regardless of the endpoint languages.
pub fn global_relation_types() -> Vec<RelationType> {
    vec![
        RelationType::directed("implements", "the source realizes the target pattern"),
        RelationType::directed("uses", "the source relies on the target pattern"),
        RelationType::undirected("alternative-to", "either pattern solves the problem"),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatternLanguage {
    pub id: LanguageId,
    pub name: String,
    pub domain_context: String,
    pub section_schema: Vec<SectionSpec>,
    pub relation_types: Vec<RelationType>,
    pub version: u64,
}

impl PatternLanguage {
    pub fn relation_type(&self, name: &str) -> Option<&RelationType> {
        self.relation_types.iter().find(|t| t.name == name)
    }

    pub fn section(&self, name: &str) -> Option<&SectionSpec> {
        self.section_schema.iter().find(|s| s.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Pattern {
    pub id: PatternId,
    pub language_id: LanguageId,
    pub name: String,
    /// Section name to markdown text. Presentation order comes from the
    /// language's section schema.
    pub sections: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub icon_ref: Option<String>,
    pub version: u64,
}

impl Pattern {
    /// Sections in the order of the given schema, followed by any sections
    /// the schema does not know about.
    pub fn ordered_sections<'a>(&'a self, language: &'a PatternLanguage) -> Vec<(&'a str, &'a str)> {
        let mut ordered: Vec<(&str, &str)> = language
            .section_schema
            .iter()
            .filter_map(|spec| {
                self.sections
                    .get(&spec.name)
                    .map(|text| (spec.name.as_str(), text.as_str()))
            })
            .collect();
        ordered.extend(
            self.sections
                .iter()
                .filter(|(name, _)| language.section(name).is_none())
                .map(|(name, text)| (name.as_str(), text.as_str())),
        );
        ordered
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum RelationOwner {
    Language(LanguageId),
    View(ViewId),
}

impl RelationOwner {
    pub fn ownership(&self) -> Ownership {
        match self {
            RelationOwner::Language(_) => Ownership::Language,
            RelationOwner::View(_) => Ownership::View,
        }
    }
}

impl fmt::Display for RelationOwner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationOwner::Language(id) => write!(f, "language:{id}"),
            RelationOwner::View(id) => write!(f, "view:{id}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Relation {
    pub id: RelationId,
    pub owner: RelationOwner,
    pub source_id: PatternId,
    pub target_id: PatternId,
    #[serde(rename = "type")]
    pub relation_type: String,
    pub directed: bool,
    #[serde(default)]
    pub description: String,
    pub version: u64,
}

impl Relation {
    /// Relation ids are derived from the identity tuple so that bundles and
    /// exports stay stable across repositories.
    pub fn derive_id(owner: &RelationOwner, source: &PatternId, relation_type: &str, target: &PatternId) -> RelationId {
        RelationId::new(format!("{owner}:{relation_type}:{source}>{target}"))
    }

    /// The tuple two relations are compared on for duplicate detection.
    pub fn identity_key(&self) -> (&RelationOwner, &PatternId, &PatternId, &str) {
        (&self.owner, &self.source_id, &self.target_id, &self.relation_type)
    }

    pub fn touches(&self, pattern: &PatternId) -> bool {
        &self.source_id == pattern || &self.target_id == pattern
    }

    pub fn is_canonical(&self) -> bool {
        self.directed || self.source_id <= self.target_id
    }
}

/// Put undirected endpoints into lexicographic order.
pub fn canonical_endpoints(directed: bool, source: PatternId, target: PatternId) -> (PatternId, PatternId) {
    if !directed && target < source {
        (target, source)
    } else {
        (source, target)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatternView {
    pub id: ViewId,
    pub name: String,
    pub context: String,
    pub pattern_refs: BTreeSet<PatternId>,
    pub referenced_relation_ids: BTreeSet<RelationId>,
    pub view_relation_ids: BTreeSet<RelationId>,
    pub version: u64,
}

impl PatternView {
    pub fn contains(&self, pattern: &PatternId) -> bool {
        self.pattern_refs.contains(pattern)
    }

    pub fn relation_ids(&self) -> impl Iterator<Item = &RelationId> {
        self.referenced_relation_ids.iter().chain(self.view_relation_ids.iter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Span {
    IntraLanguage,
    CrossLanguage,
}

impl Span {
    pub fn between(source: &LanguageId, target: &LanguageId) -> Self {
        if source == target {
            Span::IntraLanguage
        } else {
            Span::CrossLanguage
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Span::IntraLanguage => "intra-language",
            Span::CrossLanguage => "cross-language",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ownership {
    Language,
    View,
}

impl Ownership {
    pub fn as_str(self) -> &'static str {
        match self {
            Ownership::Language => "language",
            Ownership::View => "view",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationClass {
    pub span: Span,
    pub ownership: Ownership,
}
