//! Built-in seed corpus: subsets of a cloud, an integration and a security
//! pattern language, plus one view combining them.
//!
//! The repository is built through the ordinary model operations by
//! [`build_seed_repository`]. The committed `corpus/seed.bundle.json` must be
//! byte-identical to its export; a test enforces that.

mod content;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{
    LanguageId, NewLanguage, NewPattern, NewRelation, Ownership, PatternId, RelationType, Repository, SchemaMode,
    SectionSpec, Span, ViewId,
};
use crate::store::{import_bundle, Bundle, ImportMode};

pub const SEED_BUNDLE_JSON: &str = include_str!("../../corpus/seed.bundle.json");

pub const CLOUD: &str = "cloud-computing-patterns";
pub const EIP: &str = "enterprise-integration-patterns";
pub const SECURITY: &str = "security-patterns";
pub const CASE_STUDY_VIEW: &str = "secure-elastic-cloud-applications";

/// The embedded seed bundle.
pub fn seed_bundle() -> Bundle {
    Bundle::from_json(SEED_BUNDLE_JSON.as_bytes()).expect("embedded seed bundle parses")
}

/// The seed corpus as a repository, loaded from the embedded bundle.
pub fn seed_repository() -> Repository {
    import_bundle(&seed_bundle(), ImportMode::Strict)
        .expect("embedded seed bundle is valid")
        .0
}

fn pid(language: &str, slug: &str) -> PatternId {
    PatternId::new(format!("{language}/{slug}"))
}

fn sections(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| ((*k).to_owned(), (*v).to_owned())).collect()
}

fn relation(source: PatternId, target: PatternId, ty: &str, description: &str) -> NewRelation {
    NewRelation {
        source_id: source,
        target_id: target,
        relation_type: ty.into(),
        description: description.into(),
    }
}

fn languages() -> [NewLanguage; 3] {
    [
        NewLanguage {
            name: "Cloud Computing Patterns".into(),
            domain_context: "architecture of applications that run on elastic, shared cloud infrastructure".into(),
            section_schema: vec![
                SectionSpec::optional("icon"),
                SectionSpec::required("problem"),
                SectionSpec::required("context"),
                SectionSpec::required("solution"),
                SectionSpec::optional("variations"),
            ],
            relation_types: vec![
                RelationType::undirected("see-also", "the two patterns are worth reading together"),
                RelationType::directed("variation", "the source is a variant of the target"),
                RelationType::directed("implemented-by", "the target is a way to realize the source"),
                RelationType::directed("refers-to", "the source's description points to the target"),
                RelationType::directed("provides", "the source supplies what the target describes"),
            ],
        },
        NewLanguage {
            name: "Enterprise Integration Patterns".into(),
            domain_context: "asynchronous messaging between independently developed applications".into(),
            section_schema: vec![
                SectionSpec::required("problem"),
                SectionSpec::optional("context"),
                SectionSpec::optional("forces"),
                SectionSpec::required("solution"),
                SectionSpec::optional("sketch"),
                SectionSpec::optional("next"),
            ],
            relation_types: vec![
                RelationType::directed("next", "the target is a natural follow-up to the source"),
                RelationType::undirected("see-also", "the two patterns are worth reading together"),
                RelationType::directed("variation", "the source is a variant of the target"),
                RelationType::directed("implemented-as", "the target is a concrete form of the source"),
                RelationType::directed("delegates-to", "the source hands work over to the target"),
            ],
        },
        NewLanguage {
            name: "Security Patterns".into(),
            domain_context: "protecting information systems against misuse and attack".into(),
            section_schema: vec![
                SectionSpec::required("problem"),
                SectionSpec::required("context"),
                SectionSpec::optional("forces"),
                SectionSpec::required("solution"),
                SectionSpec::optional("consequences"),
                SectionSpec::optional("see-also"),
            ],
            relation_types: vec![RelationType::undirected(
                "see-also",
                "the two patterns are worth reading together",
            )],
        },
    ]
}

/// Members of the case-study view: every seed pattern except the service
/// model patterns and the generic message channel.
fn view_members() -> Vec<PatternId> {
    let excluded = [
        pid(CLOUD, "public-cloud"),
        pid(CLOUD, "infrastructure-as-a-service"),
        pid(EIP, "message-channel"),
    ];
    content::PATTERNS
        .iter()
        .map(|p| pid(p.language, &crate::model::slugify(p.name)))
        .filter(|id| !excluded.contains(id))
        .collect()
}

/// Builds the seed corpus from scratch with strict model operations.
pub fn build_seed_repository() -> Repository {
    let mut repo = Repository::new();
    for language in languages() {
        repo.create_language(language).expect("seed language");
    }
    for p in content::PATTERNS {
        let new = NewPattern {
            name: p.name.into(),
            sections: sections(p.sections),
            icon_ref: p.icon.map(str::to_owned),
        };
        repo.add_pattern(&LanguageId::from(p.language), new, SchemaMode::Strict)
            .expect("seed pattern");
    }
    let mut language_relations = Vec::new();
    for r in content::LANGUAGE_RELATIONS {
        let new = relation(
            pid(r.source.0, r.source.1),
            pid(r.target.0, r.target.1),
            r.ty,
            r.description,
        );
        let created = repo
            .add_language_relation(&LanguageId::from(r.owner), new)
            .expect("seed relation");
        language_relations.push((created.id, r.in_view));
    }

    let view = repo
        .create_view(
            "Secure Elastic Cloud Applications",
            "patterns for realizing a secure elastic cloud application",
        )
        .expect("seed view")
        .id;
    for member in view_members() {
        repo.add_pattern_to_view(&view, &member).expect("seed member");
    }
    for (id, in_view) in &language_relations {
        if *in_view {
            repo.reference_relation_in_view(&view, id).expect("seed reference");
        }
    }
    for r in content::VIEW_RELATIONS {
        let new = relation(
            pid(r.source.0, r.source.1),
            pid(r.target.0, r.target.1),
            r.ty,
            r.description,
        );
        repo.add_view_relation(&view, new).expect("seed view relation");
    }
    repo
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RelationCounts {
    pub intra_language: usize,
    pub cross_language: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ViewDescriptor {
    pub id: ViewId,
    pub members: usize,
    pub languages: Vec<LanguageId>,
    pub referenced_relations: usize,
    pub view_relations: usize,
}

/// Counts that describe a corpus; `CorpusManifest::of(&seed_repository())`
/// must equal [`CorpusManifest::expected`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusManifest {
    pub patterns_per_language: BTreeMap<LanguageId, usize>,
    pub language_owned: RelationCounts,
    pub view_owned: RelationCounts,
    pub views: Vec<ViewDescriptor>,
}

impl CorpusManifest {
    pub fn of(repo: &Repository) -> Self {
        let patterns_per_language = repo
            .languages()
            .map(|l| (l.id.clone(), repo.patterns_of(l.id.as_str()).count()))
            .collect();
        let mut language_owned = RelationCounts::default();
        let mut view_owned = RelationCounts::default();
        for r in repo.relations() {
            let class = repo.classify(r);
            let counts = match class.ownership {
                Ownership::Language => &mut language_owned,
                Ownership::View => &mut view_owned,
            };
            match class.span {
                Span::IntraLanguage => counts.intra_language += 1,
                Span::CrossLanguage => counts.cross_language += 1,
            }
        }
        let views = repo
            .views()
            .map(|v| {
                let mut languages: Vec<LanguageId> = v.pattern_refs.iter().map(|p| repo.language_of(p)).collect();
                languages.sort();
                languages.dedup();
                ViewDescriptor {
                    id: v.id.clone(),
                    members: v.pattern_refs.len(),
                    languages,
                    referenced_relations: v.referenced_relation_ids.len(),
                    view_relations: v.view_relation_ids.len(),
                }
            })
            .collect();
        Self {
            patterns_per_language,
            language_owned,
            view_owned,
            views,
        }
    }

    /// The frozen counts of the seed corpus.
    pub fn expected() -> Self {
        Self {
            patterns_per_language: [(CLOUD, 8), (EIP, 6), (SECURITY, 1)]
                .into_iter()
                .map(|(l, n)| (LanguageId::from(l), n))
                .collect(),
            language_owned: RelationCounts {
                intra_language: 7,
                cross_language: 2,
            },
            view_owned: RelationCounts {
                intra_language: 0,
                cross_language: 3,
            },
            views: vec![ViewDescriptor {
                id: ViewId::from(CASE_STUDY_VIEW),
                members: 12,
                languages: [CLOUD, EIP, SECURITY].into_iter().map(LanguageId::from).collect(),
                referenced_relations: 7,
                view_relations: 3,
            }],
        }
    }
}
