//! Generators and independent oracles shared by the integration tests and the
//! acceptance target. Every target includes this file, so not every item is
//! used everywhere.
#![allow(dead_code)]

pub mod api;

use std::collections::{BTreeMap, BTreeSet};

use pattern_views::corpus;
use pattern_views::graph::DiagnosticCode;
use pattern_views::model::{
    LanguageId, NewLanguage, NewPattern, NewRelation, Pattern, PatternId, PatternLanguage, Relation, RelationId,
    RelationOwner, RelationType, Repository, SchemaMode, SectionSpec, ViewId,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const TYPE_POOL: [(&str, bool); 5] = [
    ("see-also", false),
    ("next", true),
    ("variation", false),
    ("refines", true),
    ("conflicts-with", false),
];

fn random_language(rng: &mut ChaCha8Rng, index: usize) -> NewLanguage {
    let mut types: Vec<RelationType> = TYPE_POOL
        .iter()
        .filter(|_| rng.random_bool(0.6))
        .map(|(name, directed)| RelationType {
            name: (*name).into(),
            directed: *directed,
            description: String::new(),
        })
        .collect();
    if types.is_empty() {
        types.push(RelationType::undirected("see-also", ""));
    }
    let mut schema = vec![SectionSpec::required("problem"), SectionSpec::optional("context")];
    if rng.random_bool(0.5) {
        schema.push(SectionSpec::required("solution"));
    }
    NewLanguage {
        name: format!("Language {index}"),
        domain_context: format!("generated domain {index}"),
        section_schema: schema,
        relation_types: types,
    }
}

fn random_pattern(rng: &mut ChaCha8Rng, language: &PatternLanguage, index: usize) -> NewPattern {
    let mut sections = BTreeMap::new();
    for spec in &language.section_schema {
        if spec.required || rng.random_bool(0.5) {
            sections.insert(spec.name.clone(), format!("{} of pattern {index}", spec.name));
        }
    }
    NewPattern {
        name: format!("Pattern {index}"),
        sections,
        icon_ref: None,
    }
}

/// Counters collected while applying a random operation sequence.
#[derive(Debug, Default, Clone)]
pub struct SequenceStats {
    pub attempted: usize,
    pub succeeded: usize,
    /// A pattern whose language id differs from the one it was created in.
    pub provenance_violations: usize,
    /// A view operation that changed a language, pattern or language-owned relation.
    pub language_side_effects: usize,
    /// A failed operation that still changed the repository.
    pub non_atomic_failures: usize,
    /// A successful edit of an existing entity that did not bump exactly one version by one.
    pub version_violations: usize,
}

fn versions(repo: &Repository) -> BTreeMap<String, u64> {
    let mut out = BTreeMap::new();
    for l in repo.languages() {
        out.insert(format!("l:{}", l.id), l.version);
    }
    for p in repo.patterns() {
        out.insert(format!("p:{}", p.id), p.version);
    }
    for r in repo.relations() {
        out.insert(format!("r:{}", r.id), r.version);
    }
    for v in repo.views() {
        out.insert(format!("v:{}", v.id), v.version);
    }
    out
}

/// Languages, patterns and language-owned relations: the part view
/// operations must never touch.
fn language_side(repo: &Repository) -> (Vec<PatternLanguage>, Vec<Pattern>, Vec<Relation>) {
    (
        repo.languages().cloned().collect(),
        repo.patterns().cloned().collect(),
        repo.relations()
            .filter(|r| matches!(r.owner, RelationOwner::Language(_)))
            .cloned()
            .collect(),
    )
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum OpKind {
    /// Creates an entity; no existing version changes.
    Create,
    /// Changes exactly one existing entity.
    Edit,
    /// Deletes; may touch several entities.
    Delete,
}

/// Applies `steps` random operations, keeping the successful ones. Operands
/// are drawn so that a fair share of attempts fail.
pub fn random_sequence(seed: u64, steps: usize) -> (Repository, SequenceStats) {
    let mut rng = rng(seed);
    let mut repo = Repository::new();
    let mut stats = SequenceStats::default();
    let mut origin: BTreeMap<PatternId, LanguageId> = BTreeMap::new();
    let mut counter = 0usize;

    for _ in 0..steps {
        counter += 1;
        let before = repo.clone();
        let languages: Vec<LanguageId> = repo.languages().map(|l| l.id.clone()).collect();
        let patterns: Vec<PatternId> = repo.patterns().map(|p| p.id.clone()).collect();
        let views: Vec<ViewId> = repo.views().map(|v| v.id.clone()).collect();
        let language_relations: Vec<RelationId> = repo
            .relations()
            .filter(|r| matches!(r.owner, RelationOwner::Language(_)))
            .map(|r| r.id.clone())
            .collect();
        let choice = rng.random_range(0..100);
        stats.attempted += 1;

        let (kind, view_op, outcome): (OpKind, bool, Result<(), String>) = match choice {
            0..=4 => {
                let new = random_language(&mut rng, counter);
                (
                    OpKind::Create,
                    false,
                    repo.create_language(new).map(drop).map_err(|e| e.to_string()),
                )
            }
            5..=22 if !languages.is_empty() => {
                let language = repo
                    .language(languages.choose(&mut rng).unwrap().as_str())
                    .unwrap()
                    .clone();
                let new = random_pattern(&mut rng, &language, counter);
                let result = repo.add_pattern(&language.id, new, SchemaMode::Strict);
                if let Ok(p) = &result {
                    origin.insert(p.id.clone(), p.language_id.clone());
                }
                (OpKind::Create, false, result.map(drop).map_err(|e| e.to_string()))
            }
            23..=37 if !languages.is_empty() && !patterns.is_empty() => {
                let language = repo
                    .language(languages.choose(&mut rng).unwrap().as_str())
                    .unwrap()
                    .clone();
                let own: Vec<PatternId> = patterns
                    .iter()
                    .filter(|p| repo.language_of(p) == language.id)
                    .cloned()
                    .collect();
                let source = if !own.is_empty() && rng.random_bool(0.85) {
                    own.choose(&mut rng).unwrap().clone()
                } else {
                    patterns.choose(&mut rng).unwrap().clone()
                };
                let target = patterns.choose(&mut rng).unwrap().clone();
                let ty = if rng.random_bool(0.95) {
                    language.relation_types.choose(&mut rng).unwrap().name.clone()
                } else {
                    "unknown-type".to_string()
                };
                let new = NewRelation {
                    source_id: source,
                    target_id: target,
                    relation_type: ty,
                    description: String::new(),
                };
                (
                    OpKind::Create,
                    false,
                    repo.add_language_relation(&language.id, new)
                        .map(drop)
                        .map_err(|e| e.to_string()),
                )
            }
            38..=40 => {
                let name = format!("View {}", rng.random_range(0..(counter / 10 + 2)));
                let context = if rng.random_bool(0.9) {
                    "generated context"
                } else {
                    "  "
                };
                (
                    OpKind::Create,
                    true,
                    repo.create_view(&name, context).map(drop).map_err(|e| e.to_string()),
                )
            }
            41..=62 if !views.is_empty() && !patterns.is_empty() => {
                let view = views.choose(&mut rng).unwrap().clone();
                let pattern = patterns.choose(&mut rng).unwrap().clone();
                (
                    OpKind::Edit,
                    true,
                    repo.add_pattern_to_view(&view, &pattern)
                        .map(drop)
                        .map_err(|e| e.to_string()),
                )
            }
            63..=74 if !views.is_empty() && !language_relations.is_empty() => {
                let view = repo.view(views.choose(&mut rng).unwrap().as_str()).unwrap().clone();
                let inside: Vec<&RelationId> = language_relations
                    .iter()
                    .filter(|id| {
                        let r = repo.relation(id.as_str()).unwrap();
                        view.contains(&r.source_id) && view.contains(&r.target_id)
                    })
                    .collect();
                let relation = match inside.choose(&mut rng) {
                    Some(id) if rng.random_bool(0.8) => (*id).clone(),
                    _ => language_relations.choose(&mut rng).unwrap().clone(),
                };
                let result = repo.reference_relation_in_view(&view.id, &relation);
                (OpKind::Edit, true, result.map(drop).map_err(|e| e.to_string()))
            }
            75..=84 if !views.is_empty() => {
                let view = repo.view(views.choose(&mut rng).unwrap().as_str()).unwrap().clone();
                let members: Vec<PatternId> = view.pattern_refs.iter().cloned().collect();
                if members.is_empty() {
                    (OpKind::Edit, true, Err("no members".into()))
                } else {
                    let source = members.choose(&mut rng).unwrap().clone();
                    let target = if rng.random_bool(0.85) {
                        members.choose(&mut rng).unwrap().clone()
                    } else {
                        patterns.choose(&mut rng).unwrap().clone()
                    };
                    let ty = *["implements", "uses", "alternative-to", "see-also", "next"]
                        .choose(&mut rng)
                        .unwrap();
                    let new = NewRelation {
                        source_id: source,
                        target_id: target,
                        relation_type: ty.into(),
                        description: String::new(),
                    };
                    (
                        OpKind::Edit,
                        true,
                        repo.add_view_relation(&view.id, new)
                            .map(drop)
                            .map_err(|e| e.to_string()),
                    )
                }
            }
            85..=90 if !views.is_empty() => {
                let view = repo.view(views.choose(&mut rng).unwrap().as_str()).unwrap().clone();
                let members: Vec<PatternId> = view.pattern_refs.iter().cloned().collect();
                match members.choose(&mut rng) {
                    None => (OpKind::Edit, true, Err("no members".into())),
                    Some(member) => {
                        let cascade = rng.random_bool(0.5);
                        let result = repo.remove_pattern_from_view(&view.id, member, cascade);
                        (OpKind::Edit, true, result.map(drop).map_err(|e| e.to_string()))
                    }
                }
            }
            91..=94 if !patterns.is_empty() => {
                let pattern = patterns.choose(&mut rng).unwrap().clone();
                let force = rng.random_bool(0.5);
                (
                    OpKind::Delete,
                    false,
                    repo.delete_pattern(&pattern, force)
                        .map(drop)
                        .map_err(|e| e.to_string()),
                )
            }
            95..=96 if !views.is_empty() => {
                let view = views.choose(&mut rng).unwrap().clone();
                (
                    OpKind::Delete,
                    true,
                    repo.delete_view(&view).map(drop).map_err(|e| e.to_string()),
                )
            }
            97..=99 if !languages.is_empty() => {
                let language = languages.choose(&mut rng).unwrap().clone();
                (
                    OpKind::Delete,
                    false,
                    repo.delete_language(&language).map(drop).map_err(|e| e.to_string()),
                )
            }
            _ => {
                stats.attempted -= 1;
                continue;
            }
        };

        match outcome {
            Err(_) => {
                if repo != before {
                    stats.non_atomic_failures += 1;
                }
            }
            Ok(()) => {
                stats.succeeded += 1;
                if view_op && language_side(&before) != language_side(&repo) {
                    stats.language_side_effects += 1;
                }
                let old = versions(&before);
                let new = versions(&repo);
                let mut bumped = 0u64;
                let mut irregular = false;
                for (key, new_version) in &new {
                    match old.get(key) {
                        Some(old_version) if new_version == old_version => {}
                        Some(old_version) if *new_version == old_version + 1 => bumped += 1,
                        Some(_) => irregular = true,
                        None => irregular |= *new_version != 1,
                    }
                }
                let expected = match kind {
                    OpKind::Create => 0,
                    OpKind::Edit => 1,
                    OpKind::Delete => bumped,
                };
                if irregular || bumped != expected {
                    stats.version_violations += 1;
                }
            }
        }
        for pattern in repo.patterns() {
            if origin.get(&pattern.id) != Some(&pattern.language_id) {
                stats.provenance_violations += 1;
            }
        }
    }
    (repo, stats)
}

/// Neighborhood oracle: distances by repeated full scans of the relation
/// table instead of a queue. Returns pattern -> distance for non-members.
pub fn neighborhood_oracle(repo: &Repository, view: &ViewId, depth: u32) -> BTreeMap<PatternId, u32> {
    let view = repo.view(view.as_str()).expect("view exists");
    let mut distance: BTreeMap<PatternId, u32> = view
        .pattern_refs
        .iter()
        .filter(|p| repo.pattern(p.as_str()).is_some())
        .map(|p| (p.clone(), 0))
        .collect();
    let usable: Vec<&Relation> = repo
        .relations()
        .filter(|r| matches!(r.owner, RelationOwner::Language(_)))
        .filter(|r| repo.pattern(r.source_id.as_str()).is_some() && repo.pattern(r.target_id.as_str()).is_some())
        .collect();
    for level in 1..=depth {
        let frontier: BTreeSet<PatternId> = distance
            .iter()
            .filter(|(_, d)| **d == level - 1)
            .map(|(p, _)| p.clone())
            .collect();
        for relation in &usable {
            for (from, to) in [
                (&relation.source_id, &relation.target_id),
                (&relation.target_id, &relation.source_id),
            ] {
                if frontier.contains(from) && !distance.contains_key(to) {
                    distance.insert(to.clone(), level);
                }
            }
        }
    }
    distance.into_iter().filter(|(_, d)| *d > 0).collect()
}

/// Checks that `path` is a chain of language-owned relations of length
/// `distance` leading from some view member to `pattern`.
pub fn path_is_valid(
    repo: &Repository,
    view: &ViewId,
    pattern: &PatternId,
    distance: u32,
    path: &[RelationId],
) -> bool {
    let view = repo.view(view.as_str()).expect("view exists");
    if path.len() != distance as usize {
        return false;
    }
    // Walk backwards from the pattern.
    let mut current = pattern.clone();
    for id in path.iter().rev() {
        let Some(relation) = repo.relation(id.as_str()) else {
            return false;
        };
        if !matches!(relation.owner, RelationOwner::Language(_)) {
            return false;
        }
        current = if relation.target_id == current {
            relation.source_id.clone()
        } else if relation.source_id == current {
            relation.target_id.clone()
        } else {
            return false;
        };
    }
    view.pattern_refs.contains(&current)
}

/// A repository of 1..=`max_patterns` patterns spread over up to three
/// languages with random language relations and one view.
pub fn random_graph(seed: u64, max_patterns: usize) -> (Repository, ViewId) {
    let mut rng = rng(seed);
    let mut repo = Repository::new();
    let language_count = rng.random_range(1..=3);
    let mut languages = Vec::new();
    for i in 0..language_count {
        let new = NewLanguage {
            name: format!("Graph Language {i}"),
            domain_context: "generated".into(),
            section_schema: vec![SectionSpec::required("problem")],
            relation_types: vec![
                RelationType::undirected("see-also", ""),
                RelationType::directed("next", ""),
            ],
        };
        languages.push(repo.create_language(new).unwrap().id);
    }
    let n = rng.random_range(1..=max_patterns);
    let mut patterns = Vec::new();
    for i in 0..n {
        let language = languages.choose(&mut rng).unwrap().clone();
        let new = NewPattern {
            name: format!("Node {i}"),
            sections: BTreeMap::from([("problem".to_string(), "p".to_string())]),
            icon_ref: None,
        };
        patterns.push(repo.add_pattern(&language, new, SchemaMode::Strict).unwrap().id);
    }
    let edges = rng.random_range(0..=n * 2);
    for _ in 0..edges {
        let source = patterns.choose(&mut rng).unwrap().clone();
        let target = patterns.choose(&mut rng).unwrap().clone();
        let language = repo.language_of(&source);
        let ty = if rng.random_bool(0.5) { "see-also" } else { "next" };
        let _ = repo.add_language_relation(
            &language,
            NewRelation {
                source_id: source,
                target_id: target,
                relation_type: ty.into(),
                description: String::new(),
            },
        );
    }
    let view = repo.create_view("Graph View", "generated").unwrap().id;
    let members = rng.random_range(0..=n.min(5));
    for _ in 0..members {
        let pattern = patterns.choose(&mut rng).unwrap().clone();
        let _ = repo.add_pattern_to_view(&view, &pattern);
    }
    (repo, view)
}

fn relation(owner: RelationOwner, source: &str, target: &str, ty: &str, directed: bool) -> Relation {
    let (source, target) = (PatternId::new(source), PatternId::new(target));
    Relation {
        id: Relation::derive_id(&owner, &source, ty, &target),
        owner,
        source_id: source,
        target_id: target,
        relation_type: ty.into(),
        directed,
        description: String::new(),
        version: 1,
    }
}

fn cloud(slug: &str) -> String {
    format!("{}/{slug}", corpus::CLOUD)
}

fn eip(slug: &str) -> String {
    format!("{}/{slug}", corpus::EIP)
}

/// The seed corpus with one injected defect that `validate` must report
/// under `code`. Built through unchecked edits so the model's own guards do
/// not get in the way.
pub fn violation(code: DiagnosticCode) -> Repository {
    let mut repo = corpus::seed_repository();
    let view_id = corpus::CASE_STUDY_VIEW;
    let cloud_owner = RelationOwner::Language(LanguageId::new(corpus::CLOUD));
    let security_owner = RelationOwner::Language(LanguageId::new(corpus::SECURITY));
    let mut edit = repo.unchecked();
    match code {
        DiagnosticCode::DanglingEndpoint => {
            edit.remove_pattern(&eip("polling-consumer"));
        }
        DiagnosticCode::EndpointNotInView => {
            edit.view_mut(view_id)
                .unwrap()
                .pattern_refs
                .remove(&PatternId::new(eip("point-to-point-channel")));
        }
        DiagnosticCode::ForeignSource => {
            let r = relation(
                security_owner,
                &cloud("elastic-queue"),
                &eip("message-channel"),
                "see-also",
                false,
            );
            edit.insert_relation(r);
        }
        DiagnosticCode::DuplicateRelation => {
            let mut r = relation(
                cloud_owner,
                &cloud("processing-component"),
                &cloud("stateless-component"),
                "implemented-by",
                true,
            );
            r.id = RelationId::new("duplicate-of-implemented-by");
            edit.insert_relation(r);
        }
        DiagnosticCode::SelfLoop => {
            let r = relation(
                cloud_owner,
                &cloud("elastic-queue"),
                &cloud("elastic-queue"),
                "refers-to",
                true,
            );
            edit.insert_relation(r);
        }
        DiagnosticCode::UnknownRelationType => {
            let r = relation(
                cloud_owner,
                &cloud("elastic-queue"),
                &cloud("public-cloud"),
                "bogus-type",
                true,
            );
            edit.insert_relation(r);
        }
        DiagnosticCode::DirectionMismatch => {
            let r = relation(
                cloud_owner,
                &cloud("elastic-queue"),
                &cloud("public-cloud"),
                "see-also",
                true,
            );
            edit.insert_relation(r);
        }
        DiagnosticCode::NonCanonicalEndpoints => {
            let r = relation(
                cloud_owner,
                &cloud("public-cloud"),
                &cloud("elastic-queue"),
                "see-also",
                false,
            );
            edit.insert_relation(r);
        }
        DiagnosticCode::NotLanguageOwned => {
            let view_relation = edit_view_relation(view_id);
            let view = edit.view_mut(view_id).unwrap();
            view.view_relation_ids.remove(&view_relation);
            view.referenced_relation_ids.insert(view_relation);
        }
        DiagnosticCode::OwnershipMismatch => {
            let view = edit.view_mut(view_id).unwrap();
            let referenced = view.referenced_relation_ids.iter().next().unwrap().clone();
            view.referenced_relation_ids.remove(&referenced);
            view.view_relation_ids.insert(referenced);
        }
        DiagnosticCode::EmptyContext => {
            edit.view_mut(view_id).unwrap().context = " \n".into();
        }
        DiagnosticCode::InvalidSchema => {
            for spec in &mut edit.language_mut(corpus::SECURITY).unwrap().section_schema {
                spec.required = false;
            }
        }
        DiagnosticCode::MissingSection => {
            edit.pattern_mut(&cloud("elastic-queue"))
                .unwrap()
                .sections
                .remove("solution");
        }
        DiagnosticCode::UnknownSection => {
            edit.pattern_mut(&cloud("elastic-queue"))
                .unwrap()
                .sections
                .insert("trivia".into(), "extra".into());
        }
    }
    repo
}

fn edit_view_relation(view: &str) -> RelationId {
    RelationId::new(format!(
        "view:{view}:implements:{}/point-to-point-channel>{}/secure-channel",
        corpus::EIP,
        corpus::SECURITY
    ))
}
