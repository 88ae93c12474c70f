use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::GraphError;
use crate::model::{LanguageId, Ownership, PatternId, Relation, RelationId, RelationOwner, Repository, Span, ViewId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphScope {
    Languages {
        #[serde(rename = "languageIds")]
        language_ids: Vec<LanguageId>,
    },
    View {
        #[serde(rename = "viewId")]
        view_id: ViewId,
    },
}

impl GraphScope {
    pub fn label(&self) -> String {
        match self {
            GraphScope::Languages { language_ids } => {
                let ids: Vec<&str> = language_ids.iter().map(LanguageId::as_str).collect();
                format!("languages:{}", ids.join(","))
            }
            GraphScope::View { view_id } => format!("view:{view_id}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphNode {
    pub id: PatternId,
    pub language_id: LanguageId,
    pub name: String,
    /// Set for targets of cross-language relations that lie outside the
    /// languages the graph was built from.
    pub external: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub id: RelationId,
    pub source: PatternId,
    pub target: PatternId,
    #[serde(rename = "type")]
    pub relation_type: String,
    pub directed: bool,
    pub ownership: Ownership,
    pub span: Span,
}

/// Node and edge set of a language set or a view, sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternGraph {
    scope: GraphScope,
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
}

#[derive(Deserialize)]
struct RawGraph {
    scope: GraphScope,
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
}

impl<'de> Deserialize<'de> for PatternGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawGraph::deserialize(deserializer)?;
        PatternGraph::try_new(raw.scope, raw.nodes, raw.edges).map_err(serde::de::Error::custom)
    }
}

impl PatternGraph {
    /// Sorts nodes and edges and checks that edge endpoints are nodes and
    /// that node and edge ids are unique.
    pub fn try_new(
        scope: GraphScope,
        mut nodes: Vec<GraphNode>,
        mut edges: Vec<GraphEdge>,
    ) -> Result<Self, GraphError> {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(pair) = nodes.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GraphError::MalformedGraph(format!("duplicate node `{}`", pair[0].id)));
        }
        if let Some(pair) = edges.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GraphError::MalformedGraph(format!("duplicate edge `{}`", pair[0].id)));
        }
        let ids: BTreeSet<&PatternId> = nodes.iter().map(|n| &n.id).collect();
        for edge in &edges {
            for endpoint in [&edge.source, &edge.target] {
                if !ids.contains(endpoint) {
                    return Err(GraphError::MalformedGraph(format!(
                        "edge `{}` references missing node `{endpoint}`",
                        edge.id
                    )));
                }
            }
        }
        Ok(Self { scope, nodes, edges })
    }

    pub fn empty(scope: GraphScope) -> Self {
        Self {
            scope,
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn scope(&self) -> &GraphScope {
        &self.scope
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn node(&self, id: &PatternId) -> Option<&GraphNode> {
        self.nodes
            .binary_search_by(|n| n.id.cmp(id))
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn edge(&self, id: &RelationId) -> Option<&GraphEdge> {
        self.edges
            .binary_search_by(|e| e.id.cmp(id))
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn languages(&self) -> BTreeSet<&LanguageId> {
        self.nodes.iter().map(|n| &n.language_id).collect()
    }
}

fn edge_for(repo: &Repository, relation: &Relation) -> GraphEdge {
    let class = repo.classify(relation);
    GraphEdge {
        id: relation.id.clone(),
        source: relation.source_id.clone(),
        target: relation.target_id.clone(),
        relation_type: relation.relation_type.clone(),
        directed: relation.directed,
        ownership: class.ownership,
        span: class.span,
    }
}

/// All patterns of the given languages and every relation those languages
/// own. Endpoints outside the language set are added as external nodes;
/// relations with a missing endpoint are left out.
pub fn build_language_graph(repo: &Repository, language_ids: &[LanguageId]) -> Result<PatternGraph, GraphError> {
    let wanted: BTreeSet<LanguageId> = language_ids.iter().cloned().collect();
    if let Some(missing) = wanted.iter().find(|id| repo.language(id.as_str()).is_none()) {
        return Err(GraphError::UnknownLanguage(missing.clone()));
    }
    let mut nodes: BTreeMap<PatternId, GraphNode> = repo
        .patterns()
        .filter(|p| wanted.contains(&p.language_id))
        .map(|p| {
            let node = GraphNode {
                id: p.id.clone(),
                language_id: p.language_id.clone(),
                name: p.name.clone(),
                external: false,
            };
            (p.id.clone(), node)
        })
        .collect();
    let mut edges = Vec::new();
    for relation in repo.relations() {
        let RelationOwner::Language(owner) = &relation.owner else {
            continue;
        };
        if !wanted.contains(owner) {
            continue;
        }
        let (Some(source), Some(target)) = (
            repo.pattern(relation.source_id.as_str()),
            repo.pattern(relation.target_id.as_str()),
        ) else {
            continue;
        };
        for endpoint in [source, target] {
            nodes.entry(endpoint.id.clone()).or_insert_with(|| GraphNode {
                id: endpoint.id.clone(),
                language_id: endpoint.language_id.clone(),
                name: endpoint.name.clone(),
                external: true,
            });
        }
        edges.push(edge_for(repo, relation));
    }
    let scope = GraphScope::Languages {
        language_ids: wanted.into_iter().collect(),
    };
    PatternGraph::try_new(scope, nodes.into_values().collect(), edges)
}

/// The view's members and the relations it references or owns. Members or
/// relations that no longer resolve are left out; `validate` reports them.
pub fn build_view_graph(repo: &Repository, view_id: &ViewId) -> Result<PatternGraph, GraphError> {
    let view = repo
        .view(view_id.as_str())
        .ok_or_else(|| GraphError::UnknownEntity(view_id.to_string()))?;
    let nodes: Vec<GraphNode> = view
        .pattern_refs
        .iter()
        .filter_map(|id| repo.pattern(id.as_str()))
        .map(|p| GraphNode {
            id: p.id.clone(),
            language_id: p.language_id.clone(),
            name: p.name.clone(),
            external: false,
        })
        .collect();
    let members: BTreeSet<&PatternId> = nodes.iter().map(|n| &n.id).collect();
    let edges: Vec<GraphEdge> = view
        .relation_ids()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter_map(|id| repo.relation(id.as_str()))
        .filter(|r| members.contains(&r.source_id) && members.contains(&r.target_id))
        .map(|r| edge_for(repo, r))
        .collect();
    PatternGraph::try_new(
        GraphScope::View {
            view_id: view_id.clone(),
        },
        nodes,
        edges,
    )
}
