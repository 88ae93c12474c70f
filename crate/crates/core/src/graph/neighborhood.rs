use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::GraphError;
use crate::model::{PatternId, RelationId, RelationOwner, Repository, ViewId};

/// A pattern outside a view that language relations connect to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NeighborhoodEntry {
    pub pattern_id: PatternId,
    /// Minimal number of relation hops from the nearest view member.
    pub distance: u32,
    /// One shortest path, starting at a view member.
    pub via_relation_ids: Vec<RelationId>,
}

/// Distance plus the predecessor pattern and relation it was reached through.
type Reached<'a> = (u32, Option<(&'a PatternId, &'a RelationId)>);

/// Breadth-first discovery from the view's members over every language-owned
/// relation, ignoring direction. Returns the non-members within `depth`
/// hops, sorted by pattern id.
pub fn neighborhood(repo: &Repository, view_id: &ViewId, depth: i64) -> Result<Vec<NeighborhoodEntry>, GraphError> {
    let view = repo
        .view(view_id.as_str())
        .ok_or_else(|| GraphError::UnknownEntity(view_id.to_string()))?;
    let depth = u32::try_from(depth).map_err(|_| GraphError::NegativeDepth(depth))?;
    if depth == 0 {
        return Ok(Vec::new());
    }

    let mut adjacency: BTreeMap<&PatternId, Vec<(&RelationId, &PatternId)>> = BTreeMap::new();
    for relation in repo.relations() {
        if !matches!(relation.owner, RelationOwner::Language(_)) {
            continue;
        }
        if repo.pattern(relation.source_id.as_str()).is_none() || repo.pattern(relation.target_id.as_str()).is_none() {
            continue;
        }
        adjacency
            .entry(&relation.source_id)
            .or_default()
            .push((&relation.id, &relation.target_id));
        adjacency
            .entry(&relation.target_id)
            .or_default()
            .push((&relation.id, &relation.source_id));
    }
    for edges in adjacency.values_mut() {
        edges.sort();
    }

    let mut reached: BTreeMap<&PatternId, Reached> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let members: BTreeSet<&PatternId> = view
        .pattern_refs
        .iter()
        .filter(|p| repo.pattern(p.as_str()).is_some())
        .collect();
    for member in &members {
        reached.insert(member, (0, None));
        queue.push_back(*member);
    }
    while let Some(current) = queue.pop_front() {
        let distance = reached[current].0;
        if distance == depth {
            continue;
        }
        for (relation, next) in adjacency.get(current).into_iter().flatten() {
            if !reached.contains_key(next) {
                reached.insert(next, (distance + 1, Some((current, relation))));
                queue.push_back(next);
            }
        }
    }

    let entries = reached
        .iter()
        .filter(|(pattern, _)| !members.contains(*pattern))
        .map(|(pattern, (distance, _))| {
            let mut path = Vec::new();
            let mut cursor = *pattern;
            while let Some((previous, relation)) = reached[cursor].1 {
                path.push(relation.clone());
                cursor = previous;
            }
            path.reverse();
            NeighborhoodEntry {
                pattern_id: (*pattern).clone(),
                distance: *distance,
                via_relation_ids: path,
            }
        })
        .collect();
    Ok(entries)
}
