use std::collections::BTreeMap;
use std::num::NonZeroU32;
use std::str::FromStr;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{if_match, json_response, ApiError, AppState};
use crate::graph::{
    build_view_graph, export_graph, layout, neighborhood, validate, ExportFormat, ValidationScope, DEFAULT_ITERATIONS,
};
use crate::model::{
    LanguageId, NewLanguage, NewPattern, NewRelation, Pattern, PatternId, PatternLanguage, PatternView, Relation,
    RelationId, RelationOwner, SchemaMode, ViewId,
};
use crate::store::{check_version, Bundle, Entity, EntityKind, EntityRef, ImportMode, StoreError};

type ApiResult = Result<Response, ApiError>;
type Params = Query<BTreeMap<String, String>>;

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::malformed_body(e.to_string()))
}

fn param<T: FromStr>(params: &BTreeMap<String, String>, name: &str) -> Result<Option<T>, ApiError> {
    params
        .get(name)
        .map(|raw| {
            raw.parse()
                .map_err(|_| ApiError::bad_request(format!("invalid value `{raw}` for `{name}`")))
        })
        .transpose()
}

/// Applies `?offset=&limit=` and reports the unpaged count in `X-Total-Count`.
fn page<T: Serialize>(items: Vec<T>, params: &BTreeMap<String, String>) -> ApiResult {
    let total = items.len();
    let offset: usize = param(params, "offset")?.unwrap_or(0);
    let limit: usize = param(params, "limit")?.unwrap_or(usize::MAX);
    let items: Vec<T> = items.into_iter().skip(offset).take(limit).collect();
    let mut response = json_response(StatusCode::OK, &items, None);
    response.headers_mut().insert("x-total-count", HeaderValue::from(total));
    Ok(response)
}

fn created<T: Serialize>(body: &T, version: u64, location: &str) -> Response {
    let mut response = json_response(StatusCode::CREATED, body, Some(version));
    if let Ok(value) = HeaderValue::from_str(location) {
        response.headers_mut().insert(header::LOCATION, value);
    }
    response
}

fn entity(state: &AppState, kind: EntityKind, id: &str) -> Result<Entity, ApiError> {
    Ok(state.store.get(&EntityRef::new(kind, id))?)
}

fn entity_response(entity: &Entity) -> Response {
    json_response(StatusCode::OK, entity, Some(entity.version()))
}

/// Full replacement through the store's compare-and-set. Fields missing from
/// the body keep their stored value; `id` always comes from the path.
fn replace<T: DeserializeOwned>(
    state: &AppState,
    kind: EntityKind,
    id: &str,
    headers: &HeaderMap,
    body: &[u8],
    wrap: fn(T) -> Entity,
) -> ApiResult {
    let expected = if_match(headers)?;
    let Value::Object(fields) = parse::<Value>(body)? else {
        return Err(ApiError::malformed_body("expected a json object"));
    };
    if fields.get("id").is_some_and(|v| v.as_str() != Some(id)) {
        return Err(ApiError::bad_request("`id` in the body does not match the path"));
    }
    let stored = entity(state, kind, id)?;
    let Value::Object(mut merged) = serde_json::to_value(&stored).expect("entities serialize") else {
        unreachable!("entities serialize to objects")
    };
    merged.extend(fields);
    merged.insert("id".into(), Value::from(id));
    merged.insert("version".into(), Value::from(expected));
    let updated: T =
        serde_json::from_value(Value::Object(merged)).map_err(|e| ApiError::malformed_body(e.to_string()))?;
    state.store.put(wrap(updated), Some(expected))?;
    Ok(entity_response(&entity(state, kind, id)?))
}

fn remove(state: &AppState, kind: EntityKind, id: &str, headers: &HeaderMap) -> ApiResult {
    let expected = if_match(headers)?;
    state.store.delete(&EntityRef::new(kind, id), Some(expected))?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

/// Runs a view operation after checking `If-Match` against the view version.
fn view_edit<T>(
    state: &AppState,
    view: &str,
    headers: &HeaderMap,
    edit: impl FnOnce(&mut crate::model::Repository) -> Result<T, crate::model::ModelError>,
) -> Result<T, ApiError> {
    let expected = if_match(headers)?;
    let reference = EntityRef::new(EntityKind::View, view);
    Ok(state.store.transact(|repo| {
        check_version(repo, &reference, Some(expected))?;
        edit(repo).map_err(StoreError::from)
    })?)
}

fn existing_language(state: &AppState, id: &str) -> Result<(), ApiError> {
    match state.store.snapshot().language(id) {
        Some(_) => Ok(()),
        None => Err(ApiError::new("NotFound", format!("`{id}` not found"), id)),
    }
}

fn existing_view(state: &AppState, id: &str) -> Result<PatternView, ApiError> {
    state
        .store
        .snapshot()
        .view(id)
        .cloned()
        .ok_or_else(|| ApiError::new("NotFound", format!("`{id}` not found"), id))
}

pub async fn list_languages(State(state): State<AppState>, Query(params): Params) -> ApiResult {
    let repo = state.store.snapshot();
    page(repo.languages().collect(), &params)
}

pub async fn create_language(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let new: NewLanguage = parse(&body)?;
    let language: PatternLanguage = state.store.transact(|repo| repo.create_language(new))?;
    Ok(created(
        &language,
        language.version,
        &format!("/pattern-languages/{}", language.id),
    ))
}

pub async fn get_language(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    Ok(entity_response(&entity(&state, EntityKind::Language, &id)?))
}

pub async fn put_language(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    replace(&state, EntityKind::Language, &id, &headers, &body, Entity::Language)
}

pub async fn delete_language(State(state): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult {
    remove(&state, EntityKind::Language, &id, &headers)
}

pub async fn list_patterns(State(state): State<AppState>, Path(id): Path<String>, Query(params): Params) -> ApiResult {
    existing_language(&state, &id)?;
    let repo = state.store.snapshot();
    page(repo.patterns_of(&id).collect(), &params)
}

pub async fn create_pattern(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let new: NewPattern = parse(&body)?;
    let language = LanguageId::new(id);
    let pattern: Pattern = state
        .store
        .transact(|repo| repo.add_pattern(&language, new, SchemaMode::Strict))?;
    Ok(created(&pattern, pattern.version, &format!("/patterns/{}", pattern.id)))
}

pub async fn list_language_relations(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Params,
) -> ApiResult {
    existing_language(&state, &id)?;
    let repo = state.store.snapshot();
    let owner = RelationOwner::Language(LanguageId::new(id));
    page(repo.relations_owned_by(&owner).collect(), &params)
}

pub async fn create_language_relation(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let new: NewRelation = parse(&body)?;
    let language = LanguageId::new(id);
    let relation: Relation = state
        .store
        .transact(|repo| repo.add_language_relation(&language, new))?;
    Ok(created(
        &relation,
        relation.version,
        &format!("/pattern-languages/{language}/relations"),
    ))
}

pub async fn get_pattern(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    Ok(entity_response(&entity(&state, EntityKind::Pattern, &id)?))
}

pub async fn put_pattern(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    replace(&state, EntityKind::Pattern, &id, &headers, &body, Entity::Pattern)
}

pub async fn delete_pattern(State(state): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult {
    remove(&state, EntityKind::Pattern, &id, &headers)
}

pub async fn list_views(State(state): State<AppState>, Query(params): Params) -> ApiResult {
    let repo = state.store.snapshot();
    page(repo.views().collect(), &params)
}

#[derive(Deserialize)]
struct NewView {
    name: String,
    context: String,
}

pub async fn create_view(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let new: NewView = parse(&body)?;
    let view: PatternView = state.store.transact(|repo| repo.create_view(&new.name, &new.context))?;
    Ok(created(&view, view.version, &format!("/pattern-views/{}", view.id)))
}

pub async fn get_view(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    Ok(entity_response(&entity(&state, EntityKind::View, &id)?))
}

pub async fn put_view(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    replace(&state, EntityKind::View, &id, &headers, &body, Entity::View)
}

pub async fn delete_view(State(state): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult {
    remove(&state, EntityKind::View, &id, &headers)
}

pub async fn add_view_member(
    State(state): State<AppState>,
    Path((id, pattern)): Path<(String, String)>,
    headers: HeaderMap,
) -> ApiResult {
    let (view_id, pattern_id) = (ViewId::new(id), PatternId::new(pattern));
    let view = view_edit(&state, view_id.as_str(), &headers, |repo| {
        repo.add_pattern_to_view(&view_id, &pattern_id)
    })?;
    Ok(json_response(StatusCode::OK, &view, Some(view.version)))
}

pub async fn remove_view_member(
    State(state): State<AppState>,
    Path((id, pattern)): Path<(String, String)>,
    Query(params): Params,
    headers: HeaderMap,
) -> ApiResult {
    let cascade = match params.get("cascade").map(String::as_str) {
        None | Some("false") | Some("0") => false,
        Some("true") | Some("1") => true,
        Some(other) => return Err(ApiError::bad_request(format!("invalid value `{other}` for `cascade`"))),
    };
    let (view_id, pattern_id) = (ViewId::new(id), PatternId::new(pattern));
    let view = view_edit(&state, view_id.as_str(), &headers, |repo| {
        repo.remove_pattern_from_view(&view_id, &pattern_id, cascade)
    })?;
    Ok(json_response(StatusCode::OK, &view, Some(view.version)))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RelationReference {
    relation_id: RelationId,
}

pub async fn reference_relation(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let reference: RelationReference = parse(&body)?;
    let view_id = ViewId::new(id);
    let view = view_edit(&state, view_id.as_str(), &headers, |repo| {
        repo.reference_relation_in_view(&view_id, &reference.relation_id)
    })?;
    Ok(json_response(StatusCode::OK, &view, Some(view.version)))
}

pub async fn list_view_relations(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Params,
) -> ApiResult {
    existing_view(&state, &id)?;
    let repo = state.store.snapshot();
    let owner = RelationOwner::View(ViewId::new(id));
    page(repo.relations_owned_by(&owner).collect(), &params)
}

#[derive(Serialize)]
struct CreatedViewRelation {
    relation: Relation,
    view: PatternView,
}

pub async fn create_view_relation(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let new: NewRelation = parse(&body)?;
    let view_id = ViewId::new(id);
    let (relation, view) = view_edit(&state, view_id.as_str(), &headers, |repo| {
        repo.add_view_relation(&view_id, new)
    })?;
    let location = format!("/pattern-views/{}/relations", view.id);
    Ok(created(
        &CreatedViewRelation {
            relation,
            view: view.clone(),
        },
        view.version,
        &location,
    ))
}

/// `layout=seed:<n>` plus optional `iterations=<k>`; `format=json|dot|graphml`.
pub async fn view_graph(State(state): State<AppState>, Path(id): Path<String>, Query(params): Params) -> ApiResult {
    let repo = state.store.snapshot();
    let graph = build_view_graph(&repo, &ViewId::new(id))?;
    let format = match params.get("format") {
        Some(raw) => ExportFormat::from_str(raw)?,
        None => ExportFormat::CanonicalJson,
    };
    let seed = match params.get("layout") {
        None => None,
        Some(raw) => match raw.strip_prefix("seed:").map(u64::from_str) {
            Some(Ok(seed)) => Some(seed),
            _ => {
                return Err(ApiError::bad_request(format!(
                    "layout must look like `seed:<n>`, got `{raw}`"
                )))
            }
        },
    };
    let iterations: NonZeroU32 = param(&params, "iterations")?.unwrap_or(DEFAULT_ITERATIONS);
    let positions = seed.map(|seed| layout(&graph, seed, iterations));
    let content_type = match format {
        ExportFormat::Dot => "text/vnd.graphviz",
        ExportFormat::GraphMl => "application/graphml+xml",
        ExportFormat::CanonicalJson => "application/json",
    };
    let bytes = export_graph(&graph, format, positions.as_ref());
    Ok(([(header::CONTENT_TYPE, content_type)], bytes).into_response())
}

pub async fn view_neighborhood(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Params,
) -> ApiResult {
    let depth: i64 = param(&params, "depth")?.unwrap_or(1);
    let repo = state.store.snapshot();
    let entries = neighborhood(&repo, &ViewId::new(id), depth)?;
    Ok(json_response(StatusCode::OK, &entries, None))
}

pub async fn view_diagnostics(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let repo = state.store.snapshot();
    let diagnostics = validate(&repo, &ValidationScope::View(ViewId::new(id)))?;
    Ok(json_response(StatusCode::OK, &diagnostics, None))
}

pub async fn export(State(state): State<AppState>) -> ApiResult {
    let bytes = state.store.export().to_canonical_json();
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}

pub async fn import(State(state): State<AppState>, Query(params): Params, body: Bytes) -> ApiResult {
    let mode = match params.get("mode") {
        None => ImportMode::Strict,
        Some(raw) => raw.parse().map_err(ApiError::bad_request)?,
    };
    let bundle = Bundle::from_json(&body)?;
    let report = state.store.import(&bundle, mode)?;
    Ok(json_response(StatusCode::OK, &report, None))
}
