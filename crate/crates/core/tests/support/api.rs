//! In-process HTTP client and the scripted API lifecycle.

use std::collections::BTreeSet;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use pattern_views::corpus;
use serde_json::{json, Value};
use tower::ServiceExt;

/// Every route the service exposes, as (method, path template).
pub const ENDPOINTS: [(&str, &str); 27] = [
    ("GET", "/pattern-languages"),
    ("POST", "/pattern-languages"),
    ("GET", "/pattern-languages/{id}"),
    ("PUT", "/pattern-languages/{id}"),
    ("DELETE", "/pattern-languages/{id}"),
    ("GET", "/pattern-languages/{id}/patterns"),
    ("POST", "/pattern-languages/{id}/patterns"),
    ("GET", "/pattern-languages/{id}/relations"),
    ("POST", "/pattern-languages/{id}/relations"),
    ("GET", "/patterns/{id}"),
    ("PUT", "/patterns/{id}"),
    ("DELETE", "/patterns/{id}"),
    ("GET", "/pattern-views"),
    ("POST", "/pattern-views"),
    ("GET", "/pattern-views/{id}"),
    ("PUT", "/pattern-views/{id}"),
    ("DELETE", "/pattern-views/{id}"),
    ("POST", "/pattern-views/{id}/patterns/{patternId}"),
    ("DELETE", "/pattern-views/{id}/patterns/{patternId}"),
    ("POST", "/pattern-views/{id}/referenced-relations"),
    ("GET", "/pattern-views/{id}/relations"),
    ("POST", "/pattern-views/{id}/relations"),
    ("GET", "/pattern-views/{id}/graph"),
    ("GET", "/pattern-views/{id}/neighborhood"),
    ("GET", "/pattern-views/{id}/diagnostics"),
    ("GET", "/export"),
    ("POST", "/import"),
];

pub struct Reply {
    pub status: StatusCode,
    pub etag: Option<u64>,
    pub total: Option<usize>,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or(Value::Null)
    }

    /// The `code` of an error body.
    pub fn code(&self) -> String {
        self.json()["code"].as_str().unwrap_or_default().to_string()
    }
}

pub struct Client {
    app: Router,
    pub covered: BTreeSet<(String, String)>,
    pub failures: Vec<String>,
    pub checks: usize,
}

impl Client {
    pub fn new(app: Router) -> Self {
        Self {
            app,
            covered: BTreeSet::new(),
            failures: Vec::new(),
            checks: 0,
        }
    }

    /// Sends a request. `template` is the route it exercises, for coverage.
    pub async fn send(
        &mut self,
        method: &str,
        template: &str,
        uri: &str,
        if_match: Option<u64>,
        body: Option<Vec<u8>>,
    ) -> Reply {
        self.covered.insert((method.to_string(), template.to_string()));
        let mut request = Request::builder()
            .method(Method::from_bytes(method.as_bytes()).unwrap())
            .uri(uri);
        if let Some(version) = if_match {
            request = request.header(header::IF_MATCH, version.to_string());
        }
        if body.is_some() {
            request = request.header(header::CONTENT_TYPE, "application/json");
        }
        let request = request.body(body.map(Body::from).unwrap_or_else(Body::empty)).unwrap();
        let response = self.app.clone().oneshot(request).await.unwrap();
        let status = response.status();
        let header_number = |name: &str| {
            response
                .headers()
                .get(name)
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.parse().ok())
        };
        let etag = header_number("etag");
        let total: Option<usize> = header_number("x-total-count").map(|n: u64| n as usize);
        let body = response.into_body().collect().await.unwrap().to_bytes().to_vec();
        Reply {
            status,
            etag,
            total,
            body,
        }
    }

    pub fn check(&mut self, label: &str, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(format!("{label}: {}", detail()));
        }
    }

    /// Checks the status and, for errors, the error code.
    pub fn expect(&mut self, label: &str, reply: &Reply, status: u16, code: Option<&str>) {
        let ok = reply.status.as_u16() == status && code.is_none_or(|c| reply.code() == c);
        self.check(label, ok, || {
            format!(
                "expected {status} {code:?}, got {} {}",
                reply.status,
                String::from_utf8_lossy(&reply.body)
            )
        });
    }

    pub fn uncovered(&self) -> Vec<String> {
        ENDPOINTS
            .iter()
            .filter(|(m, t)| !self.covered.contains(&(m.to_string(), t.to_string())))
            .map(|(m, t)| format!("{m} {t}"))
            .collect()
    }
}

fn body(value: Value) -> Option<Vec<u8>> {
    Some(serde_json::to_vec(&value).unwrap())
}

const DEPLOY: &str = "deployment-patterns";
const BLUE_GREEN: &str = "deployment-patterns/blue-green-deployment";
const CANARY: &str = "deployment-patterns/canary-release";
const VIEW: &str = "cloud-rollout";

fn cloud(slug: &str) -> String {
    format!("{}/{slug}", corpus::CLOUD)
}

fn security(slug: &str) -> String {
    format!("{}/{slug}", corpus::SECURITY)
}

/// Drives every endpoint through a create, edit, query and delete cycle on
/// an empty service. Failures are collected on the client.
pub async fn lifecycle(client: &mut Client) {
    let c = client;

    // Import and export.
    let seed = corpus::SEED_BUNDLE_JSON.as_bytes().to_vec();
    let r = c
        .send("POST", "/import", "/import?mode=strict", None, Some(seed.clone()))
        .await;
    c.expect("import seed", &r, 200, None);
    c.check("import report counts", r.json()["imported"]["patterns"] == 15, || {
        r.json().to_string()
    });
    let r = c.send("POST", "/import", "/import", None, Some(seed.clone())).await;
    c.expect("second import", &r, 409, Some("NonEmptyStore"));
    let r = c.send("GET", "/export", "/export", None, None).await;
    c.expect("export", &r, 200, None);
    c.check("export equals imported bundle", r.body == seed, || {
        "bytes differ".into()
    });

    // Languages.
    let r = c
        .send("GET", "/pattern-languages", "/pattern-languages", None, None)
        .await;
    c.expect("list languages", &r, 200, None);
    c.check("three languages", r.total == Some(3), || format!("{:?}", r.total));
    let r = c
        .send(
            "GET",
            "/pattern-languages",
            "/pattern-languages?offset=1&limit=1",
            None,
            None,
        )
        .await;
    let page = r.json();
    c.check(
        "paging",
        page.as_array().map(Vec::len) == Some(1) && r.total == Some(3),
        || page.to_string(),
    );

    let language = json!({
        "name": "Deployment Patterns",
        "domainContext": "releasing software to production",
        "sectionSchema": [
            {"name": "problem", "required": true},
            {"name": "solution", "required": true},
            {"name": "known-uses", "required": false}
        ],
        "relationTypes": [
            {"name": "see-also", "directed": false},
            {"name": "uses", "directed": true}
        ]
    });
    let r = c
        .send(
            "POST",
            "/pattern-languages",
            "/pattern-languages",
            None,
            body(language.clone()),
        )
        .await;
    c.expect("create language", &r, 201, None);
    c.check("language starts at 1", r.etag == Some(1), || format!("{:?}", r.etag));
    let r = c
        .send("POST", "/pattern-languages", "/pattern-languages", None, body(language))
        .await;
    c.expect("duplicate language", &r, 409, Some("DuplicateId"));
    let r = c
        .send(
            "POST",
            "/pattern-languages",
            "/pattern-languages",
            None,
            Some(b"{not json".to_vec()),
        )
        .await;
    c.expect("malformed body", &r, 400, Some("MalformedBody"));
    let bad_schema = json!({"name": "Loose", "domainContext": "x", "sectionSchema": [{"name": "a", "required": false}], "relationTypes": []});
    let r = c
        .send(
            "POST",
            "/pattern-languages",
            "/pattern-languages",
            None,
            body(bad_schema),
        )
        .await;
    c.expect("schema without required section", &r, 422, Some("InvalidSchema"));

    let uri = format!("/pattern-languages/{DEPLOY}");
    let r = c.send("GET", "/pattern-languages/{id}", &uri, None, None).await;
    c.expect("get language", &r, 200, None);
    let edit = json!({"domainContext": "shipping software safely"});
    let r = c
        .send("PUT", "/pattern-languages/{id}", &uri, None, body(edit.clone()))
        .await;
    c.expect("put without If-Match", &r, 428, Some("PreconditionRequired"));
    let r = c
        .send("PUT", "/pattern-languages/{id}", &uri, Some(1), body(edit.clone()))
        .await;
    c.expect("put language", &r, 200, None);
    c.check("language bumped", r.etag == Some(2), || format!("{:?}", r.etag));
    let r = c
        .send("PUT", "/pattern-languages/{id}", &uri, Some(1), body(edit))
        .await;
    c.expect("stale put", &r, 409, Some("VersionConflict"));
    let r = c
        .send("GET", "/pattern-languages/{id}", "/pattern-languages/nope", None, None)
        .await;
    c.expect("unknown language", &r, 404, None);

    // Patterns.
    let patterns_uri = format!("/pattern-languages/{DEPLOY}/patterns");
    for (name, solution) in [
        ("Blue Green Deployment", "run two environments"),
        ("Canary Release", "route a slice of traffic"),
    ] {
        let p = json!({"name": name, "sections": {"problem": "releases are risky", "solution": solution}});
        let r = c
            .send("POST", "/pattern-languages/{id}/patterns", &patterns_uri, None, body(p))
            .await;
        c.expect("create pattern", &r, 201, None);
    }
    let incomplete = json!({"name": "Dark Launch", "sections": {"problem": "p"}});
    let r = c
        .send(
            "POST",
            "/pattern-languages/{id}/patterns",
            &patterns_uri,
            None,
            body(incomplete),
        )
        .await;
    c.expect("pattern missing a section", &r, 422, Some("SchemaViolation"));
    let r = c
        .send("GET", "/pattern-languages/{id}/patterns", &patterns_uri, None, None)
        .await;
    c.expect("list patterns", &r, 200, None);
    c.check("two patterns", r.total == Some(2), || format!("{:?}", r.total));

    let pattern_uri = format!("/patterns/{BLUE_GREEN}");
    let r = c.send("GET", "/patterns/{id}", &pattern_uri, None, None).await;
    c.expect("get pattern", &r, 200, None);
    let sections =
        json!({"sections": {"problem": "releases are risky", "solution": "switch a router between two stacks"}});
    let r = c
        .send("PUT", "/patterns/{id}", &pattern_uri, Some(1), body(sections))
        .await;
    c.expect("put pattern", &r, 200, None);
    let moved = json!({"languageId": corpus::CLOUD});
    let r = c
        .send("PUT", "/patterns/{id}", &pattern_uri, Some(2), body(moved))
        .await;
    c.expect("language id is immutable", &r, 422, Some("ImmutableField"));

    // Language relations.
    let relations_uri = format!("/pattern-languages/{DEPLOY}/relations");
    let see_also = json!({"sourceId": CANARY, "targetId": BLUE_GREEN, "type": "see-also", "description": "both limit release risk"});
    let r = c
        .send(
            "POST",
            "/pattern-languages/{id}/relations",
            &relations_uri,
            None,
            body(see_also),
        )
        .await;
    c.expect("create language relation", &r, 201, None);
    let see_also_id = r.json()["id"].as_str().unwrap_or_default().to_string();
    c.check(
        "undirected endpoints ordered",
        r.json()["sourceId"] == BLUE_GREEN,
        || r.json().to_string(),
    );
    let cross = json!({"sourceId": CANARY, "targetId": cloud("elastic-infrastructure"), "type": "uses"});
    let r = c
        .send(
            "POST",
            "/pattern-languages/{id}/relations",
            &relations_uri,
            None,
            body(cross),
        )
        .await;
    c.expect("cross-language relation", &r, 201, None);
    let foreign = json!({"sourceId": cloud("elastic-queue"), "targetId": CANARY, "type": "uses"});
    let r = c
        .send(
            "POST",
            "/pattern-languages/{id}/relations",
            &relations_uri,
            None,
            body(foreign),
        )
        .await;
    c.expect("foreign source", &r, 422, Some("ForeignSource"));
    let r = c
        .send("GET", "/pattern-languages/{id}/relations", &relations_uri, None, None)
        .await;
    c.check("two language relations", r.total == Some(2), || {
        format!("{:?}", r.total)
    });

    // Views.
    let new_view = json!({"name": "Cloud Rollout", "context": "rolling out cloud services safely"});
    let r = c
        .send("POST", "/pattern-views", "/pattern-views", None, body(new_view))
        .await;
    c.expect("create view", &r, 201, None);
    let empty = json!({"name": "Nothing", "context": "  "});
    let r = c
        .send("POST", "/pattern-views", "/pattern-views", None, body(empty))
        .await;
    c.expect("empty context", &r, 422, Some("EmptyContext"));
    let r = c.send("GET", "/pattern-views", "/pattern-views", None, None).await;
    c.check("two views", r.total == Some(2), || format!("{:?}", r.total));
    let view_uri = format!("/pattern-views/{VIEW}");
    let r = c.send("GET", "/pattern-views/{id}", &view_uri, None, None).await;
    c.expect("get view", &r, 200, None);
    let r = c
        .send(
            "PUT",
            "/pattern-views/{id}",
            &view_uri,
            Some(1),
            body(json!({"context": "safe cloud rollouts"})),
        )
        .await;
    c.expect("put view", &r, 200, None);
    let mut version = r.etag.unwrap_or(0);

    let members = [
        BLUE_GREEN.to_string(),
        CANARY.to_string(),
        cloud("elastic-infrastructure"),
        cloud("processing-component"),
        security("secure-channel"),
    ];
    for member in &members {
        let uri = format!("/pattern-views/{VIEW}/patterns/{member}");
        let r = c
            .send(
                "POST",
                "/pattern-views/{id}/patterns/{patternId}",
                &uri,
                Some(version),
                None,
            )
            .await;
        c.expect("add member", &r, 200, None);
        c.check("member bumps view", r.etag == Some(version + 1), || {
            format!("{:?}", r.etag)
        });
        version = r.etag.unwrap_or(version);
    }
    let uri = format!("/pattern-views/{VIEW}/patterns/{BLUE_GREEN}");
    let r = c
        .send(
            "POST",
            "/pattern-views/{id}/patterns/{patternId}",
            &uri,
            Some(version),
            None,
        )
        .await;
    c.expect("duplicate member", &r, 409, Some("AlreadyMember"));

    let reference_uri = format!("/pattern-views/{VIEW}/referenced-relations");
    let r = c
        .send(
            "POST",
            "/pattern-views/{id}/referenced-relations",
            &reference_uri,
            Some(version),
            body(json!({"relationId": see_also_id})),
        )
        .await;
    c.expect("reference relation", &r, 200, None);
    version = r.etag.unwrap_or(version);
    let outside = format!(
        "language:{}:see-also:{}>{}",
        corpus::CLOUD,
        cloud("infrastructure-as-a-service"),
        cloud("public-cloud")
    );
    let r = c
        .send(
            "POST",
            "/pattern-views/{id}/referenced-relations",
            &reference_uri,
            Some(version),
            body(json!({"relationId": outside})),
        )
        .await;
    c.expect("reference outside view", &r, 422, Some("EndpointNotInView"));

    let view_relations_uri = format!("/pattern-views/{VIEW}/relations");
    let uses = json!({"sourceId": CANARY, "targetId": security("secure-channel"), "type": "uses", "description": "traffic split over a protected link"});
    let r = c
        .send(
            "POST",
            "/pattern-views/{id}/relations",
            &view_relations_uri,
            Some(version - 1),
            body(uses.clone()),
        )
        .await;
    c.expect("stale If-Match on view relation", &r, 409, Some("VersionConflict"));
    let r = c
        .send(
            "POST",
            "/pattern-views/{id}/relations",
            &view_relations_uri,
            Some(version),
            body(uses),
        )
        .await;
    c.expect("create view relation", &r, 201, None);
    c.check(
        "view relation owned by view",
        r.json()["relation"]["owner"]["kind"] == "view",
        || r.json().to_string(),
    );
    version = r.etag.unwrap_or(version);
    let stray = json!({"sourceId": CANARY, "targetId": cloud("public-cloud"), "type": "uses"});
    let r = c
        .send(
            "POST",
            "/pattern-views/{id}/relations",
            &view_relations_uri,
            Some(version),
            body(stray),
        )
        .await;
    c.expect(
        "view relation endpoint outside view",
        &r,
        422,
        Some("EndpointNotInView"),
    );
    let r = c
        .send("GET", "/pattern-views/{id}/relations", &view_relations_uri, None, None)
        .await;
    c.check("one view relation", r.total == Some(1), || format!("{:?}", r.total));

    // Queries.
    let graph_uri = format!("/pattern-views/{VIEW}/graph");
    let r = c.send("GET", "/pattern-views/{id}/graph", &graph_uri, None, None).await;
    c.expect("graph", &r, 200, None);
    let graph = r.json();
    let languages: BTreeSet<&str> = graph["nodes"]
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(|n| n["languageId"].as_str())
        .collect();
    c.check("graph spans three languages", languages.len() == 3, || {
        format!("{languages:?}")
    });
    let edges = graph["edges"].as_array().map(Vec::len).unwrap_or(0);
    c.check("graph has view and referenced edges", edges == 2, || graph.to_string());
    let layout_uri = format!("{graph_uri}?layout=seed:7&iterations=50");
    let first = c
        .send("GET", "/pattern-views/{id}/graph", &layout_uri, None, None)
        .await;
    let second = c
        .send("GET", "/pattern-views/{id}/graph", &layout_uri, None, None)
        .await;
    c.check(
        "layout repeatable",
        first.body == second.body && first.json()["layout"].is_object(),
        || String::from_utf8_lossy(&first.body).into_owned(),
    );
    let dot = c
        .send(
            "GET",
            "/pattern-views/{id}/graph",
            &format!("{graph_uri}?format=dot"),
            None,
            None,
        )
        .await;
    c.check(
        "dot output",
        String::from_utf8_lossy(&dot.body).starts_with("digraph"),
        || dot.status.to_string(),
    );
    let r = c
        .send(
            "GET",
            "/pattern-views/{id}/graph",
            &format!("{graph_uri}?format=svg"),
            None,
            None,
        )
        .await;
    c.expect("unsupported format", &r, 400, Some("UnsupportedFormat"));

    let hood_uri = format!("/pattern-views/{VIEW}/neighborhood?depth=1");
    let r = c
        .send("GET", "/pattern-views/{id}/neighborhood", &hood_uri, None, None)
        .await;
    c.expect("neighborhood", &r, 200, None);
    let found: BTreeSet<String> = r
        .json()
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(|e| e["patternId"].as_str().map(str::to_string))
        .collect();
    let expected: BTreeSet<String> = [
        cloud("elastic-queue"),
        cloud("stateless-component"),
        format!("{}/competing-consumers", corpus::EIP),
    ]
    .into();
    c.check("neighborhood at depth 1", found == expected, || format!("{found:?}"));
    c.check(
        "neighborhood excludes members",
        members.iter().all(|m| !found.contains(m)),
        || format!("{found:?}"),
    );
    let r = c
        .send(
            "GET",
            "/pattern-views/{id}/neighborhood",
            &format!("/pattern-views/{VIEW}/neighborhood?depth=-1"),
            None,
            None,
        )
        .await;
    c.expect("negative depth", &r, 422, Some("NegativeDepth"));

    let r = c
        .send(
            "GET",
            "/pattern-views/{id}/diagnostics",
            &format!("/pattern-views/{VIEW}/diagnostics"),
            None,
            None,
        )
        .await;
    c.expect("diagnostics", &r, 200, None);
    c.check("no diagnostics", r.json() == json!([]), || r.json().to_string());

    // Removal.
    let uri = format!("/pattern-views/{VIEW}/patterns/{CANARY}");
    let r = c
        .send(
            "DELETE",
            "/pattern-views/{id}/patterns/{patternId}",
            &uri,
            Some(version),
            None,
        )
        .await;
    c.expect("remove member with relations", &r, 422, Some("WouldOrphanRelations"));
    let r = c
        .send(
            "DELETE",
            "/pattern-views/{id}/patterns/{patternId}",
            &format!("{uri}?cascade=true"),
            Some(version),
            None,
        )
        .await;
    c.expect("cascading removal", &r, 200, None);
    let view = r.json();
    c.check(
        "cascade dropped relations",
        view["viewRelationIds"] == json!([]) && view["referencedRelationIds"] == json!([]),
        || view.to_string(),
    );
    version = r.etag.unwrap_or(version);

    let r = c.send("DELETE", "/patterns/{id}", &pattern_uri, Some(2), None).await;
    c.expect("delete pattern in use", &r, 409, Some("PatternInUse"));
    let r = c
        .send("DELETE", "/pattern-views/{id}", &view_uri, Some(version), None)
        .await;
    c.expect("delete view", &r, 204, None);
    let r = c
        .send("DELETE", "/pattern-languages/{id}", &uri_of_language(), Some(2), None)
        .await;
    c.expect("delete non-empty language", &r, 409, Some("LanguageNotEmpty"));
    let r = c.send("DELETE", "/patterns/{id}", &pattern_uri, Some(1), None).await;
    c.expect("stale delete", &r, 409, Some("VersionConflict"));
    let r = c.send("DELETE", "/patterns/{id}", &pattern_uri, Some(2), None).await;
    c.expect("delete pattern", &r, 204, None);
    let r = c
        .send(
            "DELETE",
            "/patterns/{id}",
            &format!("/patterns/{CANARY}"),
            Some(1),
            None,
        )
        .await;
    c.expect("delete second pattern", &r, 204, None);
    let r = c
        .send("DELETE", "/pattern-languages/{id}", &uri_of_language(), Some(2), None)
        .await;
    c.expect("delete language", &r, 204, None);
    let r = c
        .send("GET", "/pattern-languages/{id}", &uri_of_language(), None, None)
        .await;
    c.expect("language gone", &r, 404, None);

    let r = c.send("GET", "/export", "/export", None, None).await;
    c.check("export back to seed", r.body == seed, || {
        "repository differs from seed after cleanup".into()
    });
}

fn uri_of_language() -> String {
    format!("/pattern-languages/{DEPLOY}")
}
