// SPDX-License-Identifier: Apache-2.0

//! JSON over HTTP for the browser front end.
//!
//! Routing lives in [`handle`], a pure function of the session state and
//! the request, so it is tested without sockets. [`serve`] only moves
//! requests between `tiny_http` and `handle`, one at a time.
//!
//! | method | path | body |
//! |---|---|---|
//! | GET | `/api/model` | model document, leaves annotated with `status` |
//! | GET | `/api/instance/{node}` | one node with its instance |
//! | GET | `/api/entity/{id}` | entity with incoming and outgoing facts |
//! | GET | `/api/source?file=&from=&to=` | source lines `from..=to` |
//! | POST | `/api/instance/{node}/refresh` | diff; optional body `{"params": {..}}` |
//! | GET | `/api/touching?entity=` | leaves touching the entity |
//!
//! `{node}` is a numeric node id or a URL-encoded path; `{id}` and `entity`
//! are URL-encoded entity ids (`method:draw.Figure.changed()`).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Component, Path, PathBuf};

use percent_encoding::percent_decode_str;
use serde_json::{json, Value};

use crate::facts::{EntityId, FactKind, FactStore};
use crate::model::{document_with_status, node_document, save_model, ConcernModel, NodeId};

pub struct ServeState {
    pub store: FactStore,
    pub model: ConcernModel,
    model_path: Option<PathBuf>,
    sources: Option<PathBuf>,
    write: bool,
}

impl ServeState {
    pub fn new(
        store: FactStore,
        mut model: ConcernModel,
        model_path: Option<PathBuf>,
        sources: Option<PathBuf>,
        write: bool,
    ) -> ServeState {
        model.check(&store);
        ServeState {
            store,
            model,
            model_path,
            sources,
            write,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiResponse {
    pub status: u16,
    pub body: Value,
}

impl ApiResponse {
    fn ok(body: Value) -> ApiResponse {
        ApiResponse { status: 200, body }
    }

    fn error(status: u16, message: impl Into<String>) -> ApiResponse {
        ApiResponse {
            status,
            body: json!({ "error": message.into() }),
        }
    }
}

fn decode(text: &str) -> String {
    percent_decode_str(text).decode_utf8_lossy().into_owned()
}

fn query_params(query: &str) -> BTreeMap<String, String> {
    query
        .split('&')
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (k, v) = p.split_once('=').unwrap_or((p, ""));
            (decode(k), decode(v))
        })
        .collect()
}

/// Answers one request.
pub fn handle(state: &mut ServeState, method: &str, url: &str, body: &str) -> ApiResponse {
    let (path, query) = url.split_once('?').unwrap_or((url, ""));
    let params = query_params(query);
    let segments: Vec<&str> = path.trim_matches('/').split('/').collect();
    match (method, segments.as_slice()) {
        ("GET", ["api", "model"]) => ApiResponse::ok(document_with_status(&state.model)),
        ("GET", ["api", "instance", node]) => match find_node(&state.model, node) {
            Some(id) => ApiResponse::ok(node_document(&state.model, id).expect("resolved node")),
            None => ApiResponse::error(404, format!("no node `{}`", decode(node))),
        },
        ("POST", ["api", "instance", node, "refresh"]) => refresh(state, node, body),
        ("GET", ["api", "entity", id]) => entity(&state.store, &decode(id)),
        ("GET", ["api", "source"]) => source(state.sources.as_deref(), &params),
        ("GET", ["api", "touching"]) => match params.get("entity") {
            Some(e) => touching(&state.model, e),
            None => ApiResponse::error(400, "missing `entity` parameter"),
        },
        (_, ["api", "model" | "source" | "touching"])
        | (_, ["api", "instance", _])
        | (_, ["api", "entity", _])
        | (_, ["api", "instance", _, "refresh"]) => ApiResponse::error(405, format!("{method} not allowed")),
        _ => ApiResponse::error(404, format!("no route `{path}`")),
    }
}

fn find_node(model: &ConcernModel, text: &str) -> Option<NodeId> {
    model.resolve_node(&decode(text)).ok()
}

fn refresh(state: &mut ServeState, node: &str, body: &str) -> ApiResponse {
    let Some(id) = find_node(&state.model, node) else {
        return ApiResponse::error(404, format!("no node `{}`", decode(node)));
    };
    if state.model.node(id).and_then(|n| n.leaf()).is_none() {
        return ApiResponse::error(400, "only leaves can be refreshed");
    }
    let params = if body.trim().is_empty() {
        None
    } else {
        let parsed: Value = match serde_json::from_str(body) {
            Ok(v) => v,
            Err(e) => return ApiResponse::error(400, format!("body: {e}")),
        };
        match parsed.get("params") {
            None | Some(Value::Null) => None,
            Some(p) => match serde_json::from_value::<BTreeMap<String, String>>(p.clone()) {
                Ok(p) => Some(p),
                Err(e) => return ApiResponse::error(400, format!("params: {e}")),
            },
        }
    };
    match state.model.refresh_leaf(id, &state.store, params) {
        Ok(diff) => {
            if state.write {
                if let Some(path) = &state.model_path {
                    state.model.store_hash = state.store.hash().to_string();
                    if let Err(e) = fs::write(path, save_model(&state.model)) {
                        return ApiResponse::error(500, format!("{}: {e}", path.display()));
                    }
                }
            }
            ApiResponse::ok(json!({
                "diff": diff,
                "instance": node_document(&state.model, id),
            }))
        }
        Err(e) => ApiResponse {
            status: 422,
            body: json!({ "error": e.to_string(), "instance": node_document(&state.model, id) }),
        },
    }
}

fn entity(store: &FactStore, text: &str) -> ApiResponse {
    let Some(e) = EntityId::parse(text).and_then(|id| store.entity(&id)) else {
        return ApiResponse::error(404, format!("no entity `{text}`"));
    };
    let (kind, qname, sig) = e.id.triple();
    let fact = |kind: FactKind, other: &EntityId, site: &crate::facts::Location| {
        json!({ "kind": format!("{kind:?}"), "entity": other, "site": site })
    };
    let mut outgoing = Vec::new();
    let mut incoming = Vec::new();
    for k in FactKind::ALL {
        outgoing.extend(store.facts_from(k, &e.id).map(|f| fact(k, &f.target, &f.site)));
        incoming.extend(store.facts_to(k, &e.id).map(|f| fact(k, &f.source, &f.site)));
    }
    ApiResponse::ok(json!({
        "id": e.id,
        "ref": { "kind": kind, "qname": qname, "sig": sig },
        "simple_name": e.simple_name,
        "declared_in": e.declared_in,
        "modifiers": e.modifiers.iter().map(|m| m.keyword()).collect::<Vec<_>>(),
        "location": e.location,
        "outgoing": outgoing,
        "incoming": incoming,
    }))
}

fn source(root: Option<&Path>, params: &BTreeMap<String, String>) -> ApiResponse {
    let Some(root) = root else {
        return ApiResponse::error(404, "no source root configured");
    };
    let Some(file) = params.get("file") else {
        return ApiResponse::error(400, "missing `file` parameter");
    };
    let rel = Path::new(file);
    if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
        return ApiResponse::error(400, format!("bad file `{file}`"));
    }
    let line = |name: &str, default: usize| -> Result<usize, ApiResponse> {
        match params.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .ok()
                .filter(|n| *n >= 1)
                .ok_or_else(|| ApiResponse::error(400, format!("bad `{name}` `{v}`"))),
        }
    };
    let text = match fs::read_to_string(root.join(rel)) {
        Ok(t) => t,
        Err(_) => return ApiResponse::error(404, format!("no source `{file}`")),
    };
    let total = text.lines().count();
    let from = match line("from", 1) {
        Ok(n) => n,
        Err(r) => return r,
    };
    let to = match line("to", total.max(from)) {
        Ok(n) => n.min(total),
        Err(r) => return r,
    };
    if from > to && from > total {
        return ApiResponse::error(404, format!("`{file}` has {total} line(s)"));
    }
    let lines: Vec<&str> = text.lines().skip(from - 1).take(to + 1 - from).collect();
    ApiResponse::ok(json!({ "file": file, "from": from, "to": to, "lines": lines }))
}

fn touching(model: &ConcernModel, text: &str) -> ApiResponse {
    let Some(id) = EntityId::parse(text) else {
        return ApiResponse::error(400, format!("malformed entity id `{text}`"));
    };
    let leaves: Vec<Value> = model
        .touching(&id)
        .into_iter()
        .map(|n| {
            json!({
                "id": n,
                "name": model.node(n).map(|x| x.name.clone()),
                "path": model.path(n),
                "sites": model.touching_sites(n, &id),
            })
        })
        .collect();
    ApiResponse::ok(json!({ "entity": id, "leaves": leaves }))
}

/// Serves until the process is stopped.
pub fn serve(mut state: ServeState, port: u16) -> Result<(), String> {
    let server = tiny_http::Server::http(("127.0.0.1", port)).map_err(|e| format!("port {port}: {e}"))?;
    let json_header =
        tiny_http::Header::from_bytes(&b"Content-Type"[..], &b"application/json"[..]).expect("static header");
    let cors = tiny_http::Header::from_bytes(&b"Access-Control-Allow-Origin"[..], &b"*"[..]).expect("static header");
    for mut request in server.incoming_requests() {
        let mut body = String::new();
        let response = if request.as_reader().read_to_string(&mut body).is_err() {
            ApiResponse::error(400, "body is not UTF-8")
        } else {
            let method = request.method().as_str().to_string();
            let url = request.url().to_string();
            handle(&mut state, &method, &url, &body)
        };
        let text = serde_json::to_string(&response.body).expect("JSON values serialize");
        let reply = tiny_http::Response::from_string(text)
            .with_status_code(response.status)
            .with_header(json_header.clone())
            .with_header(cors.clone());
        let _ = request.respond(reply);
    }
    Ok(())
}
