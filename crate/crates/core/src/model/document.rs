// SPDX-License-Identifier: Apache-2.0

//! The persisted model document (`soquet-model/1`, JSON).
//!
//! Entity references are stored as `{kind, qname, sig}` triples and mapped
//! back to ids on load. Field order is fixed by the structs below, so equal
//! models serialize to identical text.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::facts::{EntityId, EntityKind, FactStore, Location};
use crate::query::{Relation, Tuple};
use crate::sorts::{SortInstance, SortKind};

use super::{ConcernModel, ConcernNode, Leaf, LeafStatus, ModelError, NodeBody, NodeId, VirtualInterface};

pub const SCHEMA: &str = "soquet-model/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ModelDoc {
    schema: String,
    name: String,
    store_hash: String,
    virtual_interfaces: Vec<VirtualInterfaceDoc>,
    root: NodeDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct EntityRef {
    kind: EntityKind,
    qname: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    sig: String,
}

impl EntityRef {
    fn of(id: &EntityId) -> EntityRef {
        let (kind, qname, sig) = id.triple();
        EntityRef { kind, qname, sig }
    }

    fn id(&self) -> Result<EntityId, ModelError> {
        if self.qname.is_empty() || (self.kind.is_callable() && !self.sig.ends_with(')')) {
            return Err(ModelError::Schema(format!("malformed entity reference {self:?}")));
        }
        Ok(EntityId::derive(self.kind, &self.qname, &self.sig))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VirtualInterfaceDoc {
    role_name: String,
    host_type: EntityRef,
    member_signatures: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum NodeKind {
    Composite,
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: NodeId,
    name: String,
    kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Vec<NodeDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    instance: Option<InstanceDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    name: String,
    sort_kind: SortKind,
    params: BTreeMap<String, String>,
    query_text: String,
    result: Vec<TupleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    obligations: Option<Vec<EntityRef>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
    store_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TupleDoc {
    source: EntityRef,
    target: EntityRef,
    kind: String,
    sites: Vec<Location>,
}

pub(crate) fn to_document(model: &ConcernModel) -> ModelDoc {
    ModelDoc {
        schema: SCHEMA.to_string(),
        name: model.name.clone(),
        store_hash: model.store_hash.clone(),
        virtual_interfaces: model
            .virtual_interfaces
            .iter()
            .map(|v| VirtualInterfaceDoc {
                role_name: v.role_name.clone(),
                host_type: EntityRef::of(&v.host_type),
                member_signatures: v.member_signatures.iter().cloned().collect(),
            })
            .collect(),
        root: node_doc(model, model.root),
    }
}

fn node_doc(model: &ConcernModel, id: NodeId) -> NodeDoc {
    let node = &model.nodes[&id];
    match &node.body {
        NodeBody::Composite(children) => NodeDoc {
            id,
            name: node.name.clone(),
            kind: NodeKind::Composite,
            children: Some(children.iter().map(|c| node_doc(model, *c)).collect()),
            instance: None,
        },
        NodeBody::Leaf(leaf) => NodeDoc {
            id,
            name: node.name.clone(),
            kind: NodeKind::Leaf,
            children: None,
            instance: Some(instance_doc(&leaf.instance)),
        },
    }
}

fn instance_doc(i: &SortInstance) -> InstanceDoc {
    InstanceDoc {
        name: i.name.clone(),
        sort_kind: i.kind,
        params: i.params.clone(),
        query_text: i.query_text.clone(),
        result: i
            .result
            .iter()
            .map(|t| TupleDoc {
                source: EntityRef::of(&t.source),
                target: EntityRef::of(&t.target),
                kind: t.kind.name().to_string(),
                sites: t.sites.clone(),
            })
            .collect(),
        obligations: i.obligations.as_ref().map(|o| o.iter().map(EntityRef::of).collect()),
        warnings: i.warnings.clone(),
        store_hash: i.store_hash.clone(),
    }
}

/// Serializes a model as pretty-printed JSON.
pub fn save_model(model: &ConcernModel) -> String {
    let mut text = serde_json::to_string_pretty(&to_document(model)).expect("model documents always serialize");
    text.push('\n');
    text
}

/// The document as a JSON value, with a `status` object added to every leaf.
pub fn document_with_status(model: &ConcernModel) -> serde_json::Value {
    let mut value = serde_json::to_value(to_document(model)).expect("model documents always serialize");
    annotate(model, &mut value["root"]);
    value
}

/// One node in document form with its path and, for leaves, its status.
pub fn node_document(model: &ConcernModel, id: NodeId) -> Option<serde_json::Value> {
    model.node(id)?;
    let mut value = serde_json::to_value(node_doc(model, id)).expect("node documents always serialize");
    annotate(model, &mut value);
    value["path"] = serde_json::Value::String(model.path(id));
    Some(value)
}

fn annotate(model: &ConcernModel, node: &mut serde_json::Value) {
    let Some(id) = node["id"].as_u64() else { return };
    if let Some(status) = model.status(id as NodeId) {
        node["status"] = serde_json::to_value(status).expect("status serializes");
    }
    if let Some(children) = node.get_mut("children").and_then(|c| c.as_array_mut()) {
        for c in children {
            annotate(model, c);
        }
    }
}

/// Parses a model document. With a store, every leaf is checked: leaves
/// referring to entities the store lacks are marked broken and listed in the
/// returned dangling references, leaves computed against another store are
/// marked stale. Without a store, leaves stay unchecked.
pub fn load_model(
    text: &str,
    store: Option<&FactStore>,
) -> Result<(ConcernModel, Vec<(NodeId, EntityId)>), ModelError> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| ModelError::Schema(e.to_string()))?;
    if doc.schema != SCHEMA {
        return Err(ModelError::Schema(format!("unsupported schema `{}`", doc.schema)));
    }
    if doc.root.kind != NodeKind::Composite {
        return Err(ModelError::Schema("the root must be a composite".into()));
    }
    let mut model = ConcernModel::new(&doc.name);
    model.store_hash = doc.store_hash;
    model.nodes.clear();
    model.root = doc.root.id;
    for v in doc.virtual_interfaces {
        let vi = VirtualInterface {
            role_name: v.role_name,
            host_type: v.host_type.id()?,
            member_signatures: v.member_signatures.into_iter().collect(),
        };
        if vi.member_signatures.is_empty() {
            return Err(ModelError::Schema(format!("virtual interface `{}` has no members", vi.role_name)));
        }
        model.add_virtual_interface(vi).map_err(|e| ModelError::Schema(e.to_string()))?;
    }
    let mut seen = BTreeSet::new();
    insert_node(&mut model, doc.root, None, &mut seen)?;
    model.next_id = seen.last().map_or(0, |m| m + 1);

    let mut dangling = Vec::new();
    if let Some(store) = store {
        model.check(store);
        for id in model.leaves() {
            let inst = &model.nodes[&id].leaf().expect("leaf").instance;
            for e in model.dangling_refs(store, inst) {
                dangling.push((id, e));
            }
        }
    }
    Ok((model, dangling))
}

fn insert_node(
    model: &mut ConcernModel,
    doc: NodeDoc,
    parent: Option<NodeId>,
    seen: &mut BTreeSet<NodeId>,
) -> Result<(), ModelError> {
    if !seen.insert(doc.id) {
        return Err(ModelError::Schema(format!("duplicate node id {}", doc.id)));
    }
    if doc.name.is_empty() || (parent.is_some() && doc.name.contains('/')) {
        return Err(ModelError::Schema(format!("node {} has an invalid name", doc.id)));
    }
    let body = match (doc.kind, doc.children, doc.instance) {
        (NodeKind::Composite, children, None) => {
            let children = children.unwrap_or_default();
            let mut names = BTreeSet::new();
            let mut ids = Vec::new();
            for c in &children {
                if !names.insert(c.name.clone()) {
                    return Err(ModelError::Schema(format!("sibling name `{}` repeats", c.name)));
                }
                ids.push(c.id);
            }
            for c in children {
                insert_node(model, c, Some(doc.id), seen)?;
            }
            NodeBody::Composite(ids)
        }
        (NodeKind::Leaf, None, Some(inst)) => NodeBody::Leaf(Leaf {
            instance: instance_from_doc(inst)?,
            status: LeafStatus::Unchecked,
        }),
        (NodeKind::Composite, _, Some(_)) => {
            return Err(ModelError::Schema(format!("composite {} carries an instance", doc.id)))
        }
        (NodeKind::Leaf, _, _) => {
            return Err(ModelError::Schema(format!("leaf {} needs exactly one instance and no children", doc.id)))
        }
    };
    model.nodes.insert(
        doc.id,
        ConcernNode {
            id: doc.id,
            name: doc.name,
            parent,
            body,
        },
    );
    Ok(())
}

fn instance_from_doc(doc: InstanceDoc) -> Result<SortInstance, ModelError> {
    let result = doc
        .result
        .into_iter()
        .map(|t| {
            let kind = match t.kind.as_str() {
                "closure" => Relation::Closure,
                name => Relation::from_name(name)
                    .ok_or_else(|| ModelError::Schema(format!("unknown relation `{name}`")))?,
            };
            Ok(Tuple {
                source: t.source.id()?,
                target: t.target.id()?,
                kind,
                sites: t.sites,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    let obligations = doc
        .obligations
        .map(|o| o.iter().map(EntityRef::id).collect::<Result<Vec<_>, _>>())
        .transpose()?;
    Ok(SortInstance {
        name: doc.name,
        kind: doc.sort_kind,
        params: doc.params,
        query_text: doc.query_text,
        result,
        obligations,
        warnings: doc.warnings,
        store_hash: doc.store_hash,
    })
}
