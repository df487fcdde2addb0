// SPDX-License-Identifier: Apache-2.0

//! Concern models: trees of named composites whose leaves are sort instances.
//!
//! Composites never carry a query; leaves always carry exactly one
//! [`SortInstance`]. Node ids are stable for the lifetime of a model and are
//! persisted, so external views can address a leaf across reloads.

mod document;
mod virtual_interface;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::facts::{EntityId, FactStore, Location};
use crate::query::{Relation, RoleSpec, TupleSet};
use crate::sorts::{compose_pattern, instantiate, BindingsFile, Params, SortError, SortInstance, SortSpec};

pub use document::{document_with_status, load_model, node_document, save_model, SCHEMA};
pub use virtual_interface::{PartialMatch, VirtualInterface};

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("node {0} is not a composite")]
    NotAComposite(NodeId),
    #[error("`{0}` already exists under this parent")]
    NameClash(String),
    #[error("cannot move node {node} under its own descendant {parent}")]
    CycleAttempt { node: NodeId, parent: NodeId },
    #[error("no node {0}")]
    UnknownNode(NodeId),
    #[error("no node at path `{0}`")]
    UnknownPath(String),
    #[error("the root node cannot be removed or moved")]
    RootNode,
    #[error("empty node name")]
    EmptyName,
    #[error("`{0}` matches no member declared in the host type")]
    NoMatchingMember(String),
    #[error("a virtual interface needs at least one member")]
    EmptyMemberSet,
    #[error("host `{0}` is not a class or interface in the store")]
    HostUnresolved(String),
    #[error("bad role name `{0}`")]
    BadRoleName(String),
    #[error("virtual interface `{0}` already defined")]
    DuplicateRole(String),
    #[error("model document: {0}")]
    Schema(String),
    #[error("{0}")]
    Query(String),
    #[error(transparent)]
    Sort(#[from] SortError),
}

/// Whether a leaf's cached result is trustworthy for a given store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "state", content = "detail", rename_all = "lowercase")]
pub enum LeafStatus {
    /// Not yet compared to any store (loaded without one).
    Unchecked,
    Fresh,
    /// Computed against a different store.
    Stale,
    /// Refers to entities the store lacks, or failed to re-evaluate.
    Broken(Vec<String>),
}

#[derive(Debug, Clone)]
pub struct Leaf {
    pub instance: SortInstance,
    pub status: LeafStatus,
}

#[derive(Debug, Clone)]
pub enum NodeBody {
    Composite(Vec<NodeId>),
    Leaf(Leaf),
}

#[derive(Debug, Clone)]
pub struct ConcernNode {
    pub id: NodeId,
    pub name: String,
    pub parent: Option<NodeId>,
    pub body: NodeBody,
}

impl ConcernNode {
    pub fn is_composite(&self) -> bool {
        matches!(self.body, NodeBody::Composite(_))
    }

    pub fn leaf(&self) -> Option<&Leaf> {
        match &self.body {
            NodeBody::Leaf(l) => Some(l),
            NodeBody::Composite(_) => None,
        }
    }

    pub fn children(&self) -> &[NodeId] {
        match &self.body {
            NodeBody::Composite(c) => c,
            NodeBody::Leaf(_) => &[],
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConcernModel {
    pub name: String,
    /// Hash of the store the model was last built or refreshed against.
    pub store_hash: String,
    virtual_interfaces: Vec<VirtualInterface>,
    nodes: BTreeMap<NodeId, ConcernNode>,
    root: NodeId,
    next_id: NodeId,
}

/// Structural equality: tree shape, names, ids, instances, roles and hashes.
/// Leaf status is derived state and is ignored.
impl PartialEq for ConcernModel {
    fn eq(&self, other: &Self) -> bool {
        document::to_document(self) == document::to_document(other)
    }
}

/// Tuple-level change of one leaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafDiff {
    pub node: NodeId,
    pub path: String,
    pub added: Vec<DiffTuple>,
    pub removed: Vec<DiffTuple>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub obligations_added: Vec<EntityId>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub obligations_removed: Vec<EntityId>,
}

impl LeafDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty()
            && self.removed.is_empty()
            && self.obligations_added.is_empty()
            && self.obligations_removed.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DiffTuple {
    pub source: EntityId,
    pub target: EntityId,
    pub kind: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RefreshReport {
    /// Leaves that were re-evaluated, with their (possibly empty) diffs.
    pub diffs: Vec<LeafDiff>,
    /// Leaves that failed to re-evaluate; they are left broken.
    pub errors: Vec<LeafError>,
}

impl RefreshReport {
    /// True when no re-evaluated leaf changed and none failed.
    pub fn is_unchanged(&self) -> bool {
        self.errors.is_empty() && self.diffs.iter().all(LeafDiff::is_empty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafError {
    pub node: NodeId,
    pub path: String,
    pub message: String,
}

impl ConcernModel {
    pub fn new(name: &str) -> ConcernModel {
        let root = ConcernNode {
            id: 0,
            name: name.to_string(),
            parent: None,
            body: NodeBody::Composite(Vec::new()),
        };
        ConcernModel {
            name: name.to_string(),
            store_hash: String::new(),
            virtual_interfaces: Vec::new(),
            nodes: BTreeMap::from([(0, root)]),
            root: 0,
            next_id: 1,
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> Option<&ConcernNode> {
        self.nodes.get(&id)
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        self.nodes.get(&id).map(ConcernNode::children).unwrap_or(&[])
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes.get(&id).and_then(|n| n.parent)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    /// Leaves in depth-first, child-order.
    pub fn leaves(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.walk(self.root, &mut |n| {
            if !n.is_composite() {
                out.push(n.id);
            }
        });
        out
    }

    /// Every node in depth-first, child-order, root first.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.walk(self.root, &mut |n| out.push(n.id));
        out
    }

    fn walk<'a>(&'a self, id: NodeId, f: &mut impl FnMut(&'a ConcernNode)) {
        if let Some(n) = self.nodes.get(&id) {
            f(n);
            for c in n.children() {
                self.walk(*c, f);
            }
        }
    }

    /// `/`-separated names below the root, e.g. `Observer/Notification`.
    pub fn path(&self, id: NodeId) -> String {
        let mut parts = Vec::new();
        let mut cur = Some(id);
        while let Some(c) = cur {
            if c == self.root {
                break;
            }
            let Some(n) = self.nodes.get(&c) else { break };
            parts.push(n.name.as_str());
            cur = n.parent;
        }
        parts.reverse();
        parts.join("/")
    }

    /// Resolves a path produced by [`ConcernModel::path`]; the empty path is the root.
    pub fn find_path(&self, path: &str) -> Option<NodeId> {
        let mut cur = self.root;
        for part in path.split('/').filter(|p| !p.is_empty()) {
            cur = *self
                .children(cur)
                .iter()
                .find(|c| self.nodes[c].name == part)?;
        }
        Some(cur)
    }

    /// Resolves either a numeric node id or a path.
    pub fn resolve_node(&self, text: &str) -> Result<NodeId, ModelError> {
        if let Ok(id) = text.parse::<NodeId>() {
            if self.nodes.contains_key(&id) {
                return Ok(id);
            }
        }
        self.find_path(text).ok_or_else(|| ModelError::UnknownPath(text.to_string()))
    }

    fn check_slot(&self, parent: NodeId, name: &str) -> Result<(), ModelError> {
        let p = self.nodes.get(&parent).ok_or(ModelError::UnknownNode(parent))?;
        if !p.is_composite() {
            return Err(ModelError::NotAComposite(parent));
        }
        if name.is_empty() || name.contains('/') {
            return Err(ModelError::EmptyName);
        }
        if p.children().iter().any(|c| self.nodes[c].name == name) {
            return Err(ModelError::NameClash(name.to_string()));
        }
        Ok(())
    }

    fn attach(&mut self, parent: NodeId, name: &str, body: NodeBody) -> NodeId {
        let id = self.next_id;
        self.next_id += 1;
        self.nodes.insert(
            id,
            ConcernNode {
                id,
                name: name.to_string(),
                parent: Some(parent),
                body,
            },
        );
        if let NodeBody::Composite(c) = &mut self.nodes.get_mut(&parent).expect("checked").body {
            c.push(id);
        }
        id
    }

    pub fn add_composite(&mut self, parent: NodeId, name: &str) -> Result<NodeId, ModelError> {
        self.check_slot(parent, name)?;
        Ok(self.attach(parent, name, NodeBody::Composite(Vec::new())))
    }

    /// Adds a leaf. The instance is taken as freshly computed.
    pub fn add_instance(&mut self, parent: NodeId, instance: SortInstance, name: &str) -> Result<NodeId, ModelError> {
        self.check_slot(parent, name)?;
        if self.store_hash.is_empty() {
            self.store_hash = instance.store_hash.clone();
        }
        let status = if instance.store_hash == self.store_hash {
            LeafStatus::Fresh
        } else {
            LeafStatus::Stale
        };
        Ok(self.attach(parent, name, NodeBody::Leaf(Leaf { instance, status })))
    }

    /// Adds a composite holding one leaf per instance, named after the
    /// instances. Nothing is added if any name clashes.
    pub fn add_pattern(
        &mut self,
        parent: NodeId,
        name: &str,
        instances: Vec<SortInstance>,
    ) -> Result<NodeId, ModelError> {
        self.check_slot(parent, name)?;
        let mut seen = BTreeSet::new();
        for i in &instances {
            if i.name.is_empty() || i.name.contains('/') {
                return Err(ModelError::EmptyName);
            }
            if !seen.insert(i.name.as_str()) {
                return Err(ModelError::NameClash(i.name.clone()));
            }
        }
        let group = self.attach(parent, name, NodeBody::Composite(Vec::new()));
        for i in instances {
            let n = i.name.clone();
            self.add_instance(group, i, &n).expect("names checked above");
        }
        Ok(group)
    }

    /// Defines the file's virtual interfaces, composes its pattern and adds
    /// the result as a composite. Either everything is added or nothing.
    pub fn add_bindings(
        &mut self,
        store: &FactStore,
        parent: NodeId,
        name: &str,
        file: &BindingsFile,
    ) -> Result<NodeId, ModelError> {
        let mut next = self.clone();
        for role in &file.virtual_interfaces {
            match next.virtual_interface(&role.name) {
                Some(v) if v.role_spec().members.iter().eq(sorted_members(role).iter()) && v.host_type == role.host => {}
                Some(_) => return Err(ModelError::DuplicateRole(role.name.clone())),
                None => {
                    next.define_virtual_interface(store, &role.host, role.members.clone(), &role.name)?;
                }
            }
        }
        let instances = compose_pattern(store, &next.role_specs(), &file.pattern, &file.bindings)?;
        let id = next.add_pattern(parent, name, instances)?;
        *self = next;
        Ok(id)
    }

    /// Removes a node and its subtree.
    pub fn remove(&mut self, id: NodeId) -> Result<(), ModelError> {
        if id == self.root {
            return Err(ModelError::RootNode);
        }
        let node = self.nodes.get(&id).ok_or(ModelError::UnknownNode(id))?;
        let parent = node.parent.expect("non-root nodes have a parent");
        let mut doomed = Vec::new();
        self.walk(id, &mut |n| doomed.push(n.id));
        for d in doomed {
            self.nodes.remove(&d);
        }
        if let NodeBody::Composite(c) = &mut self.nodes.get_mut(&parent).expect("parent exists").body {
            c.retain(|c| *c != id);
        }
        Ok(())
    }

    pub fn move_node(&mut self, id: NodeId, new_parent: NodeId) -> Result<(), ModelError> {
        if id == self.root {
            return Err(ModelError::RootNode);
        }
        let node = self.nodes.get(&id).ok_or(ModelError::UnknownNode(id))?;
        let old_parent = node.parent.expect("non-root nodes have a parent");
        let name = node.name.clone();
        if !self.nodes.contains_key(&new_parent) {
            return Err(ModelError::UnknownNode(new_parent));
        }
        let mut cur = Some(new_parent);
        while let Some(c) = cur {
            if c == id {
                return Err(ModelError::CycleAttempt { node: id, parent: new_parent });
            }
            cur = self.nodes[&c].parent;
        }
        if old_parent == new_parent {
            return Ok(());
        }
        self.check_slot(new_parent, &name)?;
        if let NodeBody::Composite(c) = &mut self.nodes.get_mut(&old_parent).expect("exists").body {
            c.retain(|c| *c != id);
        }
        if let NodeBody::Composite(c) = &mut self.nodes.get_mut(&new_parent).expect("exists").body {
            c.push(id);
        }
        self.nodes.get_mut(&id).expect("exists").parent = Some(new_parent);
        Ok(())
    }

    pub fn rename(&mut self, id: NodeId, name: &str) -> Result<(), ModelError> {
        let node = self.nodes.get(&id).ok_or(ModelError::UnknownNode(id))?;
        if node.name == name {
            return Ok(());
        }
        match node.parent {
            Some(p) => self.check_slot(p, name)?,
            None if name.is_empty() => return Err(ModelError::EmptyName),
            None => self.name = name.to_string(),
        }
        self.nodes.get_mut(&id).expect("exists").name = name.to_string();
        Ok(())
    }

    pub fn virtual_interfaces(&self) -> &[VirtualInterface] {
        &self.virtual_interfaces
    }

    pub fn virtual_interface(&self, role_name: &str) -> Option<&VirtualInterface> {
        self.virtual_interfaces.iter().find(|v| v.role_name == role_name)
    }

    pub fn add_virtual_interface(&mut self, vi: VirtualInterface) -> Result<(), ModelError> {
        if self.virtual_interface(&vi.role_name).is_some() {
            return Err(ModelError::DuplicateRole(vi.role_name));
        }
        self.virtual_interfaces.push(vi);
        Ok(())
    }

    /// Checks the member set against `store` and adds the role.
    pub fn define_virtual_interface(
        &mut self,
        store: &FactStore,
        host: &EntityId,
        members: impl IntoIterator<Item = impl Into<String>>,
        role_name: &str,
    ) -> Result<&VirtualInterface, ModelError> {
        if self.virtual_interface(role_name).is_some() {
            return Err(ModelError::DuplicateRole(role_name.to_string()));
        }
        let vi = VirtualInterface::define(store, host, members, role_name)?;
        self.virtual_interfaces.push(vi);
        Ok(self.virtual_interfaces.last().expect("just pushed"))
    }

    pub fn role_specs(&self) -> Vec<RoleSpec> {
        self.virtual_interfaces.iter().map(VirtualInterface::role_spec).collect()
    }

    /// Entities referenced by a leaf that `store` cannot resolve. Role
    /// entities count as present when their host is.
    pub fn dangling_refs(&self, store: &FactStore, instance: &SortInstance) -> Vec<EntityId> {
        let roles: BTreeSet<EntityId> = self
            .virtual_interfaces
            .iter()
            .filter(|v| store.contains(&v.host_type))
            .map(|v| v.id())
            .collect();
        let present = |id: &EntityId| store.contains(id) || roles.contains(id);
        let mut missing = BTreeSet::new();
        for t in &instance.result {
            for id in [&t.source, &t.target] {
                if !present(id) {
                    missing.insert(id.clone());
                }
            }
        }
        for id in instance.obligations.iter().flatten() {
            if !present(id) {
                missing.insert(id.clone());
            }
        }
        missing.into_iter().collect()
    }

    /// Recomputes every leaf's status against `store`.
    pub fn check(&mut self, store: &FactStore) {
        let statuses: Vec<(NodeId, LeafStatus)> = self
            .leaves()
            .into_iter()
            .map(|id| {
                let inst = &self.nodes[&id].leaf().expect("leaf").instance;
                let missing = self.dangling_refs(store, inst);
                let status = if !missing.is_empty() {
                    LeafStatus::Broken(missing.iter().map(|m| format!("dangling reference {m}")).collect())
                } else if inst.is_stale(store) {
                    LeafStatus::Stale
                } else {
                    LeafStatus::Fresh
                };
                (id, status)
            })
            .collect();
        for (id, status) in statuses {
            if let NodeBody::Leaf(l) = &mut self.nodes.get_mut(&id).expect("exists").body {
                l.status = status;
            }
        }
    }

    pub fn status(&self, id: NodeId) -> Option<&LeafStatus> {
        self.nodes.get(&id)?.leaf().map(|l| &l.status)
    }

    /// Re-evaluates stale and broken leaves (every leaf when `force`) and
    /// reports what changed. A failing leaf is marked broken and reported; the
    /// remaining leaves are still refreshed.
    pub fn refresh(&mut self, store: &FactStore, force: bool) -> RefreshReport {
        self.check(store);
        let mut report = RefreshReport::default();
        for id in self.leaves() {
            let due = force || !matches!(self.status(id), Some(LeafStatus::Fresh));
            if !due {
                continue;
            }
            match self.refresh_leaf(id, store, None) {
                Ok(diff) => report.diffs.push(diff),
                Err(e) => report.errors.push(LeafError {
                    node: id,
                    path: self.path(id),
                    message: e.to_string(),
                }),
            }
        }
        self.store_hash = store.hash().to_string();
        report
    }

    /// Re-evaluates one leaf, optionally with replacement parameters, and
    /// replaces its cached result. On failure the leaf keeps its old result
    /// and is marked broken.
    pub fn refresh_leaf(
        &mut self,
        id: NodeId,
        store: &FactStore,
        params: Option<Params>,
    ) -> Result<LeafDiff, ModelError> {
        let node = self.nodes.get(&id).ok_or(ModelError::UnknownNode(id))?;
        let leaf = node.leaf().ok_or(ModelError::UnknownNode(id))?;
        let old = leaf.instance.clone();
        let spec = SortSpec {
            kind: old.kind,
            params: params.unwrap_or_else(|| old.params.clone()),
        };
        let roles: Vec<RoleSpec> = self
            .virtual_interfaces
            .iter()
            .filter(|v| store.contains(&v.host_type))
            .map(VirtualInterface::role_spec)
            .collect();
        match instantiate(store, &roles, &old.name, &spec) {
            Ok(new) => {
                let diff = diff_instances(id, self.path(id), &old, &new);
                if let NodeBody::Leaf(l) = &mut self.nodes.get_mut(&id).expect("exists").body {
                    l.instance = new;
                    l.status = LeafStatus::Fresh;
                }
                Ok(diff)
            }
            Err(e) => {
                if let NodeBody::Leaf(l) = &mut self.nodes.get_mut(&id).expect("exists").body {
                    l.status = LeafStatus::Broken(vec![e.to_string()]);
                }
                Err(e.into())
            }
        }
    }

    /// Leaves whose result has `entity` as a tuple endpoint.
    pub fn touching(&self, entity: &EntityId) -> Vec<NodeId> {
        self.leaves()
            .into_iter()
            .filter(|id| self.nodes[id].leaf().is_some_and(|l| l.instance.touches(entity)))
            .collect()
    }

    /// Sites at which a leaf's tuples touch `entity`.
    pub fn touching_sites(&self, id: NodeId, entity: &EntityId) -> Vec<Location> {
        let Some(leaf) = self.nodes.get(&id).and_then(ConcernNode::leaf) else {
            return Vec::new();
        };
        let mut sites: BTreeSet<Location> = BTreeSet::new();
        for t in &leaf.instance.result {
            if &t.source == entity || &t.target == entity {
                sites.extend(t.sites.iter().cloned());
            }
        }
        sites.into_iter().collect()
    }
}

fn sorted_members(role: &RoleSpec) -> Vec<String> {
    let set: BTreeSet<&String> = role.members.iter().collect();
    set.into_iter().cloned().collect()
}

fn diff_keys(i: &SortInstance) -> BTreeSet<DiffTuple> {
    let set: TupleSet = i.tuples();
    set.iter()
        .map(|(s, t, k, _)| DiffTuple {
            source: s.clone(),
            target: t.clone(),
            kind: relation_name(k),
        })
        .collect()
}

fn relation_name(r: Relation) -> String {
    r.name().to_string()
}

pub fn diff_instances(node: NodeId, path: String, old: &SortInstance, new: &SortInstance) -> LeafDiff {
    let (a, b) = (diff_keys(old), diff_keys(new));
    let oa: BTreeSet<&EntityId> = old.obligations.iter().flatten().collect();
    let ob: BTreeSet<&EntityId> = new.obligations.iter().flatten().collect();
    LeafDiff {
        node,
        path,
        added: b.difference(&a).cloned().collect(),
        removed: a.difference(&b).cloned().collect(),
        obligations_added: ob.difference(&oa).map(|e| (*e).clone()).collect(),
        obligations_removed: oa.difference(&ob).map(|e| (*e).clone()).collect(),
    }
}
