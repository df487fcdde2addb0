// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Range;

use sha2::{Digest, Sha256};

use super::entity::{Entity, EntityId, EntityKind};
use super::error::FactsError;
use super::fact::{Fact, FactKind};
use super::interchange;

/// A fact store under construction. Single writer; [`StoreBuilder::seal`]
/// validates it and produces the immutable [`FactStore`].
#[derive(Debug, Default, Clone)]
pub struct StoreBuilder {
    entities: BTreeMap<EntityId, Entity>,
    facts: BTreeSet<Fact>,
    project: Option<EntityId>,
}

impl StoreBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entity(&self, id: &EntityId) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn contains(&self, id: &EntityId) -> bool {
        self.entities.contains_key(id)
    }

    pub fn add_entity(&mut self, entity: Entity) -> Result<EntityId, FactsError> {
        let expected = EntityId::derive(entity.kind, &entity.qualified_name, &entity.signature);
        if expected != entity.id {
            return Err(FactsError::InvalidEntity {
                id: entity.id.clone(),
                reason: format!("id does not match its name triple (expected `{expected}`)"),
            });
        }
        check_shape(&entity)?;
        if let Some(existing) = self.entities.get(&entity.id) {
            return if *existing == entity {
                Ok(entity.id)
            } else {
                Err(FactsError::DuplicateConflict { id: entity.id })
            };
        }
        if let Some(parent) = &entity.declared_in {
            if !self.entities.contains_key(parent) {
                return Err(FactsError::DanglingParent {
                    id: entity.id.clone(),
                    parent: parent.clone(),
                });
            }
        }
        if entity.kind == EntityKind::Project {
            if let Some(existing) = &self.project {
                return Err(FactsError::InvalidEntity {
                    id: entity.id.clone(),
                    reason: format!("store already has project root `{existing}`"),
                });
            }
            self.project = Some(entity.id.clone());
        }
        let id = entity.id.clone();
        self.entities.insert(id.clone(), entity);
        Ok(id)
    }

    pub fn add_fact(&mut self, fact: Fact) -> Result<(), FactsError> {
        let source = self
            .entities
            .get(&fact.source)
            .ok_or_else(|| FactsError::EndpointMissing {
                id: fact.source.clone(),
            })?;
        let target = self
            .entities
            .get(&fact.target)
            .ok_or_else(|| FactsError::EndpointMissing {
                id: fact.target.clone(),
            })?;
        if !fact.kind.accepts(source.kind, target.kind) {
            return Err(FactsError::KindMismatch {
                kind: fact.kind,
                source_kind: source.kind,
                target_kind: target.kind,
            });
        }
        self.facts.insert(fact);
        Ok(())
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn fact_count(&self) -> usize {
        self.facts.len()
    }

    /// Containment parent of an entity: its `declared_in`, or the project
    /// root for packages.
    fn structural_parent(&self, entity: &Entity) -> Option<(FactKind, EntityId)> {
        match entity.kind {
            EntityKind::Project => None,
            EntityKind::Package => self
                .project
                .as_ref()
                .map(|root| (FactKind::Contains, root.clone())),
            kind => {
                let parent = entity.declared_in.clone()?;
                let fact_kind = if kind.is_type() {
                    FactKind::Contains
                } else {
                    FactKind::Declares
                };
                Some((fact_kind, parent))
            }
        }
    }

    pub fn seal(mut self) -> Result<FactStore, FactsError> {
        // Containment facts are implied by `declared_in`; add them so the
        // forest is explicit in the fact list.
        let derived: Vec<Fact> = self
            .entities
            .values()
            .filter_map(|e| {
                self.structural_parent(e)
                    .map(|(kind, parent)| Fact::new(kind, &parent, &e.id, e.location.clone()))
            })
            .collect();
        for fact in derived {
            self.add_fact(fact)?;
        }

        let mut parents: HashMap<&EntityId, &EntityId> = HashMap::new();
        for fact in self.facts.iter().filter(|f| f.kind.is_structural()) {
            if let Some(previous) = parents.insert(&fact.target, &fact.source) {
                if previous != &fact.source {
                    return Err(FactsError::MultipleParents {
                        id: fact.target.clone(),
                    });
                }
            }
        }
        for entity in self.entities.values() {
            let expected = self.structural_parent(entity).map(|(_, p)| p);
            if parents.get(&entity.id).copied() != expected.as_ref() {
                return Err(FactsError::InvalidEntity {
                    id: entity.id.clone(),
                    reason: "containment parent disagrees with declared_in".into(),
                });
            }
        }

        if let Some(cycle) = find_subtype_cycle(&self.facts) {
            return Err(FactsError::CycleDetected { cycle });
        }

        Ok(FactStore::build(
            self.entities,
            self.facts.into_iter().collect(),
            self.project,
        ))
    }
}

fn check_shape(entity: &Entity) -> Result<(), FactsError> {
    let invalid = |reason: &str| {
        Err(FactsError::InvalidEntity {
            id: entity.id.clone(),
            reason: reason.to_string(),
        })
    };
    if entity.kind.is_callable() == entity.signature.is_empty() {
        return invalid("methods and constructors need a signature; other entities must not have one");
    }
    let rootless = matches!(entity.kind, EntityKind::Project | EntityKind::Package);
    if rootless && entity.declared_in.is_some() {
        return invalid("projects and packages have no declaring parent");
    }
    if !rootless && entity.declared_in.is_none() {
        return invalid("entity needs a declaring parent");
    }
    if entity.simple_name.is_empty() || entity.qualified_name.is_empty() {
        return invalid("empty name");
    }
    Ok(())
}

fn find_subtype_cycle(facts: &BTreeSet<Fact>) -> Option<Vec<EntityId>> {
    let mut graph: BTreeMap<&EntityId, Vec<&EntityId>> = BTreeMap::new();
    for fact in facts
        .iter()
        .filter(|f| matches!(f.kind, FactKind::Extends | FactKind::Implements))
    {
        graph.entry(&fact.source).or_default().push(&fact.target);
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut marks: HashMap<&EntityId, Mark> = HashMap::new();
    for &start in graph.keys() {
        if marks.contains_key(start) {
            continue;
        }
        // Iterative DFS keeping the active path for cycle reporting.
        let mut path: Vec<&EntityId> = vec![start];
        let mut cursors: Vec<usize> = vec![0];
        marks.insert(start, Mark::Active);
        while let Some(&node) = path.last() {
            let idx = cursors.last_mut().unwrap();
            let next = graph.get(node).and_then(|succ| succ.get(*idx)).copied();
            *idx += 1;
            match next {
                Some(succ) => match marks.get(succ) {
                    Some(Mark::Active) => {
                        let pos = path.iter().position(|n| *n == succ).unwrap();
                        let mut cycle: Vec<EntityId> =
                            path[pos..].iter().map(|id| (*id).clone()).collect();
                        cycle.push(succ.clone());
                        return Some(cycle);
                    }
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(succ, Mark::Active);
                        path.push(succ);
                        cursors.push(0);
                    }
                },
                None => {
                    marks.insert(node, Mark::Done);
                    path.pop();
                    cursors.pop();
                }
            }
        }
    }
    None
}

/// The sealed, immutable program-fact store all queries run against.
#[derive(Debug, Clone)]
pub struct FactStore {
    entities: BTreeMap<EntityId, Entity>,
    facts: Vec<Fact>,
    kind_ranges: HashMap<FactKind, Range<usize>>,
    by_source: HashMap<(FactKind, EntityId), Vec<usize>>,
    by_target: HashMap<(FactKind, EntityId), Vec<usize>>,
    by_name: BTreeMap<String, Vec<EntityId>>,
    children: HashMap<EntityId, Vec<EntityId>>,
    parents: HashMap<EntityId, EntityId>,
    project: Option<EntityId>,
    hash: String,
}

impl FactStore {
    fn build(
        entities: BTreeMap<EntityId, Entity>,
        facts: Vec<Fact>,
        project: Option<EntityId>,
    ) -> FactStore {
        let mut kind_ranges: HashMap<FactKind, Range<usize>> = HashMap::new();
        let mut by_source: HashMap<(FactKind, EntityId), Vec<usize>> = HashMap::new();
        let mut by_target: HashMap<(FactKind, EntityId), Vec<usize>> = HashMap::new();
        let mut children: HashMap<EntityId, Vec<EntityId>> = HashMap::new();
        let mut parents: HashMap<EntityId, EntityId> = HashMap::new();
        for (i, fact) in facts.iter().enumerate() {
            kind_ranges
                .entry(fact.kind)
                .and_modify(|r| r.end = i + 1)
                .or_insert(i..i + 1);
            by_source
                .entry((fact.kind, fact.source.clone()))
                .or_default()
                .push(i);
            by_target
                .entry((fact.kind, fact.target.clone()))
                .or_default()
                .push(i);
            if fact.kind.is_structural() {
                let siblings = children.entry(fact.source.clone()).or_default();
                if !siblings.contains(&fact.target) {
                    siblings.push(fact.target.clone());
                }
                parents.insert(fact.target.clone(), fact.source.clone());
            }
        }
        let mut by_name: BTreeMap<String, Vec<EntityId>> = BTreeMap::new();
        for entity in entities.values() {
            by_name
                .entry(entity.qualified_name.clone())
                .or_default()
                .push(entity.id.clone());
        }
        let canonical = interchange::canonical_text(entities.values(), facts.iter());
        let hash = hex::encode(Sha256::digest(canonical.as_bytes()));
        FactStore {
            entities,
            facts,
            kind_ranges,
            by_source,
            by_target,
            by_name,
            children,
            parents,
            project,
            hash,
        }
    }

    pub fn empty() -> FactStore {
        StoreBuilder::new().seal().expect("empty store is valid")
    }

    /// Hex SHA-256 digest of the canonical serialization.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn project(&self) -> Option<&EntityId> {
        self.project.as_ref()
    }

    pub fn entity(&self, id: &EntityId) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn contains(&self, id: &EntityId) -> bool {
        self.entity(id).is_some()
    }

    pub fn entities(&self) -> impl Iterator<Item = &Entity> + '_ {
        self.entities.values()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    /// All facts in canonical order.
    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn facts_of_kind(&self, kind: FactKind) -> &[Fact] {
        match self.kind_ranges.get(&kind) {
            Some(range) => &self.facts[range.clone()],
            None => &[],
        }
    }

    pub fn facts_from<'a>(
        &'a self,
        kind: FactKind,
        source: &EntityId,
    ) -> impl Iterator<Item = &'a Fact> + 'a {
        self.by_source
            .get(&(kind, source.clone()))
            .into_iter()
            .flatten()
            .map(|&i| &self.facts[i])
    }

    pub fn facts_to<'a>(
        &'a self,
        kind: FactKind,
        target: &EntityId,
    ) -> impl Iterator<Item = &'a Fact> + 'a {
        self.by_target
            .get(&(kind, target.clone()))
            .into_iter()
            .flatten()
            .map(|&i| &self.facts[i])
    }

    pub fn by_qualified_name(&self, qname: &str) -> &[EntityId] {
        self.by_name.get(qname).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn children(&self, id: &EntityId) -> &[EntityId] {
        self.children.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn parent(&self, id: &EntityId) -> Option<&EntityId> {
        self.parents.get(id)
    }

    /// Per-kind fact counts, in kind order.
    pub fn fact_counts(&self) -> BTreeMap<FactKind, usize> {
        FactKind::ALL
            .into_iter()
            .map(|k| (k, self.facts_of_kind(k).len()))
            .filter(|(_, n)| *n > 0)
            .collect()
    }

    /// Resolves user-supplied entity text: a full id, a signature-qualified
    /// callable key (`p.Figure.changed()`), or a qualified name.
    pub fn resolve(&self, text: &str) -> Vec<EntityId> {
        if let Some(id) = EntityId::parse(text) {
            if self.entities.contains_key(&id) {
                return vec![id];
            }
        }
        if text.contains('(') {
            return [EntityKind::Method, EntityKind::Constructor]
                .into_iter()
                .filter_map(|k| EntityId::parse(&format!("{}:{}", k.tag(), text)))
                .filter(|id| self.entities.contains_key(id))
                .collect();
        }
        self.by_qualified_name(text).to_vec()
    }

    /// Canonical serialization (the interchange format).
    pub fn canonical_text(&self) -> String {
        interchange::canonical_text(self.entities.values(), self.facts.iter())
    }

    /// Re-opens the store for modification. The result must be sealed again.
    pub fn to_builder(&self) -> StoreBuilder {
        StoreBuilder {
            entities: self.entities.clone(),
            facts: self.facts.iter().cloned().collect(),
            project: self.project.clone(),
        }
    }
}
