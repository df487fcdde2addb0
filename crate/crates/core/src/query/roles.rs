// SPDX-License-Identifier: Apache-2.0

//! Virtual interfaces as a query-time overlay.
//!
//! A role is a named set of member patterns selected from a host type. For
//! evaluation the role becomes a `VirtualInterface` entity contained in the
//! host, with an `Implements` fact from every class or interface that
//! declares or inherits a member matching each pattern.

use serde::{Deserialize, Serialize};

use crate::facts::{Entity, EntityId, EntityKind, Fact, FactKind, FactStore, FactsError};

use super::eval::Evaluator;
use super::parser::parse_pattern;
use super::pattern::{Pattern, Selector};
use super::QueryError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleSpec {
    pub name: String,
    pub host: EntityId,
    /// Member patterns without selector, e.g. `clone()` or `visit(FigureVisitor)`.
    pub members: Vec<String>,
}

impl RoleSpec {
    pub fn patterns(&self) -> Result<Vec<Pattern>, QueryError> {
        self.members
            .iter()
            .map(|m| {
                let mut p = parse_pattern(m)?;
                if p.selector.is_none() {
                    p.selector = Some(Selector::Member);
                }
                Ok(p)
            })
            .collect()
    }

    /// Types that declare or inherit a match for every member pattern.
    pub fn satisfiers(&self, store: &FactStore) -> Result<Vec<EntityId>, QueryError> {
        let patterns = self.patterns()?;
        let ev = Evaluator::new(store);
        let mut out = Vec::new();
        for ty in store
            .entities()
            .filter(|e| matches!(e.kind, EntityKind::Class | EntityKind::Interface))
        {
            let supers = ev.supertypes(&ty.id);
            let satisfied = patterns.iter().all(|p| {
                supers.iter().any(|s| {
                    store
                        .children(s)
                        .iter()
                        .filter_map(|c| store.entity(c))
                        .any(|m| m.kind.is_member() && p.matches(store, m))
                })
            });
            if satisfied {
                out.push(ty.id.clone());
            }
        }
        Ok(out)
    }
}

/// The entity a role is represented by.
pub fn role_entity(store: &FactStore, role: &RoleSpec) -> Option<Entity> {
    let host = store.entity(&role.host)?;
    Some(
        Entity::new(
            EntityKind::VirtualInterface,
            role.name.clone(),
            format!("{}${}", host.qualified_name, role.name),
            "",
        )
        .in_parent(&host.id)
        .at(host.location.clone()),
    )
}

#[derive(Debug, thiserror::Error)]
pub enum OverlayError {
    #[error("role `{0}`: host type is not in the store")]
    MissingHost(String),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Facts(#[from] FactsError),
}

/// A copy of `store` extended with the given roles.
pub fn overlay_roles(store: &FactStore, roles: &[RoleSpec]) -> Result<FactStore, OverlayError> {
    if roles.is_empty() {
        return Ok(store.clone());
    }
    let mut builder = store.to_builder();
    for role in roles {
        let entity = role_entity(store, role).ok_or_else(|| OverlayError::MissingHost(role.name.clone()))?;
        let role_id = builder.add_entity(entity)?;
        for ty in role.satisfiers(store)? {
            let site = store.entity(&ty).map(|e| e.location.clone()).unwrap_or_default();
            builder.add_fact(Fact::new(FactKind::Implements, &ty, &role_id, site))?;
        }
    }
    Ok(builder.seal()?)
}
