// SPDX-License-Identifier: Apache-2.0

//! User-defined roles over a host type's members.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::facts::{EntityId, EntityKind, FactStore};
use crate::query::{Evaluator, RoleSpec};

use super::ModelError;

/// A named subset of a host type's members, queried as if it were an
/// interface the host (and any other type with matching members) implements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VirtualInterface {
    pub role_name: String,
    pub host_type: EntityId,
    /// Member patterns such as `clone()`, `visit(FigureVisitor)` or a field name.
    pub member_signatures: BTreeSet<String>,
}

/// A type matching some but not all of a role's member patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMatch {
    pub ty: EntityId,
    pub matched: Vec<String>,
    pub missing: Vec<String>,
}

impl VirtualInterface {
    /// Checks the definition against the host's declared members.
    pub fn define(
        store: &FactStore,
        host_type: &EntityId,
        member_signatures: impl IntoIterator<Item = impl Into<String>>,
        role_name: &str,
    ) -> Result<VirtualInterface, ModelError> {
        let host = store
            .entity(host_type)
            .filter(|e| matches!(e.kind, EntityKind::Class | EntityKind::Interface))
            .ok_or_else(|| ModelError::HostUnresolved(host_type.to_string()))?;
        if role_name.is_empty() || !role_name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(ModelError::BadRoleName(role_name.to_string()));
        }
        let vi = VirtualInterface {
            role_name: role_name.to_string(),
            host_type: host.id.clone(),
            member_signatures: member_signatures.into_iter().map(Into::into).collect(),
        };
        if vi.member_signatures.is_empty() {
            return Err(ModelError::EmptyMemberSet);
        }
        let spec = vi.role_spec();
        let patterns = spec.patterns().map_err(|e| ModelError::Query(e.to_string()))?;
        for (text, pattern) in spec.members.iter().zip(&patterns) {
            let declared = store
                .children(&host.id)
                .iter()
                .filter_map(|c| store.entity(c))
                .any(|m| m.kind.is_member() && pattern.matches(store, m));
            if !declared {
                return Err(ModelError::NoMatchingMember(text.clone()));
            }
        }
        Ok(vi)
    }

    /// Id of the entity the role appears as in query results.
    pub fn id(&self) -> EntityId {
        let (_, host, _) = self.host_type.triple();
        EntityId::derive(EntityKind::VirtualInterface, &format!("{host}${}", self.role_name), "")
    }

    pub fn role_spec(&self) -> RoleSpec {
        RoleSpec {
            name: self.role_name.clone(),
            host: self.host_type.clone(),
            members: self.member_signatures.iter().cloned().collect(),
        }
    }

    /// Types that satisfy every member pattern.
    pub fn satisfiers(&self, store: &FactStore) -> Result<Vec<EntityId>, ModelError> {
        self.role_spec()
            .satisfiers(store)
            .map_err(|e| ModelError::Query(e.to_string()))
    }

    /// Types matching at least one member pattern but not all of them.
    pub fn partial_matches(&self, store: &FactStore) -> Result<Vec<PartialMatch>, ModelError> {
        let spec = self.role_spec();
        let patterns = spec.patterns().map_err(|e| ModelError::Query(e.to_string()))?;
        let ev = Evaluator::new(store);
        let mut out = Vec::new();
        for ty in store
            .entities()
            .filter(|e| matches!(e.kind, EntityKind::Class | EntityKind::Interface))
        {
            let supers = ev.supertypes(&ty.id);
            let (mut matched, mut missing) = (Vec::new(), Vec::new());
            for (text, p) in spec.members.iter().zip(&patterns) {
                let hit = supers.iter().any(|s| {
                    store
                        .children(s)
                        .iter()
                        .filter_map(|c| store.entity(c))
                        .any(|m| m.kind.is_member() && p.matches(store, m))
                });
                if hit {
                    matched.push(text.clone());
                } else {
                    missing.push(text.clone());
                }
            }
            if !matched.is_empty() && !missing.is_empty() {
                out.push(PartialMatch {
                    ty: ty.id.clone(),
                    matched,
                    missing,
                });
            }
        }
        Ok(out)
    }
}
