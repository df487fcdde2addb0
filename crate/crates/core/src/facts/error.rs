// SPDX-License-Identifier: Apache-2.0

use super::entity::{EntityId, EntityKind};
use super::fact::FactKind;

#[derive(Debug, thiserror::Error)]
pub enum FactsError {
    #[error("entity `{id}` already exists with different attributes")]
    DuplicateConflict { id: EntityId },
    #[error("entity `{id}` is declared in unknown entity `{parent}`")]
    DanglingParent { id: EntityId, parent: EntityId },
    #[error("fact endpoint `{id}` is not in the store")]
    EndpointMissing { id: EntityId },
    #[error("{kind} cannot connect {source_kind} to {target_kind}")]
    KindMismatch {
        kind: FactKind,
        source_kind: EntityKind,
        target_kind: EntityKind,
    },
    #[error("invalid entity `{id}`: {reason}")]
    InvalidEntity { id: EntityId, reason: String },
    #[error("entity `{id}` has more than one containment parent")]
    MultipleParents { id: EntityId },
    #[error("subtype cycle: {}", display_cycle(.cycle))]
    CycleDetected { cycle: Vec<EntityId> },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported fact schema `{found}` (expected `{}`)", super::interchange::SCHEMA)]
    SchemaVersionMismatch { found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn display_cycle(cycle: &[EntityId]) -> String {
    cycle
        .iter()
        .map(EntityId::as_str)
        .collect::<Vec<_>>()
        .join(" -> ")
}
