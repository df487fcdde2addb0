// SPDX-License-Identifier: Apache-2.0

//! Program facts: entities, base relations and the sealed store.

mod entity;
mod error;
mod fact;
mod interchange;
mod store;

pub use entity::{Entity, EntityId, EntityKind, Location, Modifier};
pub use error::FactsError;
pub use fact::{Fact, FactKind};
pub use interchange::{export_facts, import_facts, SCHEMA};
pub use store::{FactStore, StoreBuilder};
