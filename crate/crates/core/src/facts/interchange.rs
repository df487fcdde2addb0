// SPDX-License-Identifier: Apache-2.0

//! Line-delimited JSON interchange for fact stores.
//!
//! The first line is a header record; every following line is either an
//! entity or a fact record. Records may appear in any order after the header,
//! so external extractors can stream facts before the entities they mention.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::entity::{Entity, EntityId, EntityKind, Location, Modifier};
use super::error::FactsError;
use super::fact::{Fact, FactKind};
use super::store::{FactStore, StoreBuilder};

pub const SCHEMA: &str = "soquet-facts/1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "rec", rename_all = "lowercase", deny_unknown_fields)]
enum Record {
    Header {
        schema: String,
    },
    Entity {
        id: EntityId,
        kind: EntityKind,
        name: String,
        qname: String,
        sig: String,
        declared_in: Option<EntityId>,
        mods: Vec<Modifier>,
        loc: Location,
    },
    Fact {
        kind: FactKind,
        src: EntityId,
        tgt: EntityId,
        loc: Location,
    },
}

fn entity_record(e: &Entity) -> Record {
    Record::Entity {
        id: e.id.clone(),
        kind: e.kind,
        name: e.simple_name.clone(),
        qname: e.qualified_name.clone(),
        sig: e.signature.clone(),
        declared_in: e.declared_in.clone(),
        mods: e.modifiers.iter().copied().collect(),
        loc: e.location.clone(),
    }
}

fn fact_record(f: &Fact) -> Record {
    Record::Fact {
        kind: f.kind,
        src: f.source.clone(),
        tgt: f.target.clone(),
        loc: f.site.clone(),
    }
}

fn line(record: &Record) -> String {
    serde_json::to_string(record).expect("records always serialize")
}

pub(crate) fn canonical_text<'a>(
    entities: impl Iterator<Item = &'a Entity>,
    facts: impl Iterator<Item = &'a Fact>,
) -> String {
    let mut out = line(&Record::Header {
        schema: SCHEMA.to_string(),
    });
    out.push('\n');
    for e in entities {
        out.push_str(&line(&entity_record(e)));
        out.push('\n');
    }
    for f in facts {
        out.push_str(&line(&fact_record(f)));
        out.push('\n');
    }
    out
}

/// Writes the canonical serialization of a sealed store.
pub fn export_facts(store: &FactStore, mut sink: impl Write) -> Result<(), FactsError> {
    sink.write_all(store.canonical_text().as_bytes())?;
    sink.flush()?;
    Ok(())
}

/// Reads an interchange stream and seals the resulting store.
pub fn import_facts(source: impl BufRead) -> Result<FactStore, FactsError> {
    let mut header_seen = false;
    let mut entities: BTreeMap<EntityId, (usize, Entity)> = BTreeMap::new();
    let mut facts: Vec<(usize, Fact)> = Vec::new();

    for (idx, text) in source.lines().enumerate() {
        let lineno = idx + 1;
        let text = text?;
        if text.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&text).map_err(|e| FactsError::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        match record {
            Record::Header { schema } => {
                if header_seen {
                    return Err(parse_error(lineno, "duplicate header record"));
                }
                if schema != SCHEMA {
                    return Err(FactsError::SchemaVersionMismatch { found: schema });
                }
                header_seen = true;
            }
            _ if !header_seen => {
                return Err(parse_error(lineno, "first record must be the header"));
            }
            Record::Entity {
                id,
                kind,
                name,
                qname,
                sig,
                declared_in,
                mods,
                loc,
            } => {
                let mut entity = Entity::new(kind, name, qname, sig).with_modifiers(mods).at(loc);
                entity.declared_in = declared_in;
                if entity.id != id {
                    return Err(parse_error(
                        lineno,
                        &format!("id `{id}` does not match its kind/qname/sig (expected `{}`)", entity.id),
                    ));
                }
                if entities.insert(id.clone(), (lineno, entity)).is_some() {
                    return Err(parse_error(lineno, &format!("duplicate entity `{id}`")));
                }
            }
            Record::Fact { kind, src, tgt, loc } => {
                facts.push((lineno, Fact::new(kind, &src, &tgt, loc)));
            }
        }
    }
    if !header_seen {
        return Err(parse_error(1, "missing header record"));
    }

    let mut builder = StoreBuilder::new();
    // Parents first: resolve forward references by walking each entity's
    // declared_in chain before adding it.
    let mut added: HashMap<EntityId, ()> = HashMap::new();
    for id in entities.keys() {
        let mut chain = vec![id.clone()];
        while let Some(parent) = entities
            .get(chain.last().unwrap())
            .and_then(|(_, e)| e.declared_in.clone())
        {
            if added.contains_key(&parent) {
                break;
            }
            if chain.contains(&parent) {
                let (lineno, _) = &entities[id];
                return Err(parse_error(*lineno, &format!("declared_in cycle through `{parent}`")));
            }
            if !entities.contains_key(&parent) {
                let (lineno, _) = &entities[chain.last().unwrap()];
                return Err(parse_error(
                    *lineno,
                    &format!("declared_in references unknown entity `{parent}`"),
                ));
            }
            chain.push(parent);
        }
        for pending in chain.into_iter().rev() {
            if added.contains_key(&pending) {
                continue;
            }
            let (lineno, entity) = &entities[&pending];
            builder
                .add_entity(entity.clone())
                .map_err(|e| parse_error(*lineno, &e.to_string()))?;
            added.insert(pending, ());
        }
    }
    for (lineno, fact) in facts {
        for endpoint in [&fact.source, &fact.target] {
            if !entities.contains_key(endpoint) {
                return Err(parse_error(
                    lineno,
                    &format!("fact references unknown entity `{endpoint}`"),
                ));
            }
        }
        builder
            .add_fact(fact)
            .map_err(|e| parse_error(lineno, &e.to_string()))?;
    }
    builder.seal()
}

fn parse_error(line: usize, message: &str) -> FactsError {
    FactsError::Parse {
        line,
        message: message.to_string(),
    }
}
