// SPDX-License-Identifier: Apache-2.0

//! Design patterns as compositions of sort instances.
//!
//! Each row lists the instances documenting one pattern. Parameters come
//! from named bindings; optional instances are produced only when their
//! bindings are present.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::facts::FactStore;
use crate::query::RoleSpec;

use super::{instantiate, SortError, SortInstance, SortKind, SortSpec};

#[derive(Debug)]
pub struct InstanceTemplate {
    pub name: &'static str,
    pub kind: SortKind,
    pub optional: bool,
    /// `(sort parameter, binding key)`
    pub params: &'static [(&'static str, &'static str)],
}

#[derive(Debug)]
pub struct PatternRow {
    pub name: &'static str,
    pub instances: &'static [InstanceTemplate],
}

impl PatternRow {
    /// Binding keys used by the row, in order of first use.
    pub fn binding_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        for inst in self.instances {
            for (_, key) in inst.params {
                if !keys.contains(key) {
                    keys.push(*key);
                }
            }
        }
        keys
    }
}

const fn core(
    name: &'static str,
    kind: SortKind,
    params: &'static [(&'static str, &'static str)],
) -> InstanceTemplate {
    InstanceTemplate {
        name,
        kind,
        optional: false,
        params,
    }
}

const fn extra(
    name: &'static str,
    kind: SortKind,
    params: &'static [(&'static str, &'static str)],
) -> InstanceTemplate {
    InstanceTemplate {
        name,
        kind,
        optional: true,
        params,
    }
}

use SortKind::*;

pub static PATTERNS: [PatternRow; 16] = [
    PatternRow {
        name: "adapter",
        instances: &[
            core("Adaptee role", RSI, &[("role", "adaptee"), ("context", "adaptee_context")]),
            core("Adapter forwarding", RL, &[("type", "adapter"), ("reference", "adaptee_reference")]),
        ],
    },
    PatternRow {
        name: "state",
        instances: &[
            core("Context role", RSI, &[("role", "context_role"), ("context", "context_role_context")]),
            core("State change", CB, &[("context", "state_changers"), ("target", "change_state")]),
            core("State forwarding", RL, &[("type", "context_type"), ("reference", "state_reference")]),
        ],
    },
    PatternRow {
        name: "decorator",
        instances: &[core(
            "Decorator forwarding",
            RL,
            &[("type", "decorator"), ("reference", "component_reference")],
        )],
    },
    PatternRow {
        name: "proxy",
        instances: &[
            core("Proxy forwarding", RL, &[("type", "proxy"), ("reference", "subject_reference")]),
            extra("Access check", CB, &[("context", "protected_context"), ("target", "check_access")]),
        ],
    },
    PatternRow {
        name: "visitor",
        instances: &[
            core("Visitable role", RSI, &[("role", "visitable"), ("context", "visitable_context")]),
            extra("Visitable method objects", AV, &[("type", "visitable_method_object")]),
        ],
    },
    PatternRow {
        name: "command",
        instances: &[
            core("Receiver role", RSI, &[("role", "receiver"), ("context", "receiver_context")]),
            core("Invoker interfacing", ER, &[("type", "invoker"), ("reference", "command_reference")]),
            core("Invoker role", RSI, &[("role", "invoker_role"), ("context", "invoker_context")]),
            core("Command execution", CB, &[("context", "invokers_context"), ("target", "execute")]),
            extra("Command method objects", AV, &[("type", "command_method_object")]),
        ],
    },
    PatternRow {
        name: "composite",
        instances: &[core("Composite role", RSI, &[("role", "composite"), ("context", "composite_context")])],
    },
    PatternRow {
        name: "iterator",
        instances: &[core("Aggregate role", RSI, &[("role", "aggregate"), ("context", "aggregate_context")])],
    },
    PatternRow {
        name: "flyweight",
        instances: &[
            core("Flyweight role", RSI, &[("role", "flyweight"), ("context", "flyweight_context")]),
            core("Flyweight lookup", CB, &[("context", "factory_clients"), ("target", "get_flyweight")]),
        ],
    },
    PatternRow {
        name: "memento",
        instances: &[
            core("Originator role", RSI, &[("role", "originator"), ("context", "originator_context")]),
            core("Memento creation", CB, &[("context", "caretakers"), ("target", "create_memento")]),
        ],
    },
    PatternRow {
        name: "strategy",
        instances: &[
            core("Context role", RSI, &[("role", "context_role"), ("context", "context_role_context")]),
            extra("Strategy role", RSI, &[("role", "strategy"), ("context", "strategy_context")]),
        ],
    },
    PatternRow {
        name: "mediator",
        instances: &[
            core("Colleague role", RSI, &[("role", "colleague"), ("context", "colleague_context")]),
            core("Mediator notification", CB, &[("context", "notifiers"), ("target", "notify_mediator")]),
        ],
    },
    PatternRow {
        name: "chain-of-responsibility",
        instances: &[
            core("Handler role", RSI, &[("role", "handler"), ("context", "handler_context")]),
            core("Successor forwarding", RL, &[("type", "handler_type"), ("reference", "successor_reference")]),
        ],
    },
    PatternRow {
        name: "prototype",
        instances: &[
            core("Prototype role", RSI, &[("role", "prototype"), ("context", "prototype_context")]),
            extra("Clone declaration", DE, &[("context", "cloneable_context"), ("member", "clone_member")]),
        ],
    },
    PatternRow {
        name: "singleton",
        instances: &[
            core("Singleton role", RSI, &[("role", "singleton"), ("context", "singleton_context")]),
            core("Private constructor", DE, &[("context", "singleton_types"), ("member", "constructor")]),
            core("Instance access", CB, &[("context", "clients"), ("target", "instance_access")]),
        ],
    },
    PatternRow {
        name: "observer",
        instances: &[
            core("Observer role", RSI, &[("role", "observer"), ("context", "observer_context")]),
            core("Subject role", RSI, &[("role", "subject"), ("context", "subject_context")]),
            core("Notification", CB, &[("context", "notify_context"), ("target", "notify")]),
            core("Attach observer", CB, &[("context", "attach_context"), ("target", "attach")]),
            core("Detach observer", CB, &[("context", "detach_context"), ("target", "detach")]),
        ],
    },
];

fn normalize(name: &str) -> String {
    name.trim().to_ascii_lowercase().replace([' ', '_'], "-")
}

pub fn find_pattern(name: &str) -> Option<&'static PatternRow> {
    let wanted = normalize(name);
    PATTERNS.iter().find(|row| row.name == wanted)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedInstance {
    pub name: String,
    pub spec: SortSpec,
}

/// The instances a pattern row yields for the given bindings.
pub fn pattern_plan(name: &str, bindings: &BTreeMap<String, String>) -> Result<Vec<PlannedInstance>, SortError> {
    let row = find_pattern(name).ok_or_else(|| SortError::UnknownPattern(name.to_string()))?;
    let keys = row.binding_keys();
    if let Some(unknown) = bindings.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(SortError::UnknownParam(unknown.clone()));
    }
    let mut planned = Vec::new();
    for inst in row.instances {
        let bound: Vec<Option<&String>> = inst.params.iter().map(|(_, key)| bindings.get(*key)).collect();
        if inst.optional && bound.iter().all(Option::is_none) {
            continue;
        }
        let mut spec = SortSpec::new(inst.kind, []);
        for ((param, key), value) in inst.params.iter().zip(bound) {
            let value = value.ok_or_else(|| SortError::MissingBinding(key.to_string()))?;
            spec.params.insert(param.to_string(), value.clone());
        }
        planned.push(PlannedInstance {
            name: inst.name.to_string(),
            spec,
        });
    }
    Ok(planned)
}

/// Builds every instance of a pattern row against a store.
pub fn compose_pattern(
    store: &FactStore,
    roles: &[RoleSpec],
    name: &str,
    bindings: &BTreeMap<String, String>,
) -> Result<Vec<SortInstance>, SortError> {
    pattern_plan(name, bindings)?
        .into_iter()
        .map(|p| instantiate(store, roles, &p.name, &p.spec))
        .collect()
}

/// A pattern name with its bindings and the virtual interfaces they use, as
/// stored in a `bindings.toml` file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BindingsFile {
    pub pattern: String,
    #[serde(default)]
    pub bindings: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub virtual_interfaces: Vec<RoleSpec>,
}

impl BindingsFile {
    pub fn from_toml(text: &str) -> Result<BindingsFile, SortError> {
        toml::from_str(text).map_err(|e| SortError::BadBindings(e.to_string()))
    }

    pub fn plan(&self) -> Result<Vec<PlannedInstance>, SortError> {
        pattern_plan(&self.pattern, &self.bindings)
    }

    pub fn compose(&self, store: &FactStore) -> Result<Vec<SortInstance>, SortError> {
        compose_pattern(store, &self.virtual_interfaces, &self.pattern, &self.bindings)
    }
}
