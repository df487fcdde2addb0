// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Serialize};

use super::entity::{EntityId, EntityKind, Location};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FactKind {
    Declares,
    Contains,
    Extends,
    Implements,
    Invokes,
    Creates,
    Get,
    Set,
    Throws,
    ParamType,
    ArgPass,
    VarType,
    Returns,
}

impl FactKind {
    pub const ALL: [FactKind; 13] = [
        FactKind::Declares,
        FactKind::Contains,
        FactKind::Extends,
        FactKind::Implements,
        FactKind::Invokes,
        FactKind::Creates,
        FactKind::Get,
        FactKind::Set,
        FactKind::Throws,
        FactKind::ParamType,
        FactKind::ArgPass,
        FactKind::VarType,
        FactKind::Returns,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FactKind::Declares => "Declares",
            FactKind::Contains => "Contains",
            FactKind::Extends => "Extends",
            FactKind::Implements => "Implements",
            FactKind::Invokes => "Invokes",
            FactKind::Creates => "Creates",
            FactKind::Get => "Get",
            FactKind::Set => "Set",
            FactKind::Throws => "Throws",
            FactKind::ParamType => "ParamType",
            FactKind::ArgPass => "ArgPass",
            FactKind::VarType => "VarType",
            FactKind::Returns => "Returns",
        }
    }

    /// Whether a fact of this kind may connect entities of the given kinds.
    pub fn accepts(self, source: EntityKind, target: EntityKind) -> bool {
        use EntityKind::*;
        let typeish = |k: EntityKind| matches!(k, Class | Interface);
        match self {
            FactKind::Declares => {
                (typeish(source) && target.is_member())
                    || (source.is_callable() && target.is_variable())
            }
            FactKind::Contains => {
                (source == Project && target == Package)
                    || (source == Package && typeish(target))
                    || (typeish(source) && (typeish(target) || target == VirtualInterface))
            }
            FactKind::Extends => typeish(source) && typeish(target),
            FactKind::Implements => {
                typeish(source) && matches!(target, Interface | VirtualInterface)
            }
            FactKind::Invokes => source.is_callable() && target.is_callable(),
            FactKind::Creates => source.is_callable() && typeish(target),
            FactKind::Get | FactKind::Set => source.is_callable() && target == Field,
            FactKind::Throws => source.is_callable() && target == Class,
            FactKind::ParamType => source == Parameter && typeish(target),
            FactKind::ArgPass => {
                source.is_callable() && matches!(target, LocalVariable | Parameter | Field)
            }
            FactKind::VarType => matches!(source, LocalVariable | Field) && typeish(target),
            FactKind::Returns => source == Method && typeish(target),
        }
    }

    /// Containment kinds form the entity forest.
    pub fn is_structural(self) -> bool {
        matches!(self, FactKind::Declares | FactKind::Contains)
    }
}

impl fmt::Display for FactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A base relation tuple. Ordering is lexicographic over all fields, which is
/// the canonical fact order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub kind: FactKind,
    pub source: EntityId,
    pub target: EntityId,
    pub site: Location,
}

impl Fact {
    pub fn new(kind: FactKind, source: &EntityId, target: &EntityId, site: Location) -> Fact {
        Fact {
            kind,
            source: source.clone(),
            target: target.clone(),
            site,
        }
    }
}
