// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Project,
    Package,
    Class,
    Interface,
    VirtualInterface,
    Method,
    Constructor,
    Field,
    Parameter,
    LocalVariable,
}

impl EntityKind {
    pub const ALL: [EntityKind; 10] = [
        EntityKind::Project,
        EntityKind::Package,
        EntityKind::Class,
        EntityKind::Interface,
        EntityKind::VirtualInterface,
        EntityKind::Method,
        EntityKind::Constructor,
        EntityKind::Field,
        EntityKind::Parameter,
        EntityKind::LocalVariable,
    ];

    /// Short lowercase tag used as the prefix of entity ids.
    pub fn tag(self) -> &'static str {
        match self {
            EntityKind::Project => "project",
            EntityKind::Package => "package",
            EntityKind::Class => "class",
            EntityKind::Interface => "interface",
            EntityKind::VirtualInterface => "role",
            EntityKind::Method => "method",
            EntityKind::Constructor => "constructor",
            EntityKind::Field => "field",
            EntityKind::Parameter => "parameter",
            EntityKind::LocalVariable => "local",
        }
    }

    pub fn from_tag(tag: &str) -> Option<EntityKind> {
        EntityKind::ALL.into_iter().find(|k| k.tag() == tag)
    }

    pub fn name(self) -> &'static str {
        match self {
            EntityKind::Project => "Project",
            EntityKind::Package => "Package",
            EntityKind::Class => "Class",
            EntityKind::Interface => "Interface",
            EntityKind::VirtualInterface => "VirtualInterface",
            EntityKind::Method => "Method",
            EntityKind::Constructor => "Constructor",
            EntityKind::Field => "Field",
            EntityKind::Parameter => "Parameter",
            EntityKind::LocalVariable => "LocalVariable",
        }
    }

    pub fn is_callable(self) -> bool {
        matches!(self, EntityKind::Method | EntityKind::Constructor)
    }

    pub fn is_type(self) -> bool {
        matches!(
            self,
            EntityKind::Class | EntityKind::Interface | EntityKind::VirtualInterface
        )
    }

    pub fn is_member(self) -> bool {
        matches!(
            self,
            EntityKind::Method | EntityKind::Constructor | EntityKind::Field
        )
    }

    pub fn is_variable(self) -> bool {
        matches!(self, EntityKind::Parameter | EntityKind::LocalVariable)
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modifier {
    Public,
    Private,
    Protected,
    Static,
    Abstract,
    Final,
}

impl Modifier {
    pub const ALL: [Modifier; 6] = [
        Modifier::Public,
        Modifier::Private,
        Modifier::Protected,
        Modifier::Static,
        Modifier::Abstract,
        Modifier::Final,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Modifier::Public => "public",
            Modifier::Private => "private",
            Modifier::Protected => "protected",
            Modifier::Static => "static",
            Modifier::Abstract => "abstract",
            Modifier::Final => "final",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Modifier> {
        Modifier::ALL.into_iter().find(|m| m.keyword() == word)
    }
}

/// A source range: file path plus 1-based start and end lines.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Location {
    pub file: String,
    pub start: u32,
    pub end: u32,
}

impl Location {
    pub fn new(file: impl Into<String>, start: u32, end: u32) -> Self {
        Location {
            file: file.into(),
            start,
            end,
        }
    }

    pub fn line(file: impl Into<String>, line: u32) -> Self {
        Location::new(file, line, line)
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}:{}", self.file, self.start)
        } else {
            write!(f, "{}:{}-{}", self.file, self.start, self.end)
        }
    }
}

/// Stable entity identifier derived from `(kind, qualified name, signature)`.
///
/// The textual form is `<kind-tag>:<key>` where the key is the qualified name,
/// or for methods and constructors the declaring type's qualified name joined
/// with the signature (`method:p.Figure.changed()`). The triple can be
/// recovered from the id, which is what persisted models rely on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(Arc<str>);

impl EntityId {
    pub fn derive(kind: EntityKind, qualified_name: &str, signature: &str) -> EntityId {
        let key = if kind.is_callable() && !signature.is_empty() {
            match qualified_name.rfind('.') {
                Some(dot) => format!("{}.{}", &qualified_name[..dot], signature),
                None => signature.to_string(),
            }
        } else {
            qualified_name.to_string()
        };
        EntityId(format!("{}:{}", kind.tag(), key).into())
    }

    /// Parses an id produced by [`EntityId::derive`]; `None` for malformed text.
    pub fn parse(text: &str) -> Option<EntityId> {
        let (kind, qname, sig) = Self::split(text)?;
        Some(EntityId::derive(kind, &qname, &sig))
    }

    fn split(text: &str) -> Option<(EntityKind, String, String)> {
        let (tag, key) = text.split_once(':')?;
        let kind = EntityKind::from_tag(tag)?;
        if key.is_empty() {
            return None;
        }
        if !kind.is_callable() {
            return Some((kind, key.to_string(), String::new()));
        }
        let paren = key.find('(')?;
        if !key.ends_with(')') {
            return None;
        }
        let head = &key[..paren];
        let (owner, name) = match head.rfind('.') {
            Some(dot) => (&head[..dot], &head[dot + 1..]),
            None => ("", head),
        };
        if name.is_empty() {
            return None;
        }
        let qname = if owner.is_empty() {
            name.to_string()
        } else {
            format!("{owner}.{name}")
        };
        Some((kind, qname, format!("{name}{}", &key[paren..])))
    }

    /// The `(kind, qualified name, signature)` triple this id was derived from.
    pub fn triple(&self) -> (EntityKind, String, String) {
        Self::split(&self.0).expect("entity ids are always well-formed")
    }

    pub fn kind(&self) -> EntityKind {
        self.triple().0
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for EntityId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for EntityId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        EntityId::parse(&text)
            .filter(|id| id.as_str() == text)
            .ok_or_else(|| serde::de::Error::custom(format!("malformed entity id `{text}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub id: EntityId,
    pub kind: EntityKind,
    pub simple_name: String,
    pub qualified_name: String,
    pub signature: String,
    pub declared_in: Option<EntityId>,
    pub modifiers: BTreeSet<Modifier>,
    pub location: Location,
}

impl Entity {
    pub fn new(
        kind: EntityKind,
        simple_name: impl Into<String>,
        qualified_name: impl Into<String>,
        signature: impl Into<String>,
    ) -> Entity {
        let qualified_name = qualified_name.into();
        let signature = signature.into();
        Entity {
            id: EntityId::derive(kind, &qualified_name, &signature),
            kind,
            simple_name: simple_name.into(),
            qualified_name,
            signature,
            declared_in: None,
            modifiers: BTreeSet::new(),
            location: Location::default(),
        }
    }

    pub fn in_parent(mut self, parent: &EntityId) -> Entity {
        self.declared_in = Some(parent.clone());
        self
    }

    pub fn with_modifiers(mut self, mods: impl IntoIterator<Item = Modifier>) -> Entity {
        self.modifiers.extend(mods);
        self
    }

    pub fn at(mut self, location: Location) -> Entity {
        self.location = location;
        self
    }

    /// Parameter type names encoded in the signature, in order.
    pub fn param_types(&self) -> Vec<&str> {
        signature_params(&self.signature)
    }

    /// The name used in displays: the signature-qualified key for callables.
    pub fn display_name(&self) -> String {
        self.id.as_str().split_once(':').map(|(_, k)| k.to_string()).unwrap_or_default()
    }
}

fn signature_params(signature: &str) -> Vec<&str> {
    let Some(open) = signature.find('(') else {
        return Vec::new();
    };
    let inner = signature[open + 1..].trim_end_matches(')');
    if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_id_encodes_owner_and_signature() {
        let id = EntityId::derive(EntityKind::Method, "p.Figure.changed", "changed()");
        assert_eq!(id.as_str(), "method:p.Figure.changed()");
        assert_eq!(
            id.triple(),
            (EntityKind::Method, "p.Figure.changed".into(), "changed()".into())
        );
    }

    #[test]
    fn ids_round_trip_through_text() {
        let cases = [
            EntityId::derive(EntityKind::Constructor, "p.A.new", "new(int,p.B)"),
            EntityId::derive(EntityKind::Parameter, "p.A.m(p.B).x", ""),
            EntityId::derive(EntityKind::Class, "p.App$1", ""),
            EntityId::derive(EntityKind::Method, "m", "m()"),
        ];
        for id in cases {
            assert_eq!(EntityId::parse(id.as_str()).as_ref(), Some(&id));
            let (k, q, s) = id.triple();
            assert_eq!(EntityId::derive(k, &q, &s), id);
        }
    }

    #[test]
    fn malformed_ids_are_rejected() {
        assert!(EntityId::parse("nope").is_none());
        assert!(EntityId::parse("widget:x").is_none());
        assert!(EntityId::parse("method:p.A.m").is_none());
        assert!(EntityId::parse("class:").is_none());
    }

    #[test]
    fn signature_param_split() {
        assert_eq!(signature_params("m()"), Vec::<&str>::new());
        assert_eq!(signature_params("m(int, p.B)"), vec!["int", "p.B"]);
    }
}
