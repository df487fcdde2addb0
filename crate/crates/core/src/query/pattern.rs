// SPDX-License-Identifier: Apache-2.0

//! Name patterns: kind selectors, dotted globs, parameter lists and the
//! hierarchy suffix.

use std::fmt;

use crate::facts::{Entity, EntityKind, FactKind, FactStore, Modifier};

use super::QueryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selector {
    Type,
    Interface,
    Class,
    Method,
    Field,
    Member,
    Var,
    Param,
    /// Simple-name match over variables and fields.
    Name,
    /// Virtual interfaces.
    Role,
}

impl Selector {
    pub const ALL: [Selector; 10] = [
        Selector::Type,
        Selector::Interface,
        Selector::Class,
        Selector::Method,
        Selector::Field,
        Selector::Member,
        Selector::Var,
        Selector::Param,
        Selector::Name,
        Selector::Role,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Selector::Type => "type",
            Selector::Interface => "interface",
            Selector::Class => "class",
            Selector::Method => "method",
            Selector::Field => "field",
            Selector::Member => "member",
            Selector::Var => "var",
            Selector::Param => "param",
            Selector::Name => "name",
            Selector::Role => "role",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Selector> {
        Selector::ALL.into_iter().find(|s| s.keyword() == word)
    }

    pub fn admits(self, kind: EntityKind) -> bool {
        use EntityKind::*;
        match self {
            Selector::Type => matches!(kind, Class | Interface | VirtualInterface),
            Selector::Interface => matches!(kind, Interface | VirtualInterface),
            Selector::Class => kind == Class,
            Selector::Method => matches!(kind, Method | Constructor),
            Selector::Field => kind == Field,
            Selector::Member => matches!(kind, Method | Constructor | Field),
            Selector::Var => matches!(kind, Parameter | LocalVariable),
            Selector::Param => kind == Parameter,
            Selector::Name => matches!(kind, Parameter | LocalVariable | Field),
            Selector::Role => kind == VirtualInterface,
        }
    }

    fn allows_hierarchy(self) -> bool {
        matches!(self, Selector::Type | Selector::Interface | Selector::Class)
    }

    fn allows_params(self) -> bool {
        matches!(self, Selector::Method | Selector::Member)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamPattern {
    /// `(..)`
    Any,
    /// `(T1,T2)`: exact arity, one type pattern per slot.
    Exact(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub selector: Option<Selector>,
    pub modifiers: Vec<Modifier>,
    /// Return type for callables, declared type for variables and fields.
    pub type_pattern: Option<String>,
    pub name: String,
    pub params: Option<ParamPattern>,
    pub hierarchy: bool,
}

impl Pattern {
    /// A pattern with only a name part.
    pub fn named(selector: Option<Selector>, name: impl Into<String>) -> Pattern {
        Pattern {
            selector,
            modifiers: Vec::new(),
            type_pattern: None,
            name: name.into(),
            params: None,
            hierarchy: false,
        }
    }

    pub fn validate(&self) -> Result<(), QueryError> {
        let err = |reason: &str| {
            Err(QueryError::Pattern {
                pattern: self.to_string(),
                reason: reason.to_string(),
            })
        };
        if self.hierarchy && !self.selector.is_none_or(Selector::allows_hierarchy) {
            return err("`+` applies only to type patterns");
        }
        if self.hierarchy && self.params.is_some() {
            return err("`+` cannot follow a parameter list");
        }
        if self.params.is_some() && !self.selector.is_none_or(Selector::allows_params) {
            return err("parameter lists apply only to method and member patterns");
        }
        let mut words = vec![self.name.as_str()];
        words.extend(self.type_pattern.as_deref());
        if let Some(ParamPattern::Exact(slots)) = &self.params {
            words.extend(slots.iter().map(String::as_str));
        }
        for word in words {
            if word.is_empty() || segments(word).any(str::is_empty) {
                return err("empty name segment");
            }
        }
        if self.selector == Some(Selector::Name) && segments(&self.name).count() > 1 {
            return err("`name` patterns take a simple name");
        }
        Ok(())
    }

    /// Whether the pattern (ignoring `+`) matches the entity.
    pub fn matches(&self, store: &FactStore, entity: &Entity) -> bool {
        if let Some(sel) = self.selector {
            if !sel.admits(entity.kind) {
                return false;
            }
        } else if entity.kind == EntityKind::Project {
            return false;
        }
        if !self.modifiers.iter().all(|m| entity.modifiers.contains(m)) {
            return false;
        }
        match &self.params {
            Some(_) if !entity.kind.is_callable() => return false,
            Some(ParamPattern::Exact(slots)) => {
                let actual = entity.param_types();
                if actual.len() != slots.len()
                    || !slots.iter().zip(&actual).all(|(p, a)| name_matches(p, a))
                {
                    return false;
                }
            }
            _ => {}
        }
        let name_ok = if self.selector == Some(Selector::Name) {
            glob(&self.name, &entity.simple_name)
        } else if entity.kind.is_variable() {
            let owner = entity
                .declared_in
                .as_ref()
                .and_then(|p| store.entity(p))
                .map(|p| p.qualified_name.as_str())
                .unwrap_or("");
            let mut segs: Vec<&str> = segments(owner).filter(|s| !s.is_empty()).collect();
            segs.push(&entity.simple_name);
            suffix_matches(&self.name, &segs)
        } else {
            name_matches(&self.name, &entity.qualified_name)
        };
        if !name_ok {
            return false;
        }
        match &self.type_pattern {
            None => true,
            Some(tp) if tp == "*" => true,
            Some(tp) => {
                let kinds: &[FactKind] = match entity.kind {
                    EntityKind::Method => &[FactKind::Returns],
                    EntityKind::Field | EntityKind::LocalVariable => &[FactKind::VarType],
                    EntityKind::Parameter => &[FactKind::ParamType],
                    _ => &[],
                };
                kinds.iter().any(|&k| {
                    store.facts_from(k, &entity.id).any(|f| {
                        store
                            .entity(&f.target)
                            .is_some_and(|t| name_matches(tp, &t.qualified_name))
                    })
                })
            }
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(sel) = self.selector {
            write!(f, "{} ", sel.keyword())?;
        }
        for m in &self.modifiers {
            write!(f, "{} ", m.keyword())?;
        }
        if let Some(tp) = &self.type_pattern {
            write!(f, "{tp} ")?;
        }
        f.write_str(&self.name)?;
        match &self.params {
            Some(ParamPattern::Any) => f.write_str("(..)")?,
            Some(ParamPattern::Exact(slots)) => write!(f, "({})", slots.join(","))?,
            None => {}
        }
        if self.hierarchy {
            f.write_str("+")?;
        }
        Ok(())
    }
}

fn segments(name: &str) -> impl Iterator<Item = &str> {
    name.split(['.', '$'])
}

/// Suffix match of a dotted glob against a qualified name. A lone `*`
/// matches anything.
pub fn name_matches(pattern: &str, qname: &str) -> bool {
    if pattern == "*" {
        return true;
    }
    let segs: Vec<&str> = segments(qname).collect();
    suffix_matches(pattern, &segs)
}

fn suffix_matches(pattern: &str, segs: &[&str]) -> bool {
    if pattern == "*" {
        return true;
    }
    let pats: Vec<&str> = segments(pattern).collect();
    if pats.len() > segs.len() {
        return false;
    }
    let tail = &segs[segs.len() - pats.len()..];
    pats.iter().zip(tail).all(|(p, s)| glob(p, s))
}

/// Glob within one segment; `*` matches any run of characters.
pub fn glob(pattern: &str, text: &str) -> bool {
    let mut parts = pattern.split('*');
    let first = parts.next().unwrap_or("");
    let Some(mut rest) = text.strip_prefix(first) else {
        return false;
    };
    let parts: Vec<&str> = parts.collect();
    let Some((last, middle)) = parts.split_last() else {
        return rest.is_empty();
    };
    for part in middle {
        match rest.find(part) {
            Some(i) => rest = &rest[i + part.len()..],
            None => return false,
        }
    }
    rest.len() >= last.len() && rest.ends_with(last)
}
