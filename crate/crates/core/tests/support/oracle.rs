// SPDX-License-Identifier: Apache-2.0

//! A deliberately naive reference evaluator for a subset of the query
//! language: its own syntax tree, linear scans over the raw entity and fact
//! lists, and fixpoint loops instead of indexes. Patterns are limited to one
//! name segment with `*` globs.

use std::collections::BTreeSet;

use soquet::facts::{EntityKind, FactKind, FactStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sel {
    Type,
    Class,
    Interface,
    Method,
    Field,
    Member,
    Param,
}

impl Sel {
    pub const ALL: [Sel; 7] = [
        Sel::Type,
        Sel::Class,
        Sel::Interface,
        Sel::Method,
        Sel::Field,
        Sel::Member,
        Sel::Param,
    ];

    fn word(self) -> &'static str {
        match self {
            Sel::Type => "type",
            Sel::Class => "class",
            Sel::Interface => "interface",
            Sel::Method => "method",
            Sel::Field => "field",
            Sel::Member => "member",
            Sel::Param => "param",
        }
    }

    fn admits(self, k: EntityKind) -> bool {
        let allowed: &[EntityKind] = match self {
            Sel::Type => &[EntityKind::Class, EntityKind::Interface, EntityKind::VirtualInterface],
            Sel::Class => &[EntityKind::Class],
            Sel::Interface => &[EntityKind::Interface, EntityKind::VirtualInterface],
            Sel::Method => &[EntityKind::Method, EntityKind::Constructor],
            Sel::Field => &[EntityKind::Field],
            Sel::Member => &[EntityKind::Method, EntityKind::Constructor, EntityKind::Field],
            Sel::Param => &[EntityKind::Parameter],
        };
        allowed.contains(&k)
    }

    pub fn allows_plus(self) -> bool {
        matches!(self, Sel::Type | Sel::Class | Sel::Interface)
    }
}

pub const RELATIONS: [&str; 15] = [
    "invokes",
    "declares",
    "contains",
    "implements",
    "extends",
    "throws",
    "get",
    "set",
    "creates",
    "args",
    "typeof",
    "returns",
    "params",
    "references",
    "compares",
];

#[derive(Debug, Clone)]
pub enum SetExpr {
    Pat { sel: Option<Sel>, name: String, plus: bool },
    TypeMembers(String),
    Package(String),
    /// Indices into the sorted entity list; out-of-range picks a missing id.
    Enum(Vec<usize>),
    SourceOf(Box<TupExpr>),
    TargetOf(Box<TupExpr>),
    And(Box<SetExpr>, Box<SetExpr>),
    Or(Box<SetExpr>, Box<SetExpr>),
}

#[derive(Debug, Clone)]
pub enum TupExpr {
    Prim(usize, Box<SetExpr>, Box<SetExpr>),
    Closure(Box<TupExpr>),
    Restrict(Box<TupExpr>, Box<SetExpr>, Box<SetExpr>),
    And(Box<TupExpr>, Box<TupExpr>),
    Or(Box<TupExpr>, Box<TupExpr>),
}

/// Raw copy of a store: the oracle only ever scans these lists.
pub struct World {
    ents: Vec<Ent>,
    facts: Vec<(FactKind, String, String)>,
}

struct Ent {
    id: String,
    kind: EntityKind,
    qname: String,
    simple: String,
    parent: Option<String>,
}

pub type Tup = (String, String, String);

impl World {
    pub fn new(store: &FactStore) -> World {
        World {
            ents: store
                .entities()
                .map(|e| Ent {
                    id: e.id.to_string(),
                    kind: e.kind,
                    qname: e.qualified_name.clone(),
                    simple: e.simple_name.clone(),
                    parent: e.declared_in.as_ref().map(|p| p.to_string()),
                })
                .collect(),
            facts: store
                .facts()
                .iter()
                .map(|f| (f.kind, f.source.to_string(), f.target.to_string()))
                .collect(),
        }
    }

    pub fn ids(&self) -> Vec<String> {
        let mut v: Vec<String> = self.ents.iter().map(|e| e.id.clone()).collect();
        v.sort();
        v
    }

    fn ent(&self, id: &str) -> Option<&Ent> {
        self.ents.iter().find(|e| e.id == id)
    }

    fn kind(&self, id: &str) -> Option<EntityKind> {
        self.ent(id).map(|e| e.kind)
    }

    fn is_type(k: EntityKind) -> bool {
        matches!(k, EntityKind::Class | EntityKind::Interface | EntityKind::VirtualInterface)
    }

    fn is_member(k: EntityKind) -> bool {
        matches!(k, EntityKind::Method | EntityKind::Constructor | EntityKind::Field)
    }

    /// Containment parent as seen through the fact list.
    fn structural_parent(&self, id: &str) -> Option<String> {
        self.facts
            .iter()
            .find(|(k, _, t)| matches!(k, FactKind::Declares | FactKind::Contains) && t == id)
            .map(|(_, s, _)| s.clone())
    }

    fn children(&self, id: &str) -> Vec<String> {
        self.ents
            .iter()
            .filter(|e| self.structural_parent(&e.id).as_deref() == Some(id))
            .map(|e| e.id.clone())
            .collect()
    }

    fn name_ok(&self, e: &Ent, name: &str) -> bool {
        if matches!(e.kind, EntityKind::Parameter | EntityKind::LocalVariable) {
            return glob(name, &e.simple);
        }
        let last = e.qname.rsplit(['.', '$']).next().unwrap_or("");
        glob(name, last)
    }

    fn with_members(&self, types: BTreeSet<String>) -> BTreeSet<String> {
        let mut out = types.clone();
        for t in &types {
            for c in self.children(t) {
                if self.kind(&c).is_some_and(World::is_member) {
                    out.insert(c);
                }
            }
        }
        out
    }

    fn subtype_closure(&self, roots: BTreeSet<String>) -> BTreeSet<String> {
        let mut out = roots;
        loop {
            let mut grew = false;
            for (k, s, t) in &self.facts {
                if matches!(k, FactKind::Extends | FactKind::Implements) && out.contains(t) && !out.contains(s) {
                    out.insert(s.clone());
                    grew = true;
                }
            }
            if !grew {
                return out;
            }
        }
    }

    fn descendants(&self, roots: &BTreeSet<String>) -> BTreeSet<String> {
        let mut out = roots.clone();
        loop {
            let mut grew = false;
            for e in &self.ents {
                if !out.contains(&e.id) {
                    if let Some(p) = self.structural_parent(&e.id) {
                        if out.contains(&p) {
                            out.insert(e.id.clone());
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                return out;
            }
        }
    }

    fn owner(&self, id: &str) -> String {
        let mut cur = id.to_string();
        loop {
            match self.kind(&cur) {
                Some(
                    EntityKind::Class
                    | EntityKind::Interface
                    | EntityKind::Method
                    | EntityKind::Constructor
                    | EntityKind::Field,
                ) => return cur,
                _ => match self.ent(&cur).and_then(|e| e.parent.clone()) {
                    Some(p) => cur = p,
                    None => return id.to_string(),
                },
            }
        }
    }

    pub fn set(&self, e: &SetExpr) -> BTreeSet<String> {
        match e {
            SetExpr::Pat { sel, name, plus } => {
                let root_sel = match sel {
                    Some(Sel::Class | Sel::Interface) if *plus => Some(Sel::Type),
                    other => *other,
                };
                let matched: BTreeSet<String> = self
                    .ents
                    .iter()
                    .filter(|x| match root_sel {
                        Some(s) => s.admits(x.kind),
                        None => x.kind != EntityKind::Project,
                    })
                    .filter(|x| self.name_ok(x, name))
                    .map(|x| x.id.clone())
                    .collect();
                if !*plus {
                    return matched;
                }
                let roots: BTreeSet<String> = matched
                    .into_iter()
                    .filter(|id| self.kind(id).is_some_and(World::is_type))
                    .collect();
                let all = self.subtype_closure(roots);
                match sel {
                    Some(s) => all.into_iter().filter(|id| self.kind(id).is_some_and(|k| s.admits(k))).collect(),
                    None => self.with_members(all),
                }
            }
            SetExpr::TypeMembers(name) => self.with_members(self.set(&SetExpr::Pat {
                sel: Some(Sel::Type),
                name: name.clone(),
                plus: false,
            })),
            SetExpr::Package(name) => {
                let pkgs: BTreeSet<String> = self
                    .ents
                    .iter()
                    .filter(|x| x.kind == EntityKind::Package && self.name_ok(x, name))
                    .map(|x| x.id.clone())
                    .collect();
                // types reachable from the package through type containment only
                let mut types = BTreeSet::new();
                let mut frontier = pkgs;
                loop {
                    let next: BTreeSet<String> = self
                        .ents
                        .iter()
                        .filter(|x| World::is_type(x.kind) && !types.contains(&x.id))
                        .filter(|x| self.structural_parent(&x.id).is_some_and(|p| frontier.contains(&p)))
                        .map(|x| x.id.clone())
                        .collect();
                    if next.is_empty() {
                        break;
                    }
                    types.extend(next.iter().cloned());
                    frontier = next;
                }
                self.with_members(types)
            }
            SetExpr::Enum(picks) => {
                let ids = self.ids();
                picks.iter().filter_map(|i| ids.get(*i).cloned()).collect()
            }
            SetExpr::SourceOf(t) => self.tup(t).into_iter().map(|(s, _, _)| s).collect(),
            SetExpr::TargetOf(t) => self.tup(t).into_iter().map(|(_, t, _)| t).collect(),
            SetExpr::And(a, b) => self.set(a).intersection(&self.set(b)).cloned().collect(),
            SetExpr::Or(a, b) => self.set(a).union(&self.set(b)).cloned().collect(),
        }
    }

    fn base(&self, kinds: &[FactKind], rel: &str, l: &BTreeSet<String>, r: &BTreeSet<String>) -> BTreeSet<Tup> {
        self.facts
            .iter()
            .filter(|(k, s, t)| kinds.contains(k) && l.contains(s) && r.contains(t))
            .map(|(_, s, t)| (s.clone(), t.clone(), rel.to_string()))
            .collect()
    }

    pub fn tup(&self, e: &TupExpr) -> BTreeSet<Tup> {
        match e {
            TupExpr::Prim(rel, a, b) => {
                let rel = RELATIONS[*rel];
                let (l, r) = (self.set(a), self.set(b));
                match rel {
                    "invokes" => self.base(&[FactKind::Invokes], rel, &l, &r),
                    "declares" => self.base(&[FactKind::Declares], rel, &l, &r),
                    "contains" => self.base(&[FactKind::Contains], rel, &l, &r),
                    "implements" => self.base(&[FactKind::Implements], rel, &l, &r),
                    "extends" => self.base(&[FactKind::Extends], rel, &l, &r),
                    "throws" => self.base(&[FactKind::Throws], rel, &l, &r),
                    "get" => self.base(&[FactKind::Get], rel, &l, &r),
                    "set" => self.base(&[FactKind::Set], rel, &l, &r),
                    "creates" => self.base(&[FactKind::Creates], rel, &l, &r),
                    "args" => self.base(&[FactKind::ArgPass], rel, &l, &r),
                    "returns" => self.base(&[FactKind::Returns], rel, &l, &r),
                    "typeof" => self.base(&[FactKind::VarType, FactKind::ParamType], rel, &l, &r),
                    "params" => self
                        .facts
                        .iter()
                        .filter(|(k, _, t)| *k == FactKind::ParamType && r.contains(t))
                        .filter_map(|(_, p, t)| {
                            let m = self.ent(p)?.parent.clone()?;
                            l.contains(&m).then(|| (m, t.clone(), rel.to_string()))
                        })
                        .collect(),
                    "references" => {
                        let (from, to) = (self.descendants(&l), self.descendants(&r));
                        let kinds = [
                            FactKind::ParamType,
                            FactKind::VarType,
                            FactKind::Creates,
                            FactKind::Get,
                            FactKind::Set,
                            FactKind::Invokes,
                            FactKind::Extends,
                            FactKind::Implements,
                        ];
                        self.facts
                            .iter()
                            .filter(|(k, s, t)| kinds.contains(k) && from.contains(s) && to.contains(t))
                            .map(|(_, s, t)| (self.owner(s), t.clone(), rel.to_string()))
                            .collect()
                    }
                    "compares" => {
                        let callable = |id: &String| {
                            self.kind(id).is_some_and(|k| matches!(k, EntityKind::Method | EntityKind::Constructor))
                        };
                        let mut out = BTreeSet::new();
                        for a in l.iter().filter(|i| callable(i)) {
                            for b in r.iter().filter(|i| callable(i)) {
                                if self.ent(a).map(|e| &e.simple) == self.ent(b).map(|e| &e.simple) {
                                    out.insert((a.clone(), b.clone(), rel.to_string()));
                                }
                            }
                        }
                        out
                    }
                    other => unreachable!("{other}"),
                }
            }
            TupExpr::Closure(inner) => {
                let direct = self.tup(inner);
                let direct_pairs: BTreeSet<(String, String)> =
                    direct.iter().map(|(s, t, _)| (s.clone(), t.clone())).collect();
                let mut reach = direct_pairs.clone();
                loop {
                    let mut add = Vec::new();
                    for (a, b) in &reach {
                        for (c, d) in &reach {
                            if b == c && !reach.contains(&(a.clone(), d.clone())) {
                                add.push((a.clone(), d.clone()));
                            }
                        }
                    }
                    if add.is_empty() {
                        break;
                    }
                    reach.extend(add);
                }
                let mut out = direct;
                for (a, b) in reach.difference(&direct_pairs) {
                    out.insert((a.clone(), b.clone(), "closure".to_string()));
                }
                out
            }
            TupExpr::Restrict(inner, a, b) => {
                let (l, r) = (self.set(a), self.set(b));
                self.tup(inner)
                    .into_iter()
                    .filter(|(s, t, _)| l.contains(s) && r.contains(t))
                    .collect()
            }
            TupExpr::And(a, b) => {
                let right: BTreeSet<(String, String)> =
                    self.tup(b).into_iter().map(|(s, t, _)| (s, t)).collect();
                self.tup(a)
                    .into_iter()
                    .filter(|(s, t, _)| right.contains(&(s.clone(), t.clone())))
                    .collect()
            }
            TupExpr::Or(a, b) => self.tup(a).union(&self.tup(b)).cloned().collect(),
        }
    }
}

/// Single-segment glob, by recursion over both strings.
pub fn glob(p: &str, s: &str) -> bool {
    fn go(p: &[char], s: &[char]) -> bool {
        match p.split_first() {
            None => s.is_empty(),
            Some(('*', rest)) => (0..=s.len()).any(|i| go(rest, &s[i..])),
            Some((c, rest)) => s.first() == Some(c) && go(rest, &s[1..]),
        }
    }
    let p: Vec<char> = p.chars().collect();
    let s: Vec<char> = s.chars().collect();
    go(&p, &s)
}

/// Query text for the oracle trees. Everything is parenthesized.
pub fn render_set(e: &SetExpr, ids: &[String]) -> String {
    match e {
        SetExpr::Pat { sel, name, plus } => {
            let plus = if *plus { "+" } else { "" };
            match sel {
                Some(s) => format!("{} {name}{plus}", s.word()),
                None => format!("{name}{plus}"),
            }
        }
        SetExpr::TypeMembers(n) => format!("type ({n})"),
        SetExpr::Package(n) => format!("package {n}"),
        SetExpr::Enum(picks) => {
            let items: Vec<String> = picks
                .iter()
                .map(|i| format!("{:?}", ids.get(*i).map(String::as_str).unwrap_or("class:zz.Missing")))
                .collect();
            format!("{{{}}}", items.join(", "))
        }
        SetExpr::SourceOf(t) => format!("sourceof({})", render_tup(t, ids)),
        SetExpr::TargetOf(t) => format!("targetof({})", render_tup(t, ids)),
        SetExpr::And(a, b) => format!("({} && {})", render_set(a, ids), render_set(b, ids)),
        SetExpr::Or(a, b) => format!("({} || {})", render_set(a, ids), render_set(b, ids)),
    }
}

pub fn render_tup(e: &TupExpr, ids: &[String]) -> String {
    match e {
        TupExpr::Prim(r, a, b) => format!("{}({}, {})", RELATIONS[*r], render_set(a, ids), render_set(b, ids)),
        TupExpr::Closure(t) => format!("closure({})", render_tup(t, ids)),
        TupExpr::Restrict(t, a, b) => format!(
            "restrict({}, {}, {})",
            render_tup(t, ids),
            render_set(a, ids),
            render_set(b, ids)
        ),
        TupExpr::And(a, b) => format!("({} && {})", render_tup(a, ids), render_tup(b, ids)),
        TupExpr::Or(a, b) => format!("({} || {})", render_tup(a, ids), render_tup(b, ids)),
    }
}

#[cfg(test)]
mod tests {}
