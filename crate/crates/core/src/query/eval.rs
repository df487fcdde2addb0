// SPDX-License-Identifier: Apache-2.0

//! Query evaluation over a sealed fact store.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::facts::{EntityId, EntityKind, FactKind, FactStore, Location};

use super::ast::{Expr, Query, Relation};
use super::pattern::{Pattern, Selector};
use super::QueryError;

pub type EntitySet = BTreeSet<EntityId>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tuple {
    pub source: EntityId,
    pub target: EntityId,
    #[serde(with = "relation_name")]
    pub kind: Relation,
    pub sites: Vec<Location>,
}

mod relation_name {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Relation;

    pub fn serialize<S: Serializer>(rel: &Relation, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(rel.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Relation, D::Error> {
        let name = String::deserialize(d)?;
        if name == "closure" {
            return Ok(Relation::Closure);
        }
        Relation::from_name(&name).ok_or_else(|| serde::de::Error::custom(format!("unknown relation `{name}`")))
    }
}

/// Duplicate-free relation tuples keyed by `(source, target, kind)`; sites of
/// equal tuples are merged.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TupleSet {
    map: BTreeMap<(EntityId, EntityId, Relation), BTreeSet<Location>>,
}

impl TupleSet {
    pub fn new() -> TupleSet {
        TupleSet::default()
    }

    pub fn insert(&mut self, source: EntityId, target: EntityId, kind: Relation, site: Option<Location>) {
        let sites = self.map.entry((source, target, kind)).or_default();
        sites.extend(site);
    }

    pub fn insert_tuple(&mut self, tuple: Tuple) {
        let sites = self.map.entry((tuple.source, tuple.target, tuple.kind)).or_default();
        sites.extend(tuple.sites);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EntityId, &EntityId, Relation, &BTreeSet<Location>)> {
        self.map.iter().map(|((s, t, k), sites)| (s, t, *k, sites))
    }

    pub fn tuples(&self) -> Vec<Tuple> {
        self.iter()
            .map(|(s, t, k, sites)| Tuple {
                source: s.clone(),
                target: t.clone(),
                kind: k,
                sites: sites.iter().cloned().collect(),
            })
            .collect()
    }

    /// Distinct `(source, target)` pairs.
    pub fn pairs(&self) -> BTreeSet<(EntityId, EntityId)> {
        self.map.keys().map(|(s, t, _)| (s.clone(), t.clone())).collect()
    }

    pub fn sources(&self) -> EntitySet {
        self.map.keys().map(|(s, _, _)| s.clone()).collect()
    }

    pub fn targets(&self) -> EntitySet {
        self.map.keys().map(|(_, t, _)| t.clone()).collect()
    }

    pub fn contains_entity(&self, id: &EntityId) -> bool {
        self.map.keys().any(|(s, t, _)| s == id || t == id)
    }

    fn union(mut self, other: TupleSet) -> TupleSet {
        for (key, sites) in other.map {
            self.map.entry(key).or_default().extend(sites);
        }
        self
    }

    /// Left tuples whose endpoint pair also appears on the right.
    fn intersect(self, other: &TupleSet) -> TupleSet {
        let pairs = other.pairs();
        TupleSet {
            map: self
                .map
                .into_iter()
                .filter(|((s, t, _), _)| pairs.contains(&(s.clone(), t.clone())))
                .collect(),
        }
    }
}

impl FromIterator<Tuple> for TupleSet {
    fn from_iter<I: IntoIterator<Item = Tuple>>(iter: I) -> Self {
        let mut set = TupleSet::new();
        for t in iter {
            set.insert_tuple(t);
        }
        set
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Tuples(TupleSet),
    Entities(EntitySet),
}

impl Value {
    fn describe(&self) -> &'static str {
        match self {
            Value::Tuples(_) => "a tuple set",
            Value::Entities(_) => "an entity set",
        }
    }

    pub fn as_tuples(&self) -> Option<&TupleSet> {
        match self {
            Value::Tuples(t) => Some(t),
            Value::Entities(_) => None,
        }
    }

    pub fn as_entities(&self) -> Option<&EntitySet> {
        match self {
            Value::Entities(e) => Some(e),
            Value::Tuples(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Value::Tuples(t) => t.len(),
            Value::Entities(e) => e.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An evaluated query with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultSet {
    pub value: Value,
    pub query: String,
    pub store_hash: String,
}

pub type Env = HashMap<String, Value>;

/// Evaluates a query program; bindings are visible to later statements.
pub fn eval(query: &Query, store: &FactStore) -> Result<ResultSet, QueryError> {
    let (value, _) = eval_program(query, store)?;
    Ok(ResultSet {
        value,
        query: query.to_string(),
        store_hash: store.hash().to_string(),
    })
}

/// Evaluates a program, also returning the final variable environment.
pub fn eval_program(query: &Query, store: &FactStore) -> Result<(Value, Env), QueryError> {
    let ev = Evaluator::new(store);
    let mut env = Env::new();
    let mut last = None;
    for stmt in &query.stmts {
        let value = ev.eval(&stmt.expr, &env)?;
        if let Some(b) = &stmt.binding {
            env.insert(b.name().to_string(), value.clone());
        }
        last = Some(value);
    }
    Ok((last.expect("queries are nonempty"), env))
}

/// Evaluates a context expression to its entity set.
pub fn eval_context(expr: &Expr, store: &FactStore) -> Result<EntitySet, QueryError> {
    match Evaluator::new(store).eval(expr, &Env::new())? {
        Value::Entities(e) => Ok(e),
        Value::Tuples(_) => Err(QueryError::ArityMismatch(
            "a context must evaluate to an entity set".into(),
        )),
    }
}

pub struct Evaluator<'s> {
    store: &'s FactStore,
}

impl<'s> Evaluator<'s> {
    pub fn new(store: &'s FactStore) -> Evaluator<'s> {
        Evaluator { store }
    }

    pub fn eval(&self, expr: &Expr, env: &Env) -> Result<Value, QueryError> {
        Ok(match expr {
            Expr::Var(name) => env
                .get(name)
                .cloned()
                .ok_or_else(|| QueryError::UnboundVariable(name.clone()))?,
            Expr::Pattern(p) => Value::Entities(self.pattern(p)),
            Expr::TypeMembers(name) => {
                let types = self.pattern(&Pattern::named(Some(Selector::Type), name.clone()));
                Value::Entities(self.with_members(types))
            }
            Expr::Package(name) => {
                let mut out = EntitySet::new();
                for pkg in self.store.entities().filter(|e| {
                    e.kind == EntityKind::Package && super::pattern::name_matches(name, &e.qualified_name)
                }) {
                    for t in self.store.children(&pkg.id) {
                        self.collect_types(t, &mut out);
                    }
                }
                Value::Entities(self.with_members(out))
            }
            Expr::Project(name) => {
                let mut out = EntitySet::new();
                if let Some(root) = self.store.project().and_then(|p| self.store.entity(p)) {
                    if super::pattern::glob(name, &root.simple_name) {
                        for child in self.store.children(&root.id) {
                            self.descendants(child, &mut out);
                        }
                    }
                }
                Value::Entities(out)
            }
            Expr::Enumeration(ids) => Value::Entities(
                ids.iter()
                    .filter(|id| self.store.entity(id).is_some())
                    .cloned()
                    .collect(),
            ),
            Expr::Primitive(rel, left, right) => {
                let l = self.entities(left, env, rel.name())?;
                let r = self.entities(right, env, rel.name())?;
                Value::Tuples(self.primitive(*rel, &l, &r))
            }
            Expr::SourceOf(inner) => Value::Entities(self.tuples(inner, env, "sourceof")?.sources()),
            Expr::TargetOf(inner) => Value::Entities(self.tuples(inner, env, "targetof")?.targets()),
            Expr::Closure(inner) => match self.eval(inner, env)? {
                Value::Tuples(t) => Value::Tuples(closure(t)),
                Value::Entities(_) => return Err(QueryError::ClosureOnEntitySet),
            },
            Expr::Restrict(inner, left, right) => {
                let tuples = self.tuples(inner, env, "restrict")?;
                let l = self.entities(left, env, "restrict")?;
                let r = self.entities(right, env, "restrict")?;
                Value::Tuples(
                    tuples
                        .tuples()
                        .into_iter()
                        .filter(|t| l.contains(&t.source) && r.contains(&t.target))
                        .collect(),
                )
            }
            Expr::And(a, b) => match (self.eval(a, env)?, self.eval(b, env)?) {
                (Value::Tuples(x), Value::Tuples(y)) => Value::Tuples(x.intersect(&y)),
                (Value::Entities(x), Value::Entities(y)) => {
                    Value::Entities(x.intersection(&y).cloned().collect())
                }
                (x, y) => {
                    return Err(QueryError::ArityMismatch(format!(
                        "`&&` between {} and {}",
                        x.describe(),
                        y.describe()
                    )))
                }
            },
            Expr::Or(a, b) => match (self.eval(a, env)?, self.eval(b, env)?) {
                (Value::Tuples(x), Value::Tuples(y)) => Value::Tuples(x.union(y)),
                (Value::Entities(mut x), Value::Entities(y)) => {
                    x.extend(y);
                    Value::Entities(x)
                }
                (x, y) => {
                    return Err(QueryError::ArityMismatch(format!(
                        "`||` between {} and {}",
                        x.describe(),
                        y.describe()
                    )))
                }
            },
        })
    }

    fn entities(&self, expr: &Expr, env: &Env, op: &str) -> Result<EntitySet, QueryError> {
        match self.eval(expr, env)? {
            Value::Entities(e) => Ok(e),
            Value::Tuples(_) => Err(QueryError::ArityMismatch(format!(
                "`{op}` expects an entity set, found a tuple set"
            ))),
        }
    }

    fn tuples(&self, expr: &Expr, env: &Env, op: &str) -> Result<TupleSet, QueryError> {
        match self.eval(expr, env)? {
            Value::Tuples(t) => Ok(t),
            Value::Entities(_) => Err(QueryError::ArityMismatch(format!(
                "`{op}` expects a tuple set, found an entity set"
            ))),
        }
    }

    /// Entities matching a pattern; `+` adds subtypes, and for bare patterns
    /// also the members of every type in the hierarchy.
    pub fn pattern(&self, p: &Pattern) -> EntitySet {
        // `class T+` roots the hierarchy at any type named T and keeps the
        // classes in it.
        let root = match p.selector {
            Some(Selector::Class | Selector::Interface) if p.hierarchy => {
                let mut r = p.clone();
                r.selector = Some(Selector::Type);
                r
            }
            _ => p.clone(),
        };
        let matched: EntitySet = self
            .store
            .entities()
            .filter(|e| root.matches(self.store, e))
            .map(|e| e.id.clone())
            .collect();
        if !p.hierarchy {
            return matched;
        }
        let mut types = EntitySet::new();
        for id in matched.iter().filter(|id| id.kind().is_type()) {
            self.subtypes(id, &mut types);
        }
        match p.selector {
            Some(sel) => types.into_iter().filter(|t| sel.admits(t.kind())).collect(),
            None => self.with_members(types),
        }
    }

    /// The type and all transitive subtypes.
    pub fn subtypes(&self, root: &EntityId, out: &mut EntitySet) {
        let mut queue = VecDeque::from([root.clone()]);
        while let Some(t) = queue.pop_front() {
            if !out.insert(t.clone()) {
                continue;
            }
            for kind in [FactKind::Extends, FactKind::Implements] {
                for f in self.store.facts_to(kind, &t) {
                    queue.push_back(f.source.clone());
                }
            }
        }
    }

    /// The type and all transitive supertypes.
    pub fn supertypes(&self, root: &EntityId) -> EntitySet {
        let mut out = EntitySet::new();
        let mut queue = VecDeque::from([root.clone()]);
        while let Some(t) = queue.pop_front() {
            if !out.insert(t.clone()) {
                continue;
            }
            for kind in [FactKind::Extends, FactKind::Implements] {
                for f in self.store.facts_from(kind, &t) {
                    queue.push_back(f.target.clone());
                }
            }
        }
        out
    }

    fn with_members(&self, types: EntitySet) -> EntitySet {
        let mut out = types.clone();
        for t in &types {
            out.extend(
                self.store
                    .children(t)
                    .iter()
                    .filter(|c| c.kind().is_member())
                    .cloned(),
            );
        }
        out
    }

    fn collect_types(&self, id: &EntityId, out: &mut EntitySet) {
        if id.kind().is_type() {
            out.insert(id.clone());
            for child in self.store.children(id) {
                self.collect_types(child, out);
            }
        }
    }

    fn descendants(&self, id: &EntityId, out: &mut EntitySet) {
        out.insert(id.clone());
        for child in self.store.children(id) {
            self.descendants(child, out);
        }
    }

    /// Nearest enclosing type or member, used to report `references`.
    fn owner(&self, id: &EntityId) -> EntityId {
        let mut cursor = id.clone();
        loop {
            if matches!(
                cursor.kind(),
                EntityKind::Class
                    | EntityKind::Interface
                    | EntityKind::Method
                    | EntityKind::Constructor
                    | EntityKind::Field
            ) {
                return cursor;
            }
            match self.store.parent(&cursor) {
                Some(p) => cursor = p.clone(),
                None => return id.clone(),
            }
        }
    }

    fn primitive(&self, rel: Relation, l: &EntitySet, r: &EntitySet) -> TupleSet {
        let mut out = TupleSet::new();
        let base = |kind: FactKind, out: &mut TupleSet| {
            for f in self.store.facts_of_kind(kind) {
                if l.contains(&f.source) && r.contains(&f.target) {
                    out.insert(f.source.clone(), f.target.clone(), rel, Some(f.site.clone()));
                }
            }
        };
        match rel {
            Relation::Invokes => base(FactKind::Invokes, &mut out),
            Relation::Declares => base(FactKind::Declares, &mut out),
            Relation::Contains => base(FactKind::Contains, &mut out),
            Relation::Implements => base(FactKind::Implements, &mut out),
            Relation::Extends => base(FactKind::Extends, &mut out),
            Relation::Throws => base(FactKind::Throws, &mut out),
            Relation::Get => base(FactKind::Get, &mut out),
            Relation::Set => base(FactKind::Set, &mut out),
            Relation::Creates => base(FactKind::Creates, &mut out),
            Relation::Args => base(FactKind::ArgPass, &mut out),
            Relation::Returns => base(FactKind::Returns, &mut out),
            Relation::TypeOf => {
                base(FactKind::VarType, &mut out);
                base(FactKind::ParamType, &mut out);
            }
            Relation::Params => {
                for f in self.store.facts_of_kind(FactKind::ParamType) {
                    if let Some(m) = self.store.parent(&f.source) {
                        if l.contains(m) && r.contains(&f.target) {
                            out.insert(m.clone(), f.target.clone(), rel, Some(f.site.clone()));
                        }
                    }
                }
            }
            Relation::References => {
                let mut from = EntitySet::new();
                for id in l {
                    self.descendants(id, &mut from);
                }
                let mut to = EntitySet::new();
                for id in r {
                    self.descendants(id, &mut to);
                }
                for kind in REFERENCE_EDGES {
                    for f in self.store.facts_of_kind(kind) {
                        if from.contains(&f.source) && to.contains(&f.target) {
                            out.insert(self.owner(&f.source), f.target.clone(), rel, Some(f.site.clone()));
                        }
                    }
                }
            }
            Relation::Compares => {
                let mut by_name: HashMap<&str, Vec<&EntityId>> = HashMap::new();
                for id in r.iter().filter(|id| id.kind().is_callable()) {
                    if let Some(e) = self.store.entity(id) {
                        by_name.entry(e.simple_name.as_str()).or_default().push(id);
                    }
                }
                for id in l.iter().filter(|id| id.kind().is_callable()) {
                    if let Some(e) = self.store.entity(id) {
                        for other in by_name.get(e.simple_name.as_str()).into_iter().flatten() {
                            out.insert(id.clone(), (*other).clone(), rel, None);
                        }
                    }
                }
            }
            Relation::Closure => {}
        }
        out
    }
}

/// Fact kinds that count as one entity referring to another.
pub const REFERENCE_EDGES: [FactKind; 8] = [
    FactKind::ParamType,
    FactKind::VarType,
    FactKind::Creates,
    FactKind::Get,
    FactKind::Set,
    FactKind::Invokes,
    FactKind::Extends,
    FactKind::Implements,
];

/// Transitive closure: existing tuples are kept; pairs reachable only through
/// longer paths are added with kind `closure` and no sites.
pub fn closure(tuples: TupleSet) -> TupleSet {
    let mut succ: BTreeMap<&EntityId, BTreeSet<&EntityId>> = BTreeMap::new();
    for (s, t, _, _) in tuples.iter() {
        succ.entry(s).or_default().insert(t);
    }
    let direct = tuples.pairs();
    let mut added = Vec::new();
    for &start in succ.keys() {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&EntityId> = succ[start].iter().copied().collect();
        while let Some(n) = queue.pop_front() {
            if !seen.insert(n) {
                continue;
            }
            if let Some(next) = succ.get(n) {
                queue.extend(next.iter().copied());
            }
        }
        for reached in seen {
            if !direct.contains(&(start.clone(), reached.clone())) {
                added.push((start.clone(), reached.clone()));
            }
        }
    }
    let mut out = tuples.clone();
    for (s, t) in added {
        out.insert(s, t, Relation::Closure, None);
    }
    out
}
