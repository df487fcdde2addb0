// SPDX-License-Identifier: Apache-2.0

//! Random fact stores and queries for the oracle comparisons. Stores stay
//! within 30 entities and 80 facts; queries within depth 4.

use std::collections::BTreeSet;

use proptest::prelude::*;
use soquet::facts::{Entity, EntityId, EntityKind, Fact, FactKind, FactStore, Location, StoreBuilder};
use soquet::query::{eval, parse_query, Value};

use super::oracle::{render_set, render_tup, Sel, SetExpr, TupExpr, World, RELATIONS};

pub const MAX_ENTITIES: usize = 30;
pub const MAX_FACTS: usize = 80;
pub const MAX_DEPTH: usize = 4;

pub const TYPE_NAMES: [&str; 4] = ["Alpha", "Beta", "Ab", "Gamma"];
pub const METHOD_NAMES: [&str; 4] = ["run", "rank", "put", "size"];
pub const FIELD_NAMES: [&str; 3] = ["val", "vec", "pos"];

#[derive(Debug, Clone)]
pub struct StoreSpec {
    pub two_packages: bool,
    /// (interface?, package, nest under an earlier type?, name)
    pub types: Vec<(bool, usize, Option<usize>, usize)>,
    /// (owner type, member kind (1 field, 2 constructor, else method), name,
    /// parameter types, locals)
    pub members: Vec<(usize, u8, usize, Vec<usize>, u8)>,
    /// (fact kind, source pick, target pick, site line, kept in the sub-store)
    pub facts: Vec<(usize, usize, usize, u32, bool)>,
}

pub fn store_spec() -> impl Strategy<Value = StoreSpec> {
    (
        any::<bool>(),
        prop::collection::vec((any::<bool>(), 0usize..2, prop::option::of(0usize..8), 0usize..4), 1..8),
        prop::collection::vec((0usize..8, 0u8..4, 0usize..4, prop::collection::vec(0usize..8, 0..3), 0u8..2), 0..16),
        prop::collection::vec((0usize..11, 0usize..64, 0usize..64, 1u32..4, any::<bool>()), 0..80),
    )
        .prop_map(|(two_packages, types, members, facts)| StoreSpec {
            two_packages,
            types,
            members,
            facts,
        })
}

/// Fact kinds a random store may carry; containment comes from the entities.
pub const RANDOM_FACTS: [FactKind; 11] = [
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

/// Builds the store, optionally keeping only the facts flagged for the
/// sub-store. Entities are the same either way.
pub fn build(spec: &StoreSpec, sub: bool) -> FactStore {
    let mut b = StoreBuilder::new();
    b.add_entity(Entity::new(EntityKind::Project, "proj", "proj", "")).unwrap();
    let pkgs: Vec<String> = if spec.two_packages { vec!["pa".into(), "pb".into()] } else { vec!["pa".into()] };
    for p in &pkgs {
        b.add_entity(Entity::new(EntityKind::Package, p.as_str(), p.as_str(), "")).unwrap();
    }
    let mut types: Vec<Entity> = Vec::new();
    for (i, (iface, pkg, nest, name)) in spec.types.iter().enumerate() {
        let simple = format!("{}{i}", TYPE_NAMES[*name]);
        let kind = if *iface { EntityKind::Interface } else { EntityKind::Class };
        let parent = nest.filter(|n| *n < i).map(|n| types[n].clone());
        let (qname, parent_id) = match &parent {
            Some(p) => (format!("{}${simple}", p.qualified_name), p.id.clone()),
            None => {
                let pkg = &pkgs[pkg % pkgs.len()];
                let pid = EntityId::derive(EntityKind::Package, pkg, "");
                (format!("{pkg}.{simple}"), pid)
            }
        };
        let e = Entity::new(kind, simple, qname, "").in_parent(&parent_id);
        b.add_entity(e.clone()).unwrap();
        types.push(e);
    }
    for (owner, kind, name, params, locals) in &spec.members {
        if b.entity_count() >= MAX_ENTITIES {
            break;
        }
        let owner = &types[owner % types.len()];
        match kind {
            1 => {
                let n = FIELD_NAMES[name % FIELD_NAMES.len()];
                let _ = b.add_entity(
                    Entity::new(EntityKind::Field, n, format!("{}.{n}", owner.qualified_name), "").in_parent(&owner.id),
                );
            }
            _ => {
                let (ek, n) = if *kind == 2 {
                    (EntityKind::Constructor, owner.simple_name.clone())
                } else {
                    (EntityKind::Method, METHOD_NAMES[*name].to_string())
                };
                let ptypes: Vec<String> = params.iter().map(|p| types[p % types.len()].qualified_name.clone()).collect();
                let sig = format!("{n}({})", ptypes.join(","));
                let m = Entity::new(ek, n.as_str(), format!("{}.{n}", owner.qualified_name), sig).in_parent(&owner.id);
                let key = m.display_name();
                if b.add_entity(m.clone()).is_err() {
                    continue;
                }
                for (j, _) in ptypes.iter().enumerate() {
                    if b.entity_count() >= MAX_ENTITIES {
                        break;
                    }
                    let pn = format!("x{j}");
                    let _ = b.add_entity(
                        Entity::new(EntityKind::Parameter, pn.as_str(), format!("{key}.{pn}"), "").in_parent(&m.id),
                    );
                }
                for j in 0..*locals {
                    if b.entity_count() >= MAX_ENTITIES {
                        break;
                    }
                    let ln = format!("v{j}");
                    let _ = b.add_entity(
                        Entity::new(EntityKind::LocalVariable, ln.as_str(), format!("{key}.{ln}"), "").in_parent(&m.id),
                    );
                }
            }
        }
    }
    // the builder has no entity iterator; seal a copy to list them
    let ents: Vec<Entity> = b.clone().seal().unwrap().entities().cloned().collect();
    let type_rank = |id: &EntityId| types.iter().position(|t| &t.id == id);
    // `full` decides which facts exist; the sub-store keeps a flagged subset
    // of exactly those, so it never holds a fact the full store lacks
    let mut full = b.clone();
    for (k, a, t, line, keep) in &spec.facts {
        // containment facts are added at seal time, one per non-project entity
        if full.fact_count() + (full.entity_count() - 1) >= MAX_FACTS {
            break;
        }
        let kind = RANDOM_FACTS[*k];
        let sources: Vec<&Entity> = ents
            .iter()
            .filter(|s| ents.iter().any(|x| kind.accepts(s.kind, x.kind)))
            .collect();
        if sources.is_empty() {
            continue;
        }
        let src = sources[a % sources.len()];
        let targets: Vec<&Entity> = ents.iter().filter(|x| kind.accepts(src.kind, x.kind)).collect();
        if targets.is_empty() {
            continue;
        }
        let tgt = targets[t % targets.len()];
        if matches!(kind, FactKind::Extends | FactKind::Implements) {
            // keep the subtype graph acyclic: only later types extend earlier ones
            match (type_rank(&src.id), type_rank(&tgt.id)) {
                (Some(s), Some(t)) if s > t => {}
                _ => continue,
            }
        }
        let fact = Fact::new(kind, &src.id, &tgt.id, Location::line("r.oosl", *line));
        if full.add_fact(fact.clone()).is_ok() && *keep {
            b.add_fact(fact).expect("accepted by the full store");
        }
    }
    let chosen = if sub { b } else { full };
    chosen.seal().expect("random stores are well formed")
}

pub const GLOBS: [&str; 8] = ["*", "A*", "*a*", "B*", "r*", "*0", "x*", "*e*"];
pub const EXACT: [&str; 6] = ["Alpha0", "Beta1", "Ab2", "run", "val", "x0"];

pub fn pat() -> impl Strategy<Value = SetExpr> {
    (prop::option::of(0usize..7), any::<bool>(), 0usize..14, any::<bool>()).prop_map(|(sel, exact, n, plus)| {
        let sel = sel.map(|i| Sel::ALL[i]);
        let plus = plus && sel.is_none_or(Sel::allows_plus);
        // bare names without `+` need a glob so they do not parse as variables
        let name = if exact && (sel.is_some() || plus) { EXACT[n % EXACT.len()] } else { GLOBS[n % GLOBS.len()] };
        SetExpr::Pat { sel, name: name.to_string(), plus }
    })
}

pub fn broad() -> impl Strategy<Value = SetExpr> {
    (0usize..4).prop_map(|i| match i {
        0 => SetExpr::Pat { sel: None, name: "*".into(), plus: false },
        1 => SetExpr::Package("*".into()),
        2 => SetExpr::Pat { sel: Some(Sel::Method), name: "*".into(), plus: false },
        _ => SetExpr::Pat { sel: Some(Sel::Type), name: "*".into(), plus: false },
    })
}

pub fn leaf_set() -> BoxedStrategy<SetExpr> {
    prop_oneof![
        4 => broad(),
        6 => pat(),
        1 => (0usize..6).prop_map(|i| SetExpr::TypeMembers(["*", "A*", "Alpha0", "B*", "Gamma3", "*1"][i].into())),
        1 => (0usize..4).prop_map(|i| SetExpr::Package(["pa", "pb", "p*", "*"][i].into())),
        1 => prop::collection::vec(0usize..48, 0..4).prop_map(SetExpr::Enum),
    ]
    .boxed()
}

pub fn set_expr(depth: u32) -> BoxedStrategy<SetExpr> {
    if depth == 0 {
        return leaf_set();
    }
    let d = depth - 1;
    prop_oneof![
        4 => leaf_set(),
        1 => tup_expr(d).prop_map(|t| SetExpr::SourceOf(Box::new(t))),
        1 => tup_expr(d).prop_map(|t| SetExpr::TargetOf(Box::new(t))),
        1 => (set_expr(d), set_expr(d)).prop_map(|(a, b)| SetExpr::And(Box::new(a), Box::new(b))),
        // overlapping operands, so intersections are not almost always empty
        1 => (set_expr(d), set_expr(d)).prop_map(|(a, b)| {
            let wide = SetExpr::Or(Box::new(b), Box::new(a.clone()));
            SetExpr::And(Box::new(a), Box::new(wide))
        }),
        1 => (set_expr(d), set_expr(d)).prop_map(|(a, b)| SetExpr::Or(Box::new(a), Box::new(b))),
    ]
    .boxed()
}

pub fn tup_expr(depth: u32) -> BoxedStrategy<TupExpr> {
    let d = depth.saturating_sub(1);
    let side = || prop_oneof![broad().boxed(), set_expr(d)];
    let prim = (0usize..RELATIONS.len(), side(), side())
        .prop_map(|(r, a, b)| TupExpr::Prim(r, Box::new(a), Box::new(b)));
    if depth == 0 {
        return prim.boxed();
    }
    prop_oneof![
        4 => prim,
        1 => tup_expr(d).prop_map(|t| TupExpr::Closure(Box::new(t))),
        1 => (tup_expr(d), set_expr(d), set_expr(d))
            .prop_map(|(t, a, b)| TupExpr::Restrict(Box::new(t), Box::new(a), Box::new(b))),
        1 => (tup_expr(d), tup_expr(d)).prop_map(|(a, b)| TupExpr::And(Box::new(a), Box::new(b))),
        1 => (tup_expr(d), tup_expr(d)).prop_map(|(a, b)| {
            let wide = TupExpr::Or(Box::new(b), Box::new(TupExpr::Closure(Box::new(a.clone()))));
            TupExpr::And(Box::new(a), Box::new(wide))
        }),
        1 => (tup_expr(d), tup_expr(d)).prop_map(|(a, b)| TupExpr::Or(Box::new(a), Box::new(b))),
    ]
    .boxed()
}

#[derive(Debug, Clone)]
pub enum AnyExpr {
    Set(SetExpr),
    Tup(TupExpr),
}

pub fn any_expr() -> impl Strategy<Value = AnyExpr> {
    prop_oneof![
        1 => set_expr(3).prop_map(AnyExpr::Set),
        2 => tup_expr(3).prop_map(AnyExpr::Tup),
    ]
    .prop_filter("query too deep", |e| depth(e) <= MAX_DEPTH)
}

/// Operator nesting depth; names, contexts and enumerations are 0.
pub fn depth(e: &AnyExpr) -> usize {
    match e {
        AnyExpr::Set(s) => set_depth(s),
        AnyExpr::Tup(t) => tup_depth(t),
    }
}

fn set_depth(e: &SetExpr) -> usize {
    match e {
        SetExpr::Pat { .. } | SetExpr::TypeMembers(_) | SetExpr::Package(_) | SetExpr::Enum(_) => 0,
        SetExpr::SourceOf(t) | SetExpr::TargetOf(t) => 1 + tup_depth(t),
        SetExpr::And(a, b) | SetExpr::Or(a, b) => 1 + set_depth(a).max(set_depth(b)),
    }
}

fn tup_depth(e: &TupExpr) -> usize {
    match e {
        TupExpr::Prim(_, a, b) => 1 + set_depth(a).max(set_depth(b)),
        TupExpr::Closure(t) => 1 + tup_depth(t),
        TupExpr::Restrict(t, a, b) => 1 + tup_depth(t).max(set_depth(a)).max(set_depth(b)),
        TupExpr::And(a, b) | TupExpr::Or(a, b) => 1 + tup_depth(a).max(tup_depth(b)),
    }
}

pub fn render(e: &AnyExpr, ids: &[String]) -> String {
    match e {
        AnyExpr::Set(s) => render_set(s, ids),
        AnyExpr::Tup(t) => render_tup(t, ids),
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Out {
    Set(BTreeSet<String>),
    Tup(BTreeSet<(String, String, String)>),
}

impl Out {
    pub fn pairs(&self) -> BTreeSet<(String, String)> {
        match self {
            Out::Set(s) => s.iter().map(|x| (x.clone(), String::new())).collect(),
            Out::Tup(t) => t.iter().map(|(a, b, _)| (a.clone(), b.clone())).collect(),
        }
    }
}

pub fn run(text: &str, store: &FactStore) -> Out {
    let q = parse_query(text).unwrap_or_else(|e| panic!("{text}: {e}"));
    match eval(&q, store).unwrap_or_else(|e| panic!("{text}: {e}")).value {
        Value::Entities(s) => Out::Set(s.iter().map(|x| x.to_string()).collect()),
        Value::Tuples(t) => Out::Tup(
            t.tuples()
                .into_iter()
                .map(|t| (t.source.to_string(), t.target.to_string(), t.kind.name().to_string()))
                .collect(),
        ),
    }
}

pub fn oracle(e: &AnyExpr, world: &World) -> Out {
    match e {
        AnyExpr::Set(s) => Out::Set(world.set(s)),
        AnyExpr::Tup(t) => Out::Tup(world.tup(t)),
    }
}
